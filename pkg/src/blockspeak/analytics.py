"""Study analytics: response-time normalization, summary stats, Welch test.

Response times are adjusted by subtracting the utterance duration, then
z-scored per subject (population standard deviation).  Summary reports
aggregate property counts, response times, and accuracy per directive
depth, over both raw and normalized times.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from scipy.special import betainc

from .costs import FeatureVector

WORD_SECONDS = 0.45


@dataclass(frozen=True)
class LogEntry:
    step: int
    surface: str
    features: FeatureVector
    depth: int
    utterance_duration: float  # seconds
    response_time: float  # seconds, speech start -> action completed
    accurate: Optional[bool]
    subject: str = "s1"

    def __post_init__(self):
        if self.response_time < 0:
            raise ValueError("response_time must be non-negative")


def estimate_utterance_duration(surface: str, per_word: float = WORD_SECONDS) -> float:
    """Crude audio-length proxy: word count times a per-word constant."""
    return len(surface.split()) * per_word


def log_entry_to_data(entry: LogEntry) -> dict:
    return {
        "step": entry.step,
        "surface": entry.surface,
        "features": [[c, d, n] for c, d, n in entry.features.counts],
        "depth": entry.depth,
        "utteranceDuration": entry.utterance_duration,
        "responseTime": entry.response_time,
        "accurate": entry.accurate,
        "subject": entry.subject,
    }


def log_entry_from_data(data: dict) -> LogEntry:
    return LogEntry(
        step=int(data["step"]),
        surface=data["surface"],
        features=FeatureVector.from_dict(
            {(c, d): n for c, d, n in data.get("features", [])}
        ),
        depth=int(data["depth"]),
        utterance_duration=float(data["utteranceDuration"]),
        response_time=float(data["responseTime"]),
        accurate=data.get("accurate"),
        subject=data.get("subject", "s1"),
    )


def load_log(text: str) -> List[LogEntry]:
    """Parse a session log (one JSON object per line)."""
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if line:
            entries.append(log_entry_from_data(json.loads(line)))
    return entries


class DegenerateSampleError(ValueError):
    pass


def normalize_times(entries: Sequence[LogEntry]) -> List[Tuple[FeatureVector, float]]:
    """Per-subject z-scores of (response time - utterance duration).

    A subject whose adjusted times have zero variance maps to all zeros
    rather than dividing by zero.  Every subject needs >= 2 entries.
    """
    by_subject: Dict[str, List[LogEntry]] = {}
    for entry in entries:
        by_subject.setdefault(entry.subject, []).append(entry)
    stats: Dict[str, Tuple[float, float]] = {}
    for subject, group in by_subject.items():
        if len(group) < 2:
            raise DegenerateSampleError(f"subject {subject} has fewer than 2 entries")
        adjusted = [e.response_time - e.utterance_duration for e in group]
        mean = sum(adjusted) / len(adjusted)
        var = sum((t - mean) ** 2 for t in adjusted) / len(adjusted)
        stats[subject] = (mean, math.sqrt(var))
    out: List[Tuple[FeatureVector, float]] = []
    for entry in entries:
        mean, sigma = stats[entry.subject]
        t = entry.response_time - entry.utterance_duration
        z = 0.0 if sigma == 0.0 else (t - mean) / sigma
        out.append((entry.features, z))
    return out


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> Tuple[float, float, float]:
    """Welch's unequal-variances t-test; two-tailed p value.

    Returns (t, Welch-Satterthwaite degrees of freedom, p).  The p value
    comes from the regularized incomplete beta form of the t survival
    function.
    """
    if len(a) < 2 or len(b) < 2:
        raise DegenerateSampleError("both samples need at least 2 values")
    means = []
    sems = []  # s^2 / n
    for sample in (a, b):
        mean = sum(sample) / len(sample)
        var = sum((x - mean) ** 2 for x in sample) / (len(sample) - 1)
        means.append(mean)
        sems.append(var / len(sample))
    if sems[0] == 0.0 and sems[1] == 0.0:
        if means[0] == means[1]:
            return 0.0, float(len(a) + len(b) - 2), 1.0
        raise DegenerateSampleError("zero variance in both samples")
    se = math.sqrt(sems[0] + sems[1])
    t = (means[0] - means[1]) / se
    df = (sems[0] + sems[1]) ** 2 / (
        sems[0] ** 2 / (len(a) - 1) + sems[1] ** 2 / (len(b) - 1)
    )
    if t == 0.0:
        return 0.0, df, 1.0
    x = df / (df + t * t)
    p = float(betainc(df / 2.0, 0.5, x))
    return t, df, min(1.0, p)


@dataclass(frozen=True)
class DepthAggregate:
    depth: int
    count: int
    props_mean: float
    props_std: float
    time_mean: float
    time_std: float
    norm_time_mean: float
    norm_time_std: float
    accuracy_mean: float
    accuracy_std: float


def _mean_std(values: Sequence[float]) -> Tuple[float, float]:
    if not values:
        return 0.0, 0.0
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, math.sqrt(var)


def analyze_log(entries: Sequence[LogEntry]) -> List[DepthAggregate]:
    """Per-depth mean/std of #properties, times, and accuracy."""
    normalized = {
        id(entry): z
        for (entry, (features, z)) in zip(entries, normalize_times(entries))
    }
    by_depth: Dict[int, List[LogEntry]] = {}
    for entry in entries:
        by_depth.setdefault(entry.depth, []).append(entry)
    out = []
    for depth in sorted(by_depth):
        group = by_depth[depth]
        props = _mean_std([float(e.features.total()) for e in group])
        times = _mean_std([e.response_time - e.utterance_duration for e in group])
        norm = _mean_std([normalized[id(e)] for e in group])
        acc = _mean_std([1.0 if e.accurate else 0.0 for e in group if e.accurate is not None])
        out.append(
            DepthAggregate(
                depth=depth,
                count=len(group),
                props_mean=props[0], props_std=props[1],
                time_mean=times[0], time_std=times[1],
                norm_time_mean=norm[0], norm_time_std=norm[1],
                accuracy_mean=acc[0], accuracy_std=acc[1],
            )
        )
    return out


def format_depth_report(aggregates: Sequence[DepthAggregate]) -> str:
    lines = [
        "depth  n     #properties      resp.time (adj)  resp.time (norm)  accuracy",
    ]
    for agg in aggregates:
        lines.append(
            f"{agg.depth:<5d}  {agg.count:<4d}  "
            f"{agg.props_mean:5.2f} ({agg.props_std:4.2f})  "
            f"{agg.time_mean:7.2f} ({agg.time_std:5.2f})  "
            f"{agg.norm_time_mean:7.2f} ({agg.norm_time_std:5.2f})   "
            f"{agg.accuracy_mean:4.2f} ({agg.accuracy_std:4.2f})"
        )
    return "\n".join(lines)
