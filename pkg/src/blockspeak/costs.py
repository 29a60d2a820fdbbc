"""Directive complexity features and the empirical comprehension-cost model.

A directive's complexity is a table of counts n[p][d]: how many properties
of category p occur at chain depth d.  Cost is the weighted sum of those
counts plus an intercept; the default weights were estimated from
utterance-to-action response times.  Chain depth is assigned linearly:
the outermost relation is depth 1, and every further relation along the
chain (including locative phrases on grounds, which are relation features)
increments it.  A ground's plain descriptors count at the depth of the
relation that introduced the ground.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .directive_tree import (
    CAT_CON,
    Conjunction,
    ContextAction,
    DirectiveTree,
    EntityDesc,
    PutDirective,
    Relation,
)

CATEGORIES = ("REL", "REF", "COL", "DM", "CON", "CNT", "ORD", "LOC")
MAX_DEPTH = 4
DEPTHS = tuple(range(MAX_DEPTH + 1))


class DepthOverflowError(ValueError):
    """A feature landed beyond the deepest supported chain level."""


@dataclass(frozen=True)
class FeatureVector:
    counts: tuple  # ((category, depth, count), ...) sorted

    @classmethod
    def from_dict(cls, counts: Dict[Tuple[str, int], int]) -> "FeatureVector":
        items = []
        for (cat, depth), n in counts.items():
            if cat not in CATEGORIES:
                raise ValueError(f"unknown feature category: {cat}")
            if depth not in DEPTHS:
                raise DepthOverflowError(f"depth {depth} outside 0..{MAX_DEPTH}")
            if n < 0:
                raise ValueError("feature counts are non-negative")
            if n:
                items.append((cat, depth, n))
        return cls(counts=tuple(sorted(items)))

    def as_dict(self) -> Dict[Tuple[str, int], int]:
        return {(cat, depth): n for cat, depth, n in self.counts}

    def total(self) -> int:
        """The directive's #prop."""
        return sum(n for _, _, n in self.counts)

    def depth(self) -> int:
        return max((depth for _, depth, _ in self.counts), default=0)

    def as_array(self) -> np.ndarray:
        vec = np.zeros(len(CATEGORIES) * len(DEPTHS))
        for cat, depth, n in self.counts:
            vec[depth * len(CATEGORIES) + CATEGORIES.index(cat)] = n
        return vec

    def __add__(self, other: "FeatureVector") -> "FeatureVector":
        merged = self.as_dict()
        for key, n in other.as_dict().items():
            merged[key] = merged.get(key, 0) + n
        return FeatureVector.from_dict(merged)


@dataclass(frozen=True)
class CoefficientTable:
    weights: tuple  # ((category, depth, weight), ...) dense over all slots
    intercept: float

    @classmethod
    def from_matrix(cls, matrix: Dict[int, Dict[str, float]], intercept: float) -> "CoefficientTable":
        weights = []
        for depth in DEPTHS:
            row = matrix.get(depth, {})
            for cat in CATEGORIES:
                weights.append((cat, depth, float(row.get(cat, 0.0))))
        return cls(weights=tuple(weights), intercept=float(intercept))

    def weight(self, category: str, depth: int) -> float:
        if depth not in DEPTHS:
            raise DepthOverflowError(f"depth {depth} outside 0..{MAX_DEPTH}")
        for cat, d, w in self.weights:
            if cat == category and d == depth:
                return w
        raise ValueError(f"unknown feature category: {category}")

    def as_array(self) -> np.ndarray:
        vec = np.zeros(len(CATEGORIES) * len(DEPTHS))
        for cat, depth, w in self.weights:
            vec[depth * len(CATEGORIES) + CATEGORIES.index(cat)] = w
        return vec

    def scaled(self, factor: float) -> "CoefficientTable":
        return CoefficientTable(
            weights=tuple((c, d, w * factor) for c, d, w in self.weights),
            intercept=self.intercept * factor,
        )

    def to_json(self) -> str:
        matrix = {f"d{d}": {} for d in DEPTHS}
        for cat, depth, w in self.weights:
            matrix[f"d{depth}"][cat] = w
        return json.dumps({"intercept": self.intercept, "weights": matrix}, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CoefficientTable":
        data = json.loads(text)
        matrix = {
            int(key[1:]): {cat: float(w) for cat, w in row.items()}
            for key, row in data["weights"].items()
        }
        return cls.from_matrix(matrix, data["intercept"])


#: Empirically estimated per-(category, depth) weights with intercept
#: 0.0386.  Depth-0 and depth-4 rows are all zero but are stored explicitly
#: so refitting can re-estimate them.
DEFAULT_TABLE = CoefficientTable.from_matrix(
    {
        1: {"REL": 0.099, "REF": 0.021, "COL": -0.053, "DM": -0.026,
            "CON": -0.042, "CNT": -0.051, "ORD": 0.077, "LOC": -0.107},
        2: {"REL": 0.088, "REF": 0.064, "COL": -0.065, "DM": 0.055,
            "CON": 0.114, "CNT": -0.068, "ORD": 0.183, "LOC": -0.145},
        3: {"REL": 0.096, "REF": 0.032, "COL": -0.116, "DM": 0.096,
            "CON": 0.0, "CNT": -0.084, "ORD": 0.0, "LOC": 0.0},
    },
    intercept=0.0386,
)


def _visit_entity(entity: EntityDesc, depth: int, counter, counts) -> None:
    for d in entity.descriptors:
        counts[(d.category, depth)] = counts.get((d.category, depth), 0) + 1
    for _ in entity.locatives:
        counter[0] += 1
        counts[("REL", counter[0])] = counts.get(("REL", counter[0]), 0) + 1
    if entity.qualifier is not None:
        _visit_relation(entity.qualifier, counter, counts)


def _visit_relation(rel: Relation, counter, counts) -> None:
    counter[0] += 1
    depth = counter[0]
    counts[("REL", depth)] = counts.get(("REL", depth), 0) + 1
    _visit_entity(rel.ground, depth, counter, counts)


def feature_vector(tree: DirectiveTree) -> FeatureVector:
    """Count category occurrences per chain depth of a directive tree."""
    if isinstance(tree, ContextAction):
        return FeatureVector.from_dict({(CAT_CON, 0): 1})
    counts: Dict[Tuple[str, int], int] = {}
    counter = [0]
    result = tree.result
    relations = result.relations if isinstance(result, Conjunction) else (result,)
    for rel in relations:
        _visit_relation(rel, counter, counts)
    if counter[0] > MAX_DEPTH:
        raise DepthOverflowError(f"relation chain of length {counter[0]} exceeds {MAX_DEPTH}")
    return FeatureVector.from_dict(counts)


def depth(tree: DirectiveTree) -> int:
    """Length of the longest relation chain (0 for action-context forms)."""
    return feature_vector(tree).depth()


def cost(features: FeatureVector, table: CoefficientTable = DEFAULT_TABLE) -> float:
    total = table.intercept
    for cat, d, n in features.counts:
        total += n * table.weight(cat, d)
    return total


def descriptor_cost(categories: Iterable[str], depth: int, table: CoefficientTable = DEFAULT_TABLE) -> float:
    """Weight sum (no intercept) for descriptor categories at one depth."""
    return sum(table.weight(cat, depth) for cat in categories)


class RankDeficientError(ValueError):
    """The regression design matrix does not determine all weights."""


def fit_coefficients(samples: Sequence[Tuple[FeatureVector, float]]) -> CoefficientTable:
    """Least-squares re-estimation of weights plus intercept.

    Only features observed in the samples are estimated; unobserved
    weights stay zero.  The design restricted to observed features must
    have full column rank.
    """
    n_features = len(CATEGORIES) * len(DEPTHS)
    if len(samples) < 2:
        raise RankDeficientError(f"need at least 2 samples, got {len(samples)}")
    full = np.array([np.append(fv.as_array(), 1.0) for fv, _ in samples])
    times = np.array([t for _, t in samples])
    active = [i for i in range(n_features) if np.any(full[:, i] != 0.0)]
    design = full[:, active + [n_features]]
    if np.linalg.matrix_rank(design) < len(active) + 1:
        raise RankDeficientError("design matrix is rank deficient")
    solution, *_ = np.linalg.lstsq(design, times, rcond=None)
    weights = np.zeros(n_features)
    weights[active] = solution[:-1]
    matrix: Dict[int, Dict[str, float]] = {d: {} for d in DEPTHS}
    for d in DEPTHS:
        for ci, cat in enumerate(CATEGORIES):
            matrix[d][cat] = float(weights[d * len(CATEGORIES) + ci])
    return CoefficientTable.from_matrix(matrix, float(solution[-1]))
