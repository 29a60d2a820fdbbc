import json
from pathlib import Path

import pytest

from blockspeak.analytics import LogEntry, log_entry_to_data
from blockspeak.cli import main
from blockspeak.costs import DEFAULT_TABLE, CoefficientTable, FeatureVector, cost

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
SCENE = str(FIXTURES / "demo_scene.json")
PLAN = str(FIXTURES / "demo_plan.json")


def write_log(path, entries):
    path.write_text("\n".join(json.dumps(log_entry_to_data(e)) for e in entries) + "\n")


def synthetic_log(tmp_path, n=120, seed=5, subjects=4, noise=0.05):
    import random

    rng = random.Random(seed)
    entries = []
    for i in range(n):
        counts = {}
        for _ in range(rng.randint(1, 5)):
            cat = rng.choice(("REL", "REF", "COL", "CON", "LOC", "CNT", "ORD", "DM"))
            d = rng.randint(0, 4)
            counts[(cat, d)] = counts.get((cat, d), 0) + 1
        features = FeatureVector.from_dict(counts)
        entries.append(LogEntry(
            step=i,
            surface="Put a block on the table.",
            features=features,
            depth=features.depth(),
            utterance_duration=2.7,
            response_time=2.7 + 10.0 + 4.0 * cost(features) + rng.gauss(0, noise),
            accurate=rng.random() < 0.9,
            subject=f"s{i % subjects}",
        ))
    path = tmp_path / "session.jsonl"
    write_log(path, entries)
    return path


class TestGenerate:
    def test_table_output_marks_best(self, capsys):
        assert main(["generate", SCENE, PLAN]) == 0
        out = capsys.readouterr().out
        assert "Put a block on the table." in out
        assert "Add one more." in out
        assert out.count("*") == 6

    def test_json_output(self, capsys):
        assert main(["generate", SCENE, PLAN, "--format", "json"]) == 0
        rows = json.loads(capsys.readouterr().out)
        best = [r for r in rows if r["best"]]
        assert len(best) == 6
        assert best[0]["cost"] == pytest.approx(0.1586)

    def test_tsv_output(self, capsys):
        assert main(["generate", SCENE, PLAN, "--format", "tsv"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert all(len(line.split("\t")) == 6 for line in lines)

    def test_naive_generator(self, capsys):
        assert main(["generate", SCENE, PLAN, "--generator", "naive"]) == 0
        assert "Put a block" in capsys.readouterr().out

    def test_empty_plan_ok(self, tmp_path, capsys):
        plan = tmp_path / "empty.json"
        plan.write_text('{"steps": []}')
        assert main(["generate", SCENE, str(plan)]) == 0

    def test_invalid_step_exit_2(self, tmp_path, capsys):
        plan = tmp_path / "bad.json"
        plan.write_text(json.dumps({"steps": [
            {"block": "new", "color": "red", "to": [0, 2.5, 0]},
        ]}))
        assert main(["generate", SCENE, str(plan)]) == 2
        assert "error" in capsys.readouterr().out

    def test_missing_file_exit_1(self, capsys):
        assert main(["generate", "no-such.json", PLAN]) == 1


class TestFieldViz:
    def test_text_grid(self, tmp_path, capsys):
        scene = tmp_path / "scene.json"
        scene.write_text(json.dumps({
            "table": {"width": 5, "depth": 5},
            "blocks": [{"id": "b1", "pos": [0, 0.5, 0], "color": "red"}],
        }))
        assert main(["field-viz", "behind", "b1", "--scene", str(scene),
                     "--resolution", "11"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 11
        assert all(len(line.split()) == 11 for line in lines)
        # Back rows (printed first) carry the probability mass; z = 1.0
        # (one edge behind the block) is row index 3 of an 11-row grid.
        assert "1.00" in lines[3]
        assert "1.00" not in lines[-1]

    def test_pgm_and_png_outputs(self, tmp_path, capsys):
        pgm = tmp_path / "field.pgm"
        png = tmp_path / "field.png"
        assert main(["field-viz", "at_corner", "table", "--scene", SCENE,
                     "--resolution", "12", "--pgm", str(pgm), "--png", str(png)]) == 0
        header = pgm.read_text().split()
        assert header[:4] == ["P2", "12", "12", "255"]
        assert png.stat().st_size > 0

    def test_unknown_ground(self, capsys):
        assert main(["field-viz", "behind", "b9", "--scene", SCENE]) == 1


class TestAnalyzeAndFit:
    def test_analyze_log_report_and_figure(self, tmp_path, capsys):
        log = synthetic_log(tmp_path)
        png = tmp_path / "report.png"
        assert main(["analyze-log", str(log), "--png", str(png)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("depth")
        assert png.stat().st_size > 0

    def test_fit_cost_round_trip(self, tmp_path, capsys):
        # One subject and no noise: z-scored times are exactly affine in
        # cost, so the fit recovers the defaults up to one scale factor.
        log = synthetic_log(tmp_path, n=400, subjects=1, noise=0.0)
        out_file = tmp_path / "coeffs.json"
        assert main(["fit-cost", str(log), "--out", str(out_file)]) == 0
        fitted = CoefficientTable.from_json(out_file.read_text())
        ratios = [
            fitted.weight(c, d) / DEFAULT_TABLE.weight(c, d)
            for c in ("REL", "REF", "ORD")
            for d in (1, 2)
        ]
        assert max(ratios) - min(ratios) < 1e-6


class TestTtest:
    def test_reports_statistics(self, capsys):
        assert main(["ttest", "1,2,3,4,5", "6,7,8,9,10"]) == 0
        out = capsys.readouterr().out
        assert "t = -5.0000" in out
        assert "df = 8.0000" in out
        assert "p = 0.00105" in out
