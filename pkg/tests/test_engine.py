import json
from pathlib import Path

import pytest

from blockspeak.engine import (
    EngineConfig,
    GenerationError,
    InteractionContext,
    generate,
    naive_generate,
    narrate_plan,
)
from blockspeak.scene import MoveDirective, Vec3, apply_move, load_plan, load_scene

from test_scene import make_scene

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def fixture_reports(generator="egt"):
    scene = load_scene((FIXTURES / "demo_scene.json").read_text())
    plan = load_plan((FIXTURES / "demo_plan.json").read_text())
    return narrate_plan(scene, plan, generator=generator)


class TestGenerate:
    def test_empty_table_placement(self):
        scene = make_scene()
        result = generate(MoveDirective(None, Vec3(1, 0.5, -1), "red"), scene)
        assert result.best.surface == "Put a block on the table."

    def test_stacking_names_the_support(self):
        scene = make_scene((0, 0.5, 0))
        result = generate(MoveDirective(None, Vec3(0, 1.5, 0), "red"), scene)
        assert result.best.surface == "Put a block on top of the block."

    def test_context_pronoun_after_acting(self):
        scene = make_scene((0, 0.5, 0))
        ctx = InteractionContext().advanced("b1", None)
        result = generate(MoveDirective(None, Vec3(0, 1.5, 0), "red"), scene, ctx)
        assert result.best.surface == "Put a block on top of it."

    def test_color_distinguishes(self):
        scene = make_scene((0, 0.5, 0), (2, 0.5, 0), colors={0: "red", 1: "blue"})
        result = generate(MoveDirective(None, Vec3(0, 1.5, 0), "red"), scene)
        surfaces = {a.surface for a in result.alternatives}
        assert "Put a block on top of the red block." in surfaces

    def test_best_is_minimum_cost_selectable(self):
        scene = make_scene((0, 0.5, 0), (0, 1.5, 0), (2, 0.5, 1))
        result = generate(MoveDirective(None, Vec3(0, 0.5, 1.2), "red"), scene)
        selectable = [a for a in result.alternatives if a.selectable]
        assert result.best.cost == pytest.approx(min(a.cost for a in selectable))

    def test_alternatives_sorted_by_cost(self):
        scene = make_scene((0, 0.5, 0), (0, 1.5, 0))
        result = generate(MoveDirective(None, Vec3(0, 2.5, 0), "red"), scene)
        costs = [round(a.cost, 12) for a in result.alternatives]
        assert costs == sorted(costs)

    def test_surfaces_unique(self):
        for report in fixture_reports():
            surfaces = [a.surface for a in report.result.alternatives]
            assert len(surfaces) == len(set(surfaces))


class TestFixturePlan:
    BEST = [
        ("Put a block on the table.", 0.158),
        ("Put a block on top of it.", 0.096),
        ("Put a block behind the stack.", 0.158),
        ("Put a block to the right of it.", 0.096),
        ("Put a block behind the stack.", 0.158),
        ("Add one more.", 0.039),
    ]

    def test_best_directives_and_costs(self):
        reports = fixture_reports()
        assert len(reports) == 6
        for report, (surface, cost) in zip(reports, self.BEST):
            assert report.error is None
            assert report.result.best.surface == surface
            assert report.result.best.cost == pytest.approx(cost, abs=0.002)

    def test_repetition_requires_matching_support_chain(self):
        # "Add one more." appears only at the final step, where the new
        # block lands on the block placed by the previous stacking step.
        reports = fixture_reports()
        for report in reports[:5]:
            surfaces = {a.surface for a in report.result.alternatives}
            assert "Add one more." not in surfaces

    def test_determinism(self):
        first = [
            [(a.surface, round(a.cost, 12)) for a in r.result.alternatives]
            for r in fixture_reports()
        ]
        second = [
            [(a.surface, round(a.cost, 12)) for a in r.result.alternatives]
            for r in fixture_reports()
        ]
        assert first == second


class TestNaiveGenerate:
    def test_empty_scene_uses_table(self):
        scene = make_scene()
        alt = naive_generate(MoveDirective(None, Vec3(0, 0.5, 0), "red"), scene)
        assert "table" in alt.surface or "center" in alt.surface

    def test_includes_every_applicable_property(self):
        scene = make_scene((-2, 0.5, -2), (2, 0.5, 2))
        ctx = InteractionContext().advanced("b1", None).advanced("b2", None)
        alt = naive_generate(MoveDirective(None, Vec3(-2, 1.5, -2), "red"), scene, ctx)
        assert "red" in alt.surface
        assert alt.props >= 4

    def test_never_cheaper_than_optimal_on_fixture(self):
        for report in fixture_reports():
            assert report.naive.cost >= report.result.best.cost - 1e-9


class TestNarratePlan:
    def test_error_step_reported_and_scene_untouched(self):
        scene = make_scene()
        plan = [
            MoveDirective(None, Vec3(0, 0.5, 0), "red"),
            MoveDirective(None, Vec3(2, 2.5, 2), "red"),  # floating: invalid
            MoveDirective(None, Vec3(0, 1.5, 0), "red"),
        ]
        reports = narrate_plan(scene, plan)
        assert reports[1].error is not None
        assert reports[2].error is None
        assert reports[2].result.best.surface == "Put a block on top of it."

    def test_empty_plan(self):
        assert narrate_plan(make_scene(), []) == []
