import random

import numpy as np
import pytest

from blockspeak.costs import (
    CATEGORIES,
    DEFAULT_TABLE,
    CoefficientTable,
    DepthOverflowError,
    FeatureVector,
    RankDeficientError,
    cost,
    descriptor_cost,
    feature_vector,
    fit_coefficients,
)
from blockspeak.directive_tree import (
    CAT_CON,
    CAT_REF,
    ContextAction,
    Descriptor,
    EntityDesc,
    PutDirective,
    Relation,
)
from blockspeak.predicates import Predicate


def fv(counts):
    return FeatureVector.from_dict(counts)


class TestFeatureVector:
    def test_from_dict_drops_zeros(self):
        v = fv({("REL", 1): 1, ("REF", 1): 0})
        assert v.as_dict() == {("REL", 1): 1}

    def test_rejects_unknown_category(self):
        with pytest.raises(ValueError):
            fv({("XYZ", 1): 1})

    def test_rejects_depth_overflow(self):
        with pytest.raises(DepthOverflowError):
            fv({("REL", 5): 1})

    def test_addition(self):
        total = fv({("REL", 1): 1}) + fv({("REL", 1): 1, ("REF", 2): 1})
        assert total.as_dict() == {("REL", 1): 2, ("REF", 2): 1}

    def test_totals(self):
        v = fv({("REL", 1): 1, ("REF", 1): 1, ("REL", 2): 1})
        assert v.total() == 3
        assert v.depth() == 2


class TestDefaultWeights:
    def test_intercept(self):
        assert DEFAULT_TABLE.intercept == pytest.approx(0.0386)

    @pytest.mark.parametrize("category,depth,expected", [
        ("REL", 1, 0.099), ("REF", 1, 0.021), ("COL", 1, -0.053),
        ("DM", 1, -0.026), ("CON", 1, -0.042), ("CNT", 1, -0.051),
        ("ORD", 1, 0.077), ("LOC", 1, -0.107),
        ("REL", 2, 0.088), ("REF", 2, 0.064), ("COL", 2, -0.065),
        ("DM", 2, 0.055), ("CON", 2, 0.114), ("CNT", 2, -0.068),
        ("ORD", 2, 0.183), ("LOC", 2, -0.145),
        ("REL", 3, 0.096), ("REF", 3, 0.032), ("COL", 3, -0.116),
        ("DM", 3, 0.096), ("CON", 3, 0.0), ("CNT", 3, -0.084),
        ("ORD", 3, 0.0), ("LOC", 3, 0.0),
    ])
    def test_published_weight(self, category, depth, expected):
        assert DEFAULT_TABLE.weight(category, depth) == pytest.approx(expected)

    def test_depth_0_and_4_rows_are_zero(self):
        for category in CATEGORIES:
            assert DEFAULT_TABLE.weight(category, 0) == 0.0
            assert DEFAULT_TABLE.weight(category, 4) == 0.0


class TestCost:
    def test_zero_vector_costs_intercept(self):
        assert cost(fv({})) == pytest.approx(0.0386)

    def test_depth_2_chain(self):
        v = fv({("REL", 1): 1, ("REF", 1): 1, ("REL", 2): 1})
        assert cost(v) == pytest.approx(0.2466)

    def test_depth_3_chain(self):
        v = fv({("REL", 1): 1, ("REF", 1): 1, ("REL", 2): 1, ("REL", 3): 1})
        assert cost(v) == pytest.approx(0.3426)

    def test_descriptor_cost_no_intercept(self):
        assert descriptor_cost(["COL"], 1) == pytest.approx(-0.053)
        assert descriptor_cost(["REF", "LOC"], 2) == pytest.approx(-0.081)
        assert descriptor_cost([], 3) == 0.0

    def test_linearity(self):
        a = fv({("REL", 1): 1, ("COL", 1): 2})
        b = fv({("REF", 2): 1, ("LOC", 3): 1})
        assert cost(a + b) == pytest.approx(cost(a) + cost(b) - DEFAULT_TABLE.intercept)

    def test_scaling_preserves_argmin(self):
        vectors = [
            fv({("REL", 1): 1, ("REF", 1): 1}),
            fv({("REL", 1): 1, ("CON", 1): 1}),
            fv({("REL", 1): 1, ("REF", 1): 1, ("REL", 2): 1}),
        ]
        scaled = DEFAULT_TABLE.scaled(3.5)
        original = min(range(3), key=lambda i: cost(vectors[i]))
        rescaled = min(range(3), key=lambda i: cost(vectors[i], scaled))
        assert original == rescaled
        for v in vectors:
            assert cost(v, scaled) == pytest.approx(3.5 * cost(v))


class TestTreeFeatures:
    def test_context_action_is_depth_0_con(self):
        v = feature_vector(ContextAction("add_one_more"))
        assert v.as_dict() == {("CON", 0): 1}
        assert cost(v) == pytest.approx(0.0386)

    def test_simple_put(self):
        tree = PutDirective(Relation(
            Predicate.ON_TABLE,
            EntityDesc("table", (Descriptor(CAT_REF, "table"),)),
        ))
        v = feature_vector(tree)
        assert v.as_dict() == {("REL", 1): 1, ("REF", 1): 1}

    def test_context_ground_at_depth_1(self):
        tree = PutDirective(Relation(
            Predicate.ON_TOP,
            EntityDesc("b1", (Descriptor(CAT_CON, "it"),)),
        ))
        assert feature_vector(tree).as_dict() == {("REL", 1): 1, ("CON", 1): 1}


class TestJsonRoundTrip:
    def test_round_trip(self):
        again = CoefficientTable.from_json(DEFAULT_TABLE.to_json())
        assert np.allclose(again.as_array(), DEFAULT_TABLE.as_array())
        assert again.intercept == DEFAULT_TABLE.intercept


def random_features(rng, n):
    out = []
    for _ in range(n):
        counts = {}
        for _ in range(rng.randint(1, 6)):
            cat = rng.choice(CATEGORIES)
            depth = rng.randint(0, 4)
            counts[(cat, depth)] = counts.get((cat, depth), 0) + 1
        out.append(FeatureVector.from_dict(counts))
    return out


class TestFitCoefficients:
    def test_recovers_default_table_from_noiseless_samples(self):
        rng = random.Random(7)
        features = random_features(rng, 400)
        samples = [(v, cost(v)) for v in features]
        fitted = fit_coefficients(samples)
        assert np.allclose(fitted.as_array(), DEFAULT_TABLE.as_array(), atol=1e-6)
        assert fitted.intercept == pytest.approx(0.0386, abs=1e-6)

    def test_identical_samples_rank_error(self):
        v = fv({("REL", 1): 1})
        with pytest.raises(RankDeficientError):
            fit_coefficients([(v, 1.0)] * 50)

    def test_single_active_weight_is_plain_slope(self):
        samples = [(fv({("COL", 1): n}), 2.0 * n + 0.25) for n in range(0, 6)]
        fitted = fit_coefficients(samples)
        assert fitted.weight("COL", 1) == pytest.approx(2.0)
        assert fitted.intercept == pytest.approx(0.25)
        assert fitted.weight("REL", 1) == 0.0
