import math

import numpy as np
import pytest

from aifml.fml.model import (
    Clause,
    FuzzyRule,
    FuzzySystem,
    FuzzyTerm,
    LinguisticVariable,
    MembershipFunction,
    RuleBase,
)
from aifml.inference import (
    SampledFunction,
    aggregate_output,
    antecedent_strength,
    defuzzify,
    fuzzify,
    infer,
    membership_degree,
)

from oracle import naive_infer, random_inputs, random_system


def mf(shape, *params):
    return MembershipFunction(shape, tuple(float(p) for p in params))


def test_triangular_peak():
    assert membership_degree(mf("triangular", 0, 5, 10), False, 5.0) == 1.0


def test_triangular_interpolation():
    assert membership_degree(mf("triangular", 0, 5, 10), False, 2.5) == pytest.approx(0.5)


def test_gaussian_closed_form():
    g = mf("gaussian", 20, 5)
    assert membership_degree(g, False, 20.0) == 1.0
    assert membership_degree(g, False, 25.0) == pytest.approx(math.exp(-0.5))


def test_singleton_definition():
    s = mf("singleton", 7)
    assert membership_degree(s, False, 7.0) == 1.0
    assert membership_degree(s, False, 6.999) == 0.0


def test_complement():
    assert membership_degree(mf("triangular", 0, 5, 10), True, 5.0) == 0.0
    assert membership_degree(mf("triangular", 0, 5, 10), True, 20.0) == 1.0


def test_linear_shapes():
    assert membership_degree(mf("left-linear", 2, 6), False, 0.0) == 1.0
    assert membership_degree(mf("left-linear", 2, 6), False, 4.0) == pytest.approx(0.5)
    assert membership_degree(mf("left-linear", 2, 6), False, 7.0) == 0.0
    assert membership_degree(mf("right-linear", 2, 6), False, 7.0) == 1.0
    assert membership_degree(mf("right-linear", 2, 6), False, 4.0) == pytest.approx(0.5)


TEMP = LinguisticVariable("temp", "input", (0.0, 40.0), (
    FuzzyTerm("cold", mf("triangular", 0, 0, 20)),
    FuzzyTerm("hot", mf("triangular", 15, 40, 40)),
))


def test_fuzzify_hand_evaluated():
    degrees = fuzzify(TEMP, 17.5)
    assert degrees["cold"] == pytest.approx(0.125)
    assert degrees["hot"] == pytest.approx(0.1)


def test_fuzzify_peak_at_domain_edge():
    assert fuzzify(TEMP, 0.0)["cold"] == 1.0


def test_fuzzify_clamps_out_of_domain():
    assert fuzzify(TEMP, 55.0) == fuzzify(TEMP, 40.0)


def test_fuzzify_rejects_non_finite():
    with pytest.raises(ValueError, match="non-finite"):
        fuzzify(TEMP, float("nan"))


def _rule(connector="and", weight=1.0):
    return FuzzyRule("r", weight, connector,
                     (Clause("a", "x"), Clause("b", "y")), (Clause("out", "z"),))


def test_antecedent_and_min():
    fz = {"a": {"x": 0.3}, "b": {"y": 0.7}}
    assert antecedent_strength(_rule(), fz, "MIN", "MAX") == pytest.approx(0.3)


def test_antecedent_and_prod_with_weight():
    fz = {"a": {"x": 0.3}, "b": {"y": 0.7}}
    assert antecedent_strength(_rule(weight=0.5), fz, "PROD", "MAX") == pytest.approx(0.105)


def test_antecedent_or_probor():
    fz = {"a": {"x": 0.3}, "b": {"y": 0.7}}
    assert antecedent_strength(_rule("or"), fz, "MIN", "PROBOR") == pytest.approx(0.79)


def _single_rule_system(act_method="MIN", defuzzifier="COG", out_terms=None,
                        default=None):
    out_terms = out_terms or (FuzzyTerm("z", mf("triangular", 2, 5, 8)),)
    out = LinguisticVariable("out", "output", (0.0, 10.0), out_terms,
                             default_value=default)
    rule = FuzzyRule("r1", 1.0, "and", (Clause("temp", "cold"),),
                     (Clause("out", out_terms[0].name),))
    rb = RuleBase(activation_method=act_method, defuzzifier=defuzzifier, rules=(rule,))
    return FuzzySystem("s", (TEMP, out), rb)


def test_aggregate_full_activation_equals_consequent_mf():
    sys = _single_rule_system()
    sampled = aggregate_output(sys, {"r1": 1.0}, sys.variable("out"))
    expected = membership_degree(mf("triangular", 2, 5, 8), False, sampled.grid)
    assert np.array_equal(sampled.values, expected)


def test_aggregate_zero_activations():
    sys = _single_rule_system()
    sampled = aggregate_output(sys, {"r1": 0.0}, sys.variable("out"))
    assert not sampled.values.any()


def test_aggregate_two_clipped_triangles_pointwise_max():
    t1 = FuzzyTerm("z1", mf("triangular", 0, 3, 6))
    t2 = FuzzyTerm("z2", mf("triangular", 4, 7, 10))
    out = LinguisticVariable("out", "output", (0.0, 10.0), (t1, t2))
    rules = (
        FuzzyRule("r1", 1.0, "and", (Clause("temp", "cold"),), (Clause("out", "z1"),)),
        FuzzyRule("r2", 1.0, "and", (Clause("temp", "hot"),), (Clause("out", "z2"),)),
    )
    sys = FuzzySystem("s", (TEMP, out), RuleBase(rules=rules))
    sampled = aggregate_output(sys, {"r1": 0.4, "r2": 0.8}, out)
    # independent evaluation: clip each triangle separately, then max
    grid = sampled.grid
    clip1 = np.minimum(0.4, membership_degree(t1.mf, False, grid))
    clip2 = np.minimum(0.8, membership_degree(t2.mf, False, grid))
    assert np.array_equal(sampled.values, np.maximum(clip1, clip2))


def test_cog_symmetric_triangle():
    grid = np.linspace(0.0, 10.0, 1001)
    for height in (0.25, 0.6, 1.0):
        values = np.minimum(height, membership_degree(mf("triangular", 2, 5, 8), False, grid))
        value, defaulted = defuzzify(SampledFunction(0.0, 10.0, values), "COG", 99.0)
        assert not defaulted
        assert value == pytest.approx(5.0, abs=1e-9)


def test_mom_plateau_midpoint():
    grid = np.linspace(0.0, 10.0, 1001)
    values = np.where((grid >= 4.0) & (grid <= 6.0), 0.6, 0.0)
    value, defaulted = defuzzify(SampledFunction(0.0, 10.0, values), "MOM", 99.0)
    assert not defaulted
    assert value == pytest.approx(5.0, abs=10.0 / 1000 / 2)


def test_cog_matches_trapezoid_integration_oracle():
    # right-linear term clipped at 0.5 on [0,10]
    grid = np.linspace(0.0, 10.0, 1001)
    shape = mf("right-linear", 2, 9)
    values = np.minimum(0.5, membership_degree(shape, False, grid))
    value, _ = defuzzify(SampledFunction(0.0, 10.0, values), "COG", 99.0)
    fine = np.linspace(0.0, 10.0, 1_000_000)
    fine_values = np.minimum(0.5, membership_degree(shape, False, fine))
    oracle_value = np.trapezoid(fine_values * fine, fine) / np.trapezoid(fine_values, fine)
    assert abs(value - oracle_value) <= 1e-3 * 10.0


def test_defuzzify_empty_returns_default():
    empty = SampledFunction(0.0, 10.0, np.zeros(1001))
    assert defuzzify(empty, "COG", 7.0) == (7.0, True)
    assert defuzzify(empty, "MOM", 7.0) == (7.0, True)


def test_infer_symmetric_consequent():
    sys = _single_rule_system()
    result = infer(sys, {"temp": 0.0})  # cold fires at exactly 1
    assert result.rule_activations["r1"] == 1.0
    assert result.outputs["out"] == pytest.approx(5.0, abs=1e-6)
    assert result.defaulted["out"] is False


def test_infer_no_rule_fired_uses_declared_default():
    sys = _single_rule_system(default=12.0)
    sys = FuzzySystem(sys.name, (
        sys.variables[0],
        LinguisticVariable("out", "output", (0.0, 20.0), sys.variables[1].terms,
                           default_value=12.0),
    ), sys.rule_base)
    result = infer(sys, {"temp": 30.0})  # cold degree 0
    assert result.outputs["out"] == 12.0
    assert result.defaulted["out"] is True


def test_infer_no_rule_fired_midpoint_fallback():
    sys = _single_rule_system()
    result = infer(sys, {"temp": 30.0})
    assert result.outputs["out"] == 5.0
    assert result.defaulted["out"] is True


def test_infer_missing_input():
    sys = _single_rule_system()
    with pytest.raises(ValueError, match="missing input"):
        infer(sys, {})


def test_demo_against_brute_force_oracle(demo_sys):
    expected = naive_infer(demo_sys, {"temp": 35.0, "humidity": 80.0})
    result = infer(demo_sys, {"temp": 35.0, "humidity": 80.0})
    width = 10.0
    assert abs(result.outputs["ac_level"] - expected["ac_level"]) <= 1e-3 * width


def test_membership_range_fuzz_small(rng):
    for _ in range(200):
        lo = rng.uniform(-100, 100)
        hi = lo + rng.uniform(0.1, 200)
        from oracle import _random_mf
        shape = _random_mf(rng, lo, hi)
        xs = rng.uniform(lo - 50, hi + 50, 100)
        values = membership_degree(shape, bool(rng.random() < 0.5), xs)
        assert np.all(np.isfinite(values))
        assert np.all((values >= 0.0) & (values <= 1.0))


def test_output_containment(rng):
    for _ in range(25):
        sys = random_system(rng)
        result = infer(sys, random_inputs(rng, sys))
        for var in sys.outputs:
            assert var.domain[0] <= result.outputs[var.name] <= var.domain[1]


def test_monotone_accumulation(rng):
    for _ in range(10):
        sys = random_system(rng, max_rules=6)
        out = sys.outputs[0]
        inputs = random_inputs(rng, sys)
        result = infer(sys, inputs)
        base = aggregate_output(sys, result.rule_activations, out)
        extra_in = sys.inputs[0]
        new_rule = FuzzyRule("extra", 1.0, "and",
                             (Clause(extra_in.name, extra_in.terms[0].name),),
                             (Clause(out.name, out.terms[0].name),))
        bigger = FuzzySystem(sys.name, sys.variables,
                             RuleBase(sys.rule_base.and_method, sys.rule_base.or_method,
                                      sys.rule_base.activation_method,
                                      sys.rule_base.accumulation_method,
                                      sys.rule_base.defuzzifier,
                                      sys.rule_base.rules + (new_rule,)))
        grown = infer(bigger, inputs)
        after = aggregate_output(bigger, grown.rule_activations, out)
        assert np.all(after.values >= base.values)
        assert after.values.sum() >= base.values.sum()


def test_activation_consistency(rng):
    for _ in range(10):
        sys = random_system(rng)
        inputs = random_inputs(rng, sys)
        result = infer(sys, inputs)
        fz = {v.name: {t: float(d) for t, d in fuzzify(v, inputs[v.name]).items()}
              for v in sys.inputs}
        for rule in sys.rule_base.rules:
            standalone = antecedent_strength(rule, fz, sys.rule_base.and_method,
                                             sys.rule_base.or_method)
            assert result.rule_activations[rule.id] == standalone


def test_infer_determinism(rng):
    sys = random_system(rng)
    inputs = random_inputs(rng, sys)
    first = infer(sys, inputs)
    second = infer(sys, inputs)
    assert first == second
