import numpy as np
import pytest

from aifml.fml import (
    Clause,
    FmlError,
    FuzzyRule,
    FuzzySystem,
    FuzzyTerm,
    LinguisticVariable,
    MembershipFunction,
    RuleBase,
    parse_fml,
    serialize_fml,
    validate,
)

from oracle import random_system

MINIMAL = """\
<?xml version="1.0" encoding="UTF-8"?>
<fuzzySystem name="mini">
  <knowledgeBase>
    <fuzzyVariable name="temp" type="input" domainLeft="0" domainRight="40">
      <fuzzyTerm name="hot">
        <triangularShape param1="20" param2="30" param3="40"/>
      </fuzzyTerm>
    </fuzzyVariable>
    <fuzzyVariable name="fan" type="output" domainLeft="0" domainRight="10">
      <fuzzyTerm name="fast">
        <triangularShape param1="5" param2="10" param3="10"/>
      </fuzzyTerm>
    </fuzzyVariable>
  </knowledgeBase>
  <mamdaniRuleBase name="rb">
    <rule name="r1">
      <antecedent><clause variable="temp" term="hot"/></antecedent>
      <consequent><clause variable="fan" term="fast"/></consequent>
    </rule>
  </mamdaniRuleBase>
</fuzzySystem>
"""


def test_parse_minimal_document():
    sys = parse_fml(MINIMAL)
    assert len(sys.variables) == 2
    assert len(sys.rule_base.rules) == 1
    assert sys.rule_base.rules[0].weight == 1.0
    assert validate(sys) == []


def test_parse_unordered_triangular_params():
    bad = MINIMAL.replace('param1="20" param2="30" param3="40"',
                          'param1="5" param2="2" param3="9"')
    with pytest.raises(FmlError, match="a ≤ b ≤ c violated") as err:
        parse_fml(bad)
    assert err.value.line is not None


def test_serialize_minimal_has_one_rule_element():
    text = serialize_fml(parse_fml(MINIMAL))
    assert text.count("<rule ") == 1


def test_serialize_parse_roundtrip_random_systems():
    rng = np.random.default_rng(7)
    for _ in range(50):
        sys = random_system(rng)
        assert validate(sys) == []
        assert parse_fml(serialize_fml(sys)) == sys


def test_serialize_fixpoint_byte_identical():
    rng = np.random.default_rng(8)
    for _ in range(50):
        text = serialize_fml(random_system(rng))
        assert serialize_fml(parse_fml(text)) == text


def test_roundtrip_preserves_rule_weights():
    rng = np.random.default_rng(9)
    while True:
        sys = random_system(rng)
        if len(sys.variables) >= 3 and len(sys.rule_base.rules) >= 9:
            break
    back = parse_fml(serialize_fml(sys))
    for a, b in zip(sys.rule_base.rules, back.rule_base.rules):
        assert b.weight == a.weight  # repr round-trip is exact, beyond 15 digits


def test_parse_determinism():
    text = serialize_fml(random_system(np.random.default_rng(10)))
    assert parse_fml(text) == parse_fml(text)


def test_serialize_lf_only():
    assert "\r" not in serialize_fml(parse_fml(MINIMAL))


def test_validate_demo_system_clean(demo_sys):
    assert validate(demo_sys) == []


def test_validate_undeclared_term():
    sys = parse_fml(MINIMAL)
    rule = FuzzyRule("rx", 1.0, "and",
                     (Clause("temp", "freezing"),), (Clause("fan", "fast"),))
    bad = FuzzySystem(sys.name, sys.variables,
                      RuleBase(rules=sys.rule_base.rules + (rule,)))
    violations = validate(bad)
    assert len(violations) == 1
    assert "rx" in violations[0].message and "freezing" in violations[0].message


def test_validate_gaussian_zero_sigma():
    var = LinguisticVariable(
        "x", "input", (0.0, 10.0),
        (FuzzyTerm("g", MembershipFunction("gaussian", (5.0, 0.0))),))
    out = LinguisticVariable(
        "y", "output", (0.0, 1.0),
        (FuzzyTerm("t", MembershipFunction("triangular", (0.0, 0.5, 1.0))),))
    sys = FuzzySystem("s", (var, out), RuleBase(rules=(
        FuzzyRule("r", 1.0, "and", (Clause("x", "g"),), (Clause("y", "t"),)),)))
    violations = validate(sys)
    assert [v.message for v in violations] == ["σ > 0 violated"]
    assert violations[0].path == "variables[0].terms[0].mf"


INVALID_DOCUMENTS = {
    "malformed_xml": MINIMAL[:-30],
    "unknown_root": MINIMAL.replace("fuzzySystem", "fisSystem"),
    "unknown_element": MINIMAL.replace("<knowledgeBase>", "<knowledgeBase><tskVariable/>"),
    "unknown_attribute": MINIMAL.replace('name="mini"', 'name="mini" networkAddress="x"'),
    "unsupported_shape": MINIMAL.replace("triangularShape param1=\"20\" param2=\"30\" param3=\"40\"",
                                         "piShape param1=\"20\" param2=\"30\""),
    "unsupported_defuzzifier": MINIMAL.replace('name="rb"', 'name="rb" defuzzifier="WA"'),
    "unsupported_and_method": MINIMAL.replace('name="rb"', 'name="rb" andMethod="BDIF"'),
    "bad_triangular_order": MINIMAL.replace('param1="20" param2="30" param3="40"',
                                            'param1="30" param2="20" param3="40"'),
    "param_outside_domain": MINIMAL.replace('param1="20" param2="30" param3="40"',
                                            'param1="20" param2="30" param3="99"'),
    "non_numeric_param": MINIMAL.replace('param1="20"', 'param1="warm"'),
    "undeclared_term": MINIMAL.replace('<clause variable="temp" term="hot"/>',
                                       '<clause variable="temp" term="cold"/>'),
    "undeclared_variable": MINIMAL.replace('<clause variable="temp" term="hot"/>',
                                           '<clause variable="pressure" term="hot"/>'),
    "empty_antecedent": MINIMAL.replace('<antecedent><clause variable="temp" term="hot"/></antecedent>',
                                        "<antecedent></antecedent>"),
    "no_rules": MINIMAL.replace('<rule name="r1">\n      <antecedent><clause variable="temp" term="hot"/></antecedent>\n      <consequent><clause variable="fan" term="fast"/></consequent>\n    </rule>\n', ""),
    "no_output_variable": MINIMAL.replace('type="output"', 'type="input"'),
    "inverted_domain": MINIMAL.replace('domainLeft="0" domainRight="40"',
                                       'domainLeft="40" domainRight="0"'),
    "duplicate_term": MINIMAL.replace(
        '<fuzzyTerm name="hot">\n        <triangularShape param1="20" param2="30" param3="40"/>\n      </fuzzyTerm>',
        '<fuzzyTerm name="hot">\n        <triangularShape param1="20" param2="30" param3="40"/>\n      </fuzzyTerm>\n      <fuzzyTerm name="hot">\n        <triangularShape param1="20" param2="30" param3="40"/>\n      </fuzzyTerm>'),
    "weight_out_of_range": MINIMAL.replace('<rule name="r1">', '<rule name="r1" weight="1.5">'),
    "default_on_input": MINIMAL.replace('name="temp" type="input"',
                                        'name="temp" type="input" defaultValue="3"'),
    "antecedent_variable_twice": MINIMAL.replace(
        '<antecedent><clause variable="temp" term="hot"/></antecedent>',
        '<antecedent><clause variable="temp" term="hot"/><clause variable="temp" term="hot"/></antecedent>'),
}


@pytest.mark.parametrize("name", sorted(INVALID_DOCUMENTS))
def test_invalid_document_rejected(name):
    with pytest.raises(FmlError):
        parse_fml(INVALID_DOCUMENTS[name])
