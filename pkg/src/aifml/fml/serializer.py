"""Deterministic FML writer.

Numbers are written with Python's shortest round-trip representation, so
``serialize_fml(parse_fml(serialize_fml(s))) == serialize_fml(s)`` holds
byte for byte.  Output is UTF-8 text with LF line endings.
"""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .model import FuzzySystem, FuzzyTerm, LinguisticVariable, FuzzyRule

_SHAPE_TAG = {
    "triangular": "triangularShape",
    "trapezoidal": "trapezoidShape",
    "gaussian": "gaussianShape",
    "singleton": "singletonShape",
    "left-linear": "leftLinearShape",
    "right-linear": "rightLinearShape",
}


def _num(x: float) -> str:
    return repr(float(x))


def _term_lines(term: FuzzyTerm, indent: str) -> list[str]:
    comp = ' complement="true"' if term.complement else ""
    shape = _SHAPE_TAG[term.mf.shape]
    params = " ".join(f'param{i + 1}="{_num(p)}"' for i, p in enumerate(term.mf.params))
    return [
        f"{indent}<fuzzyTerm name={quoteattr(term.name)}{comp}>",
        f"{indent}  <{shape} {params}/>",
        f"{indent}</fuzzyTerm>",
    ]


def _variable_lines(var: LinguisticVariable, indent: str) -> list[str]:
    attrs = (f"name={quoteattr(var.name)} type={quoteattr(var.role)} "
             f'domainLeft="{_num(var.domain[0])}" domainRight="{_num(var.domain[1])}"')
    if var.units:
        attrs += f" units={quoteattr(var.units)}"
    if var.default_value is not None:
        attrs += f' defaultValue="{_num(var.default_value)}"'
    lines = [f"{indent}<fuzzyVariable {attrs}>"]
    for term in var.terms:
        lines.extend(_term_lines(term, indent + "  "))
    lines.append(f"{indent}</fuzzyVariable>")
    return lines


def _rule_lines(rule: FuzzyRule, indent: str) -> list[str]:
    lines = [f"{indent}<rule name={quoteattr(rule.id)} "
             f'weight="{_num(rule.weight)}" connector={quoteattr(rule.connector)}>']
    for part, clauses in (("antecedent", rule.antecedent), ("consequent", rule.consequent)):
        lines.append(f"{indent}  <{part}>")
        for cl in clauses:
            lines.append(f"{indent}    <clause variable={quoteattr(cl.variable)} term={quoteattr(cl.term)}/>")
        lines.append(f"{indent}  </{part}>")
    lines.append(f"{indent}</rule>")
    return lines


def serialize_fml(sys: FuzzySystem) -> str:
    rb = sys.rule_base
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<fuzzySystem name={quoteattr(sys.name)}>",
        "  <knowledgeBase>",
    ]
    for var in sys.variables:
        lines.extend(_variable_lines(var, "    "))
    lines.append("  </knowledgeBase>")
    lines.append(
        f"  <mamdaniRuleBase name={quoteattr(sys.name + '-rules')} "
        f"andMethod={quoteattr(rb.and_method)} orMethod={quoteattr(rb.or_method)} "
        f"activationMethod={quoteattr(rb.activation_method)} "
        f"accumulationMethod={quoteattr(rb.accumulation_method)} "
        f"defuzzifier={quoteattr(rb.defuzzifier)}>"
    )
    for rule in rb.rules:
        lines.extend(_rule_lines(rule, "    "))
    lines.append("  </mamdaniRuleBase>")
    lines.append("</fuzzySystem>")
    return "\n".join(lines) + "\n"
