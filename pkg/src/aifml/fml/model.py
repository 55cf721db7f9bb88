"""Document model for the supported FML subset.

All types are frozen dataclasses: a system is immutable after construction
and safe to share across threads.  Structural soundness is checked by
:func:`validate`, which reports every broken invariant with a path string
such as ``variables[0].terms[2].mf``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace


SHAPES = ("triangular", "trapezoidal", "gaussian", "singleton", "left-linear", "right-linear")

SHAPE_PARAM_COUNT = {
    "triangular": 3,
    "trapezoidal": 4,
    "gaussian": 2,
    "singleton": 1,
    "left-linear": 2,
    "right-linear": 2,
}

AND_METHODS = ("MIN", "PROD")
OR_METHODS = ("MAX", "PROBOR")
ACTIVATION_METHODS = ("MIN", "PROD")
ACCUMULATION_METHODS = ("MAX",)
DEFUZZIFIERS = ("COG", "MOM")


@dataclass(frozen=True)
class MembershipFunction:
    shape: str
    params: tuple[float, ...]


@dataclass(frozen=True)
class FuzzyTerm:
    name: str
    mf: MembershipFunction
    complement: bool = False


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    role: str  # "input" | "output"
    domain: tuple[float, float]
    terms: tuple[FuzzyTerm, ...]
    units: str = ""
    default_value: float | None = None

    def term(self, name: str) -> FuzzyTerm:
        for t in self.terms:
            if t.name == name:
                return t
        raise KeyError(f"variable {self.name!r} has no term {name!r}")


@dataclass(frozen=True)
class Clause:
    variable: str
    term: str


@dataclass(frozen=True)
class FuzzyRule:
    id: str
    weight: float
    connector: str  # "and" | "or"
    antecedent: tuple[Clause, ...]
    consequent: tuple[Clause, ...]


@dataclass(frozen=True)
class RuleBase:
    and_method: str = "MIN"
    or_method: str = "MAX"
    activation_method: str = "MIN"
    accumulation_method: str = "MAX"
    defuzzifier: str = "COG"
    rules: tuple[FuzzyRule, ...] = ()


@dataclass(frozen=True)
class FuzzySystem:
    name: str
    variables: tuple[LinguisticVariable, ...]
    rule_base: RuleBase

    def variable(self, name: str) -> LinguisticVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(f"no variable named {name!r}")

    @property
    def inputs(self) -> tuple[LinguisticVariable, ...]:
        return tuple(v for v in self.variables if v.role == "input")

    @property
    def outputs(self) -> tuple[LinguisticVariable, ...]:
        return tuple(v for v in self.variables if v.role == "output")


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def _validate_mf(mf: MembershipFunction, lo: float, hi: float, path: str, out: list[Violation]) -> None:
    if mf.shape not in SHAPES:
        out.append(Violation(path, f"unsupported shape {mf.shape!r}"))
        return
    want = SHAPE_PARAM_COUNT[mf.shape]
    if len(mf.params) != want:
        out.append(Violation(path, f"{mf.shape} takes {want} parameters, got {len(mf.params)}"))
        return
    p = mf.params
    if mf.shape == "triangular" and not (p[0] <= p[1] <= p[2]):
        out.append(Violation(path, "parameter order a ≤ b ≤ c violated"))
    if mf.shape == "trapezoidal" and not (p[0] <= p[1] <= p[2] <= p[3]):
        out.append(Violation(path, "parameter order a ≤ b ≤ c ≤ d violated"))
    if mf.shape == "gaussian" and not p[1] > 0:
        out.append(Violation(path, "σ > 0 violated"))
    if mf.shape in ("left-linear", "right-linear") and not p[0] < p[1]:
        out.append(Violation(path, "parameter order a < b violated"))
    # location parameters must sit inside the variable's domain; a gaussian
    # width is a scale, bounded by the domain width instead
    if mf.shape == "gaussian":
        locations = p[:1]
        if p[1] > hi - lo:
            out.append(Violation(path, f"σ = {p[1]} exceeds domain width {hi - lo}"))
    else:
        locations = p
    for i, x in enumerate(locations):
        if not (lo <= x <= hi):
            out.append(Violation(path, f"parameter {i + 1} = {x} outside domain [{lo}, {hi}]"))


def validate(sys: FuzzySystem) -> list[Violation]:
    """Return every violated invariant (empty list = valid system)."""
    out: list[Violation] = []
    seen_vars: set[str] = set()
    for vi, var in enumerate(sys.variables):
        vpath = f"variables[{vi}]"
        if var.name in seen_vars:
            out.append(Violation(vpath, f"duplicate variable name {var.name!r}"))
        seen_vars.add(var.name)
        if var.role not in ("input", "output"):
            out.append(Violation(vpath, f"role must be input or output, got {var.role!r}"))
        lo, hi = var.domain
        if not lo < hi:
            out.append(Violation(vpath, f"domain requires lo < hi, got [{lo}, {hi}]"))
            continue
        if not var.terms:
            out.append(Violation(vpath, "variable needs at least one term"))
        if var.default_value is not None:
            if var.role != "output":
                out.append(Violation(vpath, "default value only allowed on output variables"))
            elif not (lo <= var.default_value <= hi):
                out.append(Violation(vpath, f"default value {var.default_value} outside domain [{lo}, {hi}]"))
        seen_terms: set[str] = set()
        for ti, term in enumerate(var.terms):
            tpath = f"{vpath}.terms[{ti}]"
            if term.name in seen_terms:
                out.append(Violation(tpath, f"duplicate term name {term.name!r}"))
            seen_terms.add(term.name)
            _validate_mf(term.mf, lo, hi, f"{tpath}.mf", out)

    if not sys.inputs:
        out.append(Violation("variables", "system needs at least one input variable"))
    if not sys.outputs:
        out.append(Violation("variables", "system needs at least one output variable"))

    rb = sys.rule_base
    if rb.and_method not in AND_METHODS:
        out.append(Violation("rule_base", f"unsupported and_method {rb.and_method!r}"))
    if rb.or_method not in OR_METHODS:
        out.append(Violation("rule_base", f"unsupported or_method {rb.or_method!r}"))
    if rb.activation_method not in ACTIVATION_METHODS:
        out.append(Violation("rule_base", f"unsupported activation_method {rb.activation_method!r}"))
    if rb.accumulation_method not in ACCUMULATION_METHODS:
        out.append(Violation("rule_base", f"unsupported accumulation_method {rb.accumulation_method!r}"))
    if rb.defuzzifier not in DEFUZZIFIERS:
        out.append(Violation("rule_base", f"unsupported defuzzifier {rb.defuzzifier!r}"))
    if not rb.rules:
        out.append(Violation("rule_base", "rule base needs at least one rule"))

    by_name = {v.name: v for v in sys.variables}
    seen_rules: set[str] = set()
    for ri, rule in enumerate(rb.rules):
        rpath = f"rule_base.rules[{ri}]"
        if rule.id in seen_rules:
            out.append(Violation(rpath, f"duplicate rule id {rule.id!r}"))
        seen_rules.add(rule.id)
        if not 0.0 <= rule.weight <= 1.0:
            out.append(Violation(rpath, f"weight {rule.weight} outside [0, 1]"))
        if rule.connector not in ("and", "or"):
            out.append(Violation(rpath, f"connector must be and/or, got {rule.connector!r}"))
        if not rule.antecedent:
            out.append(Violation(rpath, "antecedent is empty"))
        if not rule.consequent:
            out.append(Violation(rpath, "consequent is empty"))
        seen_ante_vars: set[str] = set()
        for part, clauses, want_role in (("antecedent", rule.antecedent, "input"),
                                         ("consequent", rule.consequent, "output")):
            for ci, cl in enumerate(clauses):
                cpath = f"{rpath}.{part}[{ci}]"
                var = by_name.get(cl.variable)
                if var is None:
                    out.append(Violation(cpath, f"rule {rule.id!r} references undeclared variable {cl.variable!r}"))
                    continue
                if var.role != want_role:
                    out.append(Violation(cpath, f"rule {rule.id!r} uses {var.role} variable {cl.variable!r} in {part}"))
                try:
                    var.term(cl.term)
                except KeyError:
                    out.append(Violation(
                        cpath, f"rule {rule.id!r} references term {cl.term!r} not declared on {cl.variable!r}"))
                if part == "antecedent":
                    if cl.variable in seen_ante_vars:
                        out.append(Violation(cpath, f"variable {cl.variable!r} appears twice in antecedent of rule {rule.id!r}"))
                    seen_ante_vars.add(cl.variable)
    return out


def is_valid(sys: FuzzySystem) -> bool:
    return not validate(sys)
