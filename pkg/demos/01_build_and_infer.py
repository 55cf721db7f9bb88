"""Build a fuzzy system in code, inspect it as FML, and run inference.

Walks the four-stage loop of a fuzzy application: describe linguistic
variables and terms, write rules, infer, and read back the crisp result.
"""

from aifml.fml import (
    Clause,
    FuzzyRule,
    FuzzySystem,
    FuzzyTerm,
    LinguisticVariable,
    MembershipFunction,
    RuleBase,
    serialize_fml,
    validate,
)
from aifml.inference import infer


def term(name, shape, *params):
    return FuzzyTerm(name, MembershipFunction(shape, tuple(float(p) for p in params)))


# Stage 1 — knowledge representation: variables and their vocabulary.
temp = LinguisticVariable(
    "temp", "input", (0.0, 40.0),
    (term("cold", "triangular", 0, 0, 18),
     term("comfortable", "triangular", 15, 22, 28),
     term("hot", "triangular", 25, 40, 40)),
    units="C")

fan = LinguisticVariable(
    "fan", "output", (0.0, 10.0),
    (term("slow", "triangular", 0, 0, 5),
     term("fast", "triangular", 5, 10, 10)),
    default_value=0.0)

# Stage 2 — rules connecting the vocabulary.
rules = RuleBase(
    "MIN", "MAX", "MIN", "MAX", "COG",
    (FuzzyRule("r-cold", 1.0, "and",
               (Clause("temp", "cold"),), (Clause("fan", "slow"),)),
     FuzzyRule("r-hot", 1.0, "and",
               (Clause("temp", "hot"),), (Clause("fan", "fast"),))))

system = FuzzySystem("fan-controller", (temp, fan), rules)
assert validate(system) == []

# The same system as a portable FML document.
print(serialize_fml(system))

# Stage 3/4 — inference and interpretation.
for t in (5.0, 21.0, 30.0, 38.0):
    result = infer(system, {"temp": t})
    marks = " (defaulted)" if result.defaulted["fan"] else ""
    print(f"temp={t:5.1f}C -> fan={result.outputs['fan']:.2f}{marks}  "
          f"activations={ {k: round(v, 3) for k, v in result.rule_activations.items()} }")
