from .model import (
    MembershipFunction,
    FuzzyTerm,
    LinguisticVariable,
    Clause,
    FuzzyRule,
    RuleBase,
    FuzzySystem,
    Violation,
    validate,
    is_valid,
    SHAPES,
    SHAPE_PARAM_COUNT,
)
from .parser import parse_fml, FmlError
from .serializer import serialize_fml

__all__ = [
    "MembershipFunction", "FuzzyTerm", "LinguisticVariable", "Clause",
    "FuzzyRule", "RuleBase", "FuzzySystem", "Violation", "validate",
    "is_valid", "SHAPES", "SHAPE_PARAM_COUNT", "parse_fml", "FmlError",
    "serialize_fml",
]
