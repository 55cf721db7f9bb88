"""AI-FML engine: IEEE 1855 subset parser, Mamdani inference, PSO tuning,
and AIoT dispatch over MQTT/HTTP."""

from .fml import (
    FuzzySystem, LinguisticVariable, FuzzyTerm, MembershipFunction,
    FuzzyRule, RuleBase, Clause, Violation,
    parse_fml, serialize_fml, validate, FmlError,
)
from .inference import infer, infer_batch, InferenceResult, SampledFunction
from .pso import PsoConfig, pso_train, fitness_mse, sensitivity_sweep, encode, decode
from .dataio import Dataset, load_dataset, save_dataset, split, rmse, demo_system, demo_dataset

__version__ = "0.1.0"
