"""Mamdani inference: fuzzification, rule evaluation, aggregation, defuzzification.

Everything here is a pure function over immutable inputs.  The kernels are
vectorized over batches of crisp input rows so that PSO fitness evaluation
(thousands of inferences per second) stays cheap; ``infer`` is the
single-row wrapper around the same code path, which keeps the reported
activations bit-identical between the two.

Crisp inputs outside a variable's domain are clamped to it.  When no rule
fires for an output, the declared default value (or the domain midpoint)
is returned and flagged via ``defaulted``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fml.model import FuzzyRule, FuzzySystem, LinguisticVariable, MembershipFunction

# 2001 keeps COG error well under 1e-3 of domain width.  MOM is grid-hungrier:
# with several disjoint maximizing plateaus its error scales like the grid
# spacing times the plateau separation, so it gets a finer default.
DEFAULT_RESOLUTION = 2001
DEFAULT_MOM_RESOLUTION = 20001


@dataclass(frozen=True)
class SampledFunction:
    """Membership degrees sampled on a uniform grid over [lo, hi]."""
    lo: float
    hi: float
    values: np.ndarray  # shape (n,)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, len(self.values))


@dataclass(frozen=True)
class InferenceResult:
    outputs: dict[str, float]
    rule_activations: dict[str, float]
    defaulted: dict[str, bool]

    def to_json_dict(self) -> dict:
        """Wire shape shared by the HTTP API and the CLI --json output."""
        return {
            "outputs": dict(self.outputs),
            "rule_activations": dict(self.rule_activations),
            "defaulted": dict(self.defaulted),
        }


def membership_degree(mf: MembershipFunction, complement: bool, x):
    """Degree of membership of ``x`` (scalar or ndarray) in ``mf``."""
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    p = mf.params
    y = np.zeros(x.shape)
    if mf.shape == "triangular":
        a, b, c = p
        if b > a:
            m = (x > a) & (x < b)
            y[m] = (x[m] - a) / (b - a)
        if c > b:
            m = (x > b) & (x < c)
            y[m] = (c - x[m]) / (c - b)
        y[x == b] = 1.0
    elif mf.shape == "trapezoidal":
        a, b, c, d = p
        if b > a:
            m = (x > a) & (x < b)
            y[m] = (x[m] - a) / (b - a)
        if d > c:
            m = (x > c) & (x < d)
            y[m] = (d - x[m]) / (d - c)
        y[(x >= b) & (x <= c)] = 1.0
    elif mf.shape == "gaussian":
        c, sigma = p
        y = np.exp(-0.5 * ((x - c) / sigma) ** 2)
    elif mf.shape == "singleton":
        y[x == p[0]] = 1.0
    elif mf.shape == "left-linear":
        a, b = p  # μ = 1 left of a, falling to 0 at b
        y[x <= a] = 1.0
        m = (x > a) & (x < b)
        y[m] = (b - x[m]) / (b - a)
    elif mf.shape == "right-linear":
        a, b = p  # μ = 0 left of a, rising to 1 at b
        y[x >= b] = 1.0
        m = (x > a) & (x < b)
        y[m] = (x[m] - a) / (b - a)
    else:
        raise ValueError(f"unsupported shape {mf.shape!r}")
    if complement:
        y = 1.0 - y
    return float(y) if scalar else y


def fuzzify(var: LinguisticVariable, x) -> dict[str, np.ndarray]:
    """Degrees for every term of ``var`` at crisp value(s) ``x``, clamped to the domain."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"non-finite input for variable {var.name!r}")
    x = np.clip(x, var.domain[0], var.domain[1])
    return {t.name: membership_degree(t.mf, t.complement, x) for t in var.terms}


def _fold(values, connector_method):
    acc = values[0]
    for v in values[1:]:
        if connector_method == "MIN":
            acc = np.minimum(acc, v)
        elif connector_method == "PROD":
            acc = acc * v
        elif connector_method == "MAX":
            acc = np.maximum(acc, v)
        elif connector_method == "PROBOR":
            # algebraically a + v - a*v; this form cannot round outside [0, 1]
            acc = 1.0 - (1.0 - acc) * (1.0 - v)
        else:
            raise ValueError(f"unsupported combination method {connector_method!r}")
    return acc


def antecedent_strength(rule: FuzzyRule, fuzzified, and_method: str, or_method: str):
    """Combine clause degrees with the rule connector, scaled by rule weight."""
    degrees = [fuzzified[cl.variable][cl.term] for cl in rule.antecedent]
    method = and_method if rule.connector == "and" else or_method
    return _fold(degrees, method) * rule.weight


def aggregate_output(sys: FuzzySystem, activations, out_var: LinguisticVariable,
                     resolution: int = DEFAULT_RESOLUTION) -> SampledFunction:
    """MAX-accumulate the implicated consequents of every rule firing on ``out_var``."""
    lo, hi = out_var.domain
    grid = np.linspace(lo, hi, resolution)
    agg = _aggregate_grid(sys, {r: np.asarray(a, float).reshape(1) for r, a in activations.items()},
                          out_var, grid)[0]
    return SampledFunction(lo, hi, agg)


def _aggregate_grid(sys: FuzzySystem, activations: dict[str, np.ndarray],
                    out_var: LinguisticVariable, grid: np.ndarray) -> np.ndarray:
    n_rows = next(iter(activations.values())).shape[0] if activations else 1
    agg = np.zeros((n_rows, grid.shape[0]))
    implication = sys.rule_base.activation_method
    for rule in sys.rule_base.rules:
        for cl in rule.consequent:
            if cl.variable != out_var.name:
                continue
            term = out_var.term(cl.term)
            mu = membership_degree(term.mf, term.complement, grid)
            act = activations[rule.id][:, None]
            if implication == "MIN":
                clipped = np.minimum(act, mu[None, :])
            else:  # PROD
                clipped = act * mu[None, :]
            agg = np.maximum(agg, clipped)
    return agg


def defuzzify(f: SampledFunction, method: str, default: float) -> tuple[float, bool]:
    """Collapse an aggregate to a crisp value; returns (value, defaulted)."""
    value, flag = _defuzzify_rows(f.values[None, :], f.grid, method, default)
    return float(value[0]), bool(flag[0])


def _defuzzify_rows(agg: np.ndarray, grid: np.ndarray, method: str,
                    default: float) -> tuple[np.ndarray, np.ndarray]:
    if method == "COG":
        den = agg.sum(axis=1)
        num = (agg * grid[None, :]).sum(axis=1)
        flag = den == 0.0
        value = np.where(flag, default, num / np.where(flag, 1.0, den))
    elif method == "MOM":
        mx = agg.max(axis=1)
        flag = mx == 0.0
        mask = agg == mx[:, None]
        value = np.where(flag, default, (mask * grid[None, :]).sum(axis=1) / mask.sum(axis=1))
    else:
        raise ValueError(f"unsupported defuzzifier {method!r}")
    return value, flag


def _default_for(var: LinguisticVariable) -> float:
    if var.default_value is not None:
        return var.default_value
    lo, hi = var.domain
    return (lo + hi) / 2.0


def infer_batch(sys: FuzzySystem, inputs: dict[str, np.ndarray],
                resolution: int | None = None):
    """Run inference over a batch of crisp input rows.

    ``inputs`` maps each input variable name to an array of shape (n,).
    Returns (outputs, activations, defaulted) with per-variable / per-rule
    arrays of shape (n,).
    """
    for var in sys.inputs:
        if var.name not in inputs:
            raise ValueError(f"missing input variable {var.name!r}")
    fuzzified = {var.name: fuzzify(var, np.atleast_1d(np.asarray(inputs[var.name], float)))
                 for var in sys.inputs}
    rb = sys.rule_base
    activations = {rule.id: np.asarray(
        antecedent_strength(rule, fuzzified, rb.and_method, rb.or_method))
        for rule in rb.rules}
    if resolution is None:
        resolution = (DEFAULT_RESOLUTION if rb.defuzzifier == "COG"
                      else DEFAULT_MOM_RESOLUTION)
    outputs: dict[str, np.ndarray] = {}
    defaulted: dict[str, np.ndarray] = {}
    for var in sys.outputs:
        grid = np.linspace(var.domain[0], var.domain[1], resolution)
        agg = _aggregate_grid(sys, activations, var, grid)
        value, flag = _defuzzify_rows(agg, grid, rb.defuzzifier, _default_for(var))
        outputs[var.name] = value
        defaulted[var.name] = flag
    return outputs, activations, defaulted


def infer(sys: FuzzySystem, inputs: dict[str, float],
          resolution: int | None = None) -> InferenceResult:
    """Single-row Mamdani inference returning crisp outputs plus rule activations."""
    batch = {name: np.asarray([float(value)]) for name, value in inputs.items()}
    outputs, activations, defaulted = infer_batch(sys, batch, resolution)
    return InferenceResult(
        outputs={k: float(v[0]) for k, v in outputs.items()},
        rule_activations={k: float(v[0]) for k, v in activations.items()},
        defaulted={k: bool(v[0]) for k, v in defaulted.items()},
    )
