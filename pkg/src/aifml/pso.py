"""Global-best PSO tuning of membership-function parameters.

The search space is the flat vector of every MF parameter in document
order.  Candidate vectors are repaired (clamp to bounds, re-sort ordered
parameter groups, floor widths) so that every system visited during the
search is a valid FML system.

Randomness comes from numpy's PCG64 seeded through a SeedSequence: the
run seed is split into one independent stream per particle, so the result
is bit-reproducible regardless of how fitness evaluations are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .fml.model import FuzzySystem, MembershipFunction, validate

# Near-constriction coefficients with a slightly lower inertia and a tight
# velocity clamp (see PsoConfig): both favor convergence within few
# iterations, which keeps large swarms competitive when the evaluation
# budget — not the iteration count — is what's held fixed.
DEFAULT_INERTIA = 0.6
DEFAULT_COGNITIVE = 1.49618
DEFAULT_SOCIAL = 1.49618

# relative floor for gaussian widths and strict-order gaps
WIDTH_EPS = 1e-6


@dataclass(frozen=True)
class ParameterEntry:
    path: str               # e.g. "variables[0].terms[2].mf.params[1]"
    var_index: int
    term_index: int
    param_index: int
    lower: float
    upper: float


@dataclass(frozen=True)
class ParameterSpec:
    entries: tuple[ParameterEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def lower(self) -> np.ndarray:
        return np.array([e.lower for e in self.entries])

    @property
    def upper(self) -> np.ndarray:
        return np.array([e.upper for e in self.entries])


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 20
    max_evaluations: int = 2000
    inertia: float = DEFAULT_INERTIA
    cognitive: float = DEFAULT_COGNITIVE
    social: float = DEFAULT_SOCIAL
    velocity_clamp_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be at least 2")
        if self.max_evaluations < self.swarm_size:
            raise ValueError("max_evaluations must cover at least one evaluation per particle")
        if not 0.0 < self.velocity_clamp_fraction <= 1.0:
            raise ValueError("velocity_clamp_fraction must lie in (0, 1]")


@dataclass
class TrainingHistory:
    best_fitness: list[float] = field(default_factory=list)  # best-so-far, one entry per evaluation
    best_vector: np.ndarray | None = None
    evaluations: int = 0


def encode(sys: FuzzySystem) -> tuple[ParameterSpec, np.ndarray]:
    """Enumerate every tunable MF parameter in document order."""
    entries: list[ParameterEntry] = []
    values: list[float] = []
    for vi, var in enumerate(sys.variables):
        lo, hi = var.domain
        for ti, term in enumerate(var.terms):
            for pi, value in enumerate(term.mf.params):
                if term.mf.shape == "gaussian" and pi == 1:
                    lower, upper = WIDTH_EPS * (hi - lo), hi - lo
                else:
                    lower, upper = lo, hi
                entries.append(ParameterEntry(
                    f"variables[{vi}].terms[{ti}].mf.params[{pi}]", vi, ti, pi, lower, upper))
                values.append(value)
    if not entries:
        raise ValueError("system has no tunable membership-function parameters")
    return ParameterSpec(tuple(entries)), np.array(values)


def repair_vector(template: FuzzySystem, spec: ParameterSpec, v: np.ndarray) -> np.ndarray:
    """Clamp to bounds, re-sort ordered groups, and floor widths/gaps."""
    v = np.clip(np.asarray(v, float), spec.lower, spec.upper)
    out = v.copy()
    i = 0
    while i < len(spec.entries):
        e = spec.entries[i]
        term = template.variables[e.var_index].terms[e.term_index]
        shape = term.mf.shape
        n = len(term.mf.params)
        group = out[i:i + n]
        if shape in ("triangular", "trapezoidal"):
            group = np.sort(group)
        elif shape in ("left-linear", "right-linear"):
            group = np.sort(group)
            lo, hi = template.variables[e.var_index].domain
            gap = WIDTH_EPS * (hi - lo)
            if group[1] - group[0] < gap:
                if group[0] + gap <= hi:
                    group[1] = group[0] + gap
                else:
                    group[0] = hi - gap
                    group[1] = hi
        out[i:i + n] = group
        i += n
    return out


def decode(template: FuzzySystem, spec: ParameterSpec, v: np.ndarray) -> FuzzySystem:
    """Write a (repaired) parameter vector back into a copy of the template."""
    if len(v) != len(spec):
        raise ValueError(f"vector length {len(v)} != spec length {len(spec)}")
    v = repair_vector(template, spec, v)
    params_by_term: dict[tuple[int, int], dict[int, float]] = {}
    for e, value in zip(spec.entries, v):
        params_by_term.setdefault((e.var_index, e.term_index), {})[e.param_index] = float(value)
    variables = []
    for vi, var in enumerate(template.variables):
        terms = []
        for ti, term in enumerate(var.terms):
            overrides = params_by_term.get((vi, ti), {})
            params = tuple(overrides.get(pi, p) for pi, p in enumerate(term.mf.params))
            terms.append(replace(term, mf=MembershipFunction(term.mf.shape, params)))
        variables.append(replace(var, terms=tuple(terms)))
    system = replace(template, variables=tuple(variables))
    violations = validate(system)
    if violations:
        raise AssertionError(f"repair produced an invalid system: {violations[0]}")
    return system


def pso_minimize(objective: Callable[[np.ndarray], float],
                 lower: np.ndarray, upper: np.ndarray,
                 cfg: PsoConfig,
                 x0: np.ndarray | None = None,
                 repair: Callable[[np.ndarray], np.ndarray] | None = None,
                 progress: Callable[[int, float], None] | None = None) -> TrainingHistory:
    """Seeded gbest PSO over a box; the workhorse behind :func:`pso_train`.

    Particle 0 starts at ``x0`` when given, so the search can never end
    worse than the starting point.  Stops exactly at ``max_evaluations``
    objective calls.
    """
    lower = np.asarray(lower, float)
    upper = np.asarray(upper, float)
    dim = lower.shape[0]
    span = upper - lower
    vmax = cfg.velocity_clamp_fraction * span
    streams = [np.random.Generator(np.random.PCG64(child))
               for child in np.random.SeedSequence(cfg.seed).spawn(cfg.swarm_size)]

    positions = np.empty((cfg.swarm_size, dim))
    for i in range(cfg.swarm_size):
        positions[i] = streams[i].uniform(lower, upper)
    if x0 is not None:
        positions[0] = np.asarray(x0, float)
    if repair is not None:
        positions = np.array([repair(p) for p in positions])
    velocities = np.zeros((cfg.swarm_size, dim))

    history = TrainingHistory()
    pbest = positions.copy()
    pbest_fit = np.full(cfg.swarm_size, np.inf)
    gbest = positions[0].copy()
    gbest_fit = np.inf

    def evaluate(i: int) -> bool:
        nonlocal gbest, gbest_fit
        if history.evaluations >= cfg.max_evaluations:
            return False
        fit = float(objective(positions[i]))
        history.evaluations += 1
        if fit < pbest_fit[i]:
            pbest_fit[i] = fit
            pbest[i] = positions[i].copy()
        if fit < gbest_fit:
            gbest_fit = fit
            gbest = positions[i].copy()
        history.best_fitness.append(gbest_fit)
        if progress is not None:
            progress(history.evaluations, gbest_fit)
        return True

    for i in range(cfg.swarm_size):
        if not evaluate(i):
            break
    while history.evaluations < cfg.max_evaluations:
        for i in range(cfg.swarm_size):
            r1 = streams[i].uniform(size=dim)
            r2 = streams[i].uniform(size=dim)
            velocities[i] = (cfg.inertia * velocities[i]
                             + cfg.cognitive * r1 * (pbest[i] - positions[i])
                             + cfg.social * r2 * (gbest - positions[i]))
            velocities[i] = np.clip(velocities[i], -vmax, vmax)
            positions[i] = positions[i] + velocities[i]
            if repair is not None:
                positions[i] = repair(positions[i])
            else:
                positions[i] = np.clip(positions[i], lower, upper)
            if not evaluate(i):
                break

    history.best_vector = gbest.copy()
    return history


def fitness_mse(sys: FuzzySystem, data) -> float:
    """Mean over rows of the squared output error, summed across output variables."""
    from .inference import infer_batch

    if data.n_rows == 0:
        raise ValueError("dataset is empty")
    inputs = {v.name: data.column(v.name) for v in sys.inputs}
    outputs, _, _ = infer_batch(sys, inputs)
    total = np.zeros(data.n_rows)
    for var in sys.outputs:
        total = total + (outputs[var.name] - data.column(var.name)) ** 2
    return float(total.mean())


def pso_train(template: FuzzySystem, data, cfg: PsoConfig,
              progress: Callable[[int, float], None] | None = None
              ) -> tuple[FuzzySystem, TrainingHistory]:
    """Tune the template's MF parameters against ``data`` by minimizing MSE."""
    spec, x0 = encode(template)
    history = pso_minimize(
        objective=lambda v: fitness_mse(decode(template, spec, v), data),
        lower=spec.lower, upper=spec.upper, cfg=cfg,
        x0=repair_vector(template, spec, x0),
        repair=lambda v: repair_vector(template, spec, v),
        progress=progress,
    )
    return decode(template, spec, history.best_vector), history


def sensitivity_sweep(template: FuzzySystem, data,
                      particle_counts: Sequence[int],
                      eval_budgets: Sequence[int],
                      seeds: Sequence[int],
                      progress: Callable[[int, int, int, float], None] | None = None
                      ) -> list[tuple[int, int, int, float]]:
    """One pso_train per (particles, budget, seed) cell; rows of final MSE."""
    if not particle_counts or not eval_budgets or not seeds:
        raise ValueError("particle_counts, eval_budgets and seeds must be non-empty")
    rows = []
    for particles in particle_counts:
        for budget in eval_budgets:
            for seed in seeds:
                cfg = PsoConfig(swarm_size=particles, max_evaluations=budget, seed=seed)
                _, history = pso_train(template, data, cfg)
                final = history.best_fitness[-1]
                rows.append((particles, budget, seed, final))
                if progress is not None:
                    progress(particles, budget, seed, final)
    return rows


def sweep_csv(rows: Sequence[tuple[int, int, int, float]]) -> str:
    lines = ["particles,budget,seed,final_mse"]
    for particles, budget, seed, mse in rows:
        lines.append(f"{particles},{budget},{seed},{mse!r}")
    return "\n".join(lines) + "\n"
