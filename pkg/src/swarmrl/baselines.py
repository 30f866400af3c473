"""Reference optimizers: canonical global-best PSO and classic DE (rand/1/bin).

Both maximize, share :class:`OptimizationResult`, and charge objective
evaluations identically to the policy deployment (initialization included),
so convergence curves are directly comparable on the evaluation axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .deploy import IterationRecord, OptimizationResult, _CountedObjective
from .errors import ConfigError, EvaluationError
from .swarm import Bounds

__all__ = ["PsoConfig", "DeConfig", "pso_optimize", "de_optimize"]


@dataclass
class PsoConfig:
    """Standard constriction-equivalent PSO constants."""

    n_particles: int
    max_iters: int
    seed: int
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    v_max_frac: float = 0.5  # velocity clamp as a fraction of the range

    def __post_init__(self):
        if not 0.0 <= self.inertia <= 1.0:
            raise ConfigError(f"inertia must be in [0, 1], got {self.inertia}")
        if self.cognitive < 0.0 or self.social < 0.0:
            raise ConfigError("cognitive and social weights must be >= 0")
        if self.n_particles < 2:
            raise ConfigError(f"n_particles must be >= 2, got {self.n_particles}")


@dataclass
class DeConfig:
    """rand/1/bin differential evolution defaults."""

    population: int
    max_iters: int
    seed: int
    diff_weight: float = 0.8  # F
    crossover: float = 0.9  # CR

    def __post_init__(self):
        if not 0.0 < self.diff_weight <= 2.0:
            raise ConfigError(f"diff_weight must be in (0, 2], got {self.diff_weight}")
        if not 0.0 <= self.crossover <= 1.0:
            raise ConfigError(f"crossover must be in [0, 1], got {self.crossover}")
        if self.population < 4:
            raise ConfigError(f"rand/1 mutation needs a population of >= 4, got {self.population}")


def _eval_all(counted, xs: np.ndarray) -> np.ndarray:
    vals = np.empty(xs.shape[0])
    for i, x in enumerate(xs):
        v = float(counted(x))
        if not np.isfinite(v):
            raise EvaluationError(f"objective returned non-finite value {v!r}", agent=i)
        vals[i] = v
    return vals


def pso_optimize(objective: Callable[[np.ndarray], float], bounds: Bounds,
                 cfg: PsoConfig) -> OptimizationResult:
    """Global-best particle swarm with velocity clamping and bound clipping."""
    rng = np.random.default_rng(cfg.seed)
    counted = _CountedObjective(objective)
    S, D = cfg.n_particles, bounds.dims
    span = bounds.width
    v_max = cfg.v_max_frac * span
    error: str | None = None

    x = bounds.lower + rng.random((S, D)) * span
    v = np.zeros((S, D))
    vals = _eval_all(counted, x)
    pbest, pbest_val = x.copy(), vals.copy()
    g = int(np.argmax(pbest_val))

    history = [IterationRecord(0, counted.count, float(pbest_val[g]), x.copy(), vals.copy())]
    for k in range(1, cfg.max_iters + 1):
        r_p = rng.random((S, D))
        r_g = rng.random((S, D))
        v = (cfg.inertia * v + cfg.cognitive * r_p * (pbest - x)
             + cfg.social * r_g * (pbest[g] - x))
        v = np.clip(v, -v_max, v_max)
        x = np.clip(x + v, bounds.lower, bounds.upper)
        try:
            vals = _eval_all(counted, x)
        except EvaluationError as exc:
            error = str(exc)
            break
        improved = vals > pbest_val
        pbest[improved] = x[improved]
        pbest_val[improved] = vals[improved]
        g = int(np.argmax(pbest_val))
        history.append(IterationRecord(k, counted.count, float(pbest_val[g]), x.copy(), vals.copy()))

    g = int(np.argmax(pbest_val))
    return OptimizationResult(best_x=pbest[g].copy(), best_f=float(pbest_val[g]),
                              history=history, evaluations=counted.count, error=error)


def de_optimize(objective: Callable[[np.ndarray], float], bounds: Bounds,
                cfg: DeConfig) -> OptimizationResult:
    """rand/1/bin mutation and crossover with greedy (never-worse) selection."""
    rng = np.random.default_rng(cfg.seed)
    counted = _CountedObjective(objective)
    P, D = cfg.population, bounds.dims
    error: str | None = None

    x = bounds.lower + rng.random((P, D)) * bounds.width
    vals = _eval_all(counted, x)
    history = [IterationRecord(0, counted.count, float(vals.max()), x.copy(), vals.copy())]

    for k in range(1, cfg.max_iters + 1):
        trials = np.empty_like(x)
        for i in range(P):
            others = np.delete(np.arange(P), i)
            r1, r2, r3 = rng.choice(others, size=3, replace=False)
            mutant = x[r1] + cfg.diff_weight * (x[r2] - x[r3])
            mutant = np.clip(mutant, bounds.lower, bounds.upper)
            cross = rng.random(D) < cfg.crossover
            cross[rng.integers(D)] = True  # at least one mutant gene
            trials[i] = np.where(cross, mutant, x[i])
        try:
            trial_vals = _eval_all(counted, trials)
        except EvaluationError as exc:
            error = str(exc)
            break
        accept = trial_vals >= vals
        x[accept] = trials[accept]
        vals[accept] = trial_vals[accept]
        history.append(IterationRecord(k, counted.count, float(vals.max()), x.copy(), vals.copy()))

    best = int(np.argmax(vals))
    return OptimizationResult(best_x=x[best].copy(), best_f=float(vals[best]),
                              history=history, evaluations=counted.count, error=error)
