"""Frozen-policy deployment on arbitrary black-box objectives.

The trained actor drives per-dimension position updates for any number of
agents and dimensions. The best agent of each iteration is kept frozen (it
anchors the swarm and is not re-evaluated), and the action noise follows the
distance-to-best schedule, so movement becomes nearly deterministic close to
the incumbent optimum.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, EvaluationError
from .ppo import OBS_DIM, PolicyArtifact
from .swarm import Bounds, build_observations, init_swarm, psi, random_neighbors, step_swarm

__all__ = [
    "DeployConfig",
    "IterationRecord",
    "OptimizationResult",
    "evaluations_per_iteration",
    "optimize",
]


@dataclass
class DeployConfig:
    """Settings for one optimization run of a frozen policy."""

    n_agents: int
    max_iters: int
    seed: int
    bounds: Bounds
    freeze_best: bool = True
    # Algorithm text picks the anchor by current values; personal-best
    # selection is available as an alternative, off by default.
    gbest_from_pbest: bool = False

    def __post_init__(self):
        if self.n_agents < 2:
            raise ConfigError(f"n_agents must be >= 2, got {self.n_agents}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class IterationRecord:
    """Snapshot of the swarm after one iteration (original units)."""

    iteration: int
    evaluations: int
    best_f: float
    positions: np.ndarray  # (N, D)
    values: np.ndarray  # (N,)


@dataclass
class OptimizationResult:
    """Outcome of a run: incumbent optimum, full history, evaluation count."""

    best_x: np.ndarray
    best_f: float
    history: list[IterationRecord]
    evaluations: int
    error: str | None = None


def evaluations_per_iteration(cfg: DeployConfig) -> int:
    """Objective calls charged per post-initialization iteration."""
    return cfg.n_agents - 1 if cfg.freeze_best else cfg.n_agents


class _CountedObjective:
    """Wraps a callable to count evaluations."""

    def __init__(self, fn: Callable[[np.ndarray], float]):
        self.fn = fn
        self.count = 0

    def __call__(self, x):
        self.count += 1
        return self.fn(x)


def optimize(objective: Callable[[np.ndarray], float], cfg: DeployConfig,
             policy: PolicyArtifact) -> OptimizationResult:
    """Optimize a black-box objective with a frozen policy.

    Agents start uniformly at random; each iteration the globally best agent
    is identified and every other agent takes one per-dimension step sampled
    around the actor's mean with sigma from the distance schedule. Value
    normalization uses the running observed range, refreshed before
    observations are built. A non-finite objective value aborts the run and
    returns the partial result with ``error`` set.
    """
    if policy.actor.layer_dims[0] != OBS_DIM:
        raise ConfigError(f"policy actor expects input width {policy.actor.layer_dims[0]}, need {OBS_DIM}")
    rng = np.random.default_rng(cfg.seed)
    counted = _CountedObjective(objective)
    N = cfg.n_agents
    error: str | None = None

    state = init_swarm(counted, cfg.bounds, N, rng)
    history = [_record(state, cfg.bounds, counted.count)]

    for _ in range(cfg.max_iters):
        source = state.pbest_val if cfg.gbest_from_pbest else state.raw_values
        g = int(np.argmax(source))
        neighbors = random_neighbors(N, rng)
        obs = build_observations(state, neighbors)
        mu = policy.actor.forward_batch(obs.reshape(-1, OBS_DIM)).reshape(N, state.dims)
        sigma = psi(np.abs(state.positions - state.positions[g]))
        deltas = mu + sigma * rng.standard_normal((N, state.dims))
        frozen = g if cfg.freeze_best else None
        if frozen is not None:
            deltas[frozen] = 0.0
        try:
            state = step_swarm(state, deltas, counted, cfg.bounds, frozen=frozen)
        except EvaluationError as exc:
            error = str(exc)
            break
        history.append(_record(state, cfg.bounds, counted.count))

    best = int(np.argmax(state.pbest_val))
    return OptimizationResult(
        best_x=cfg.bounds.denormalize(state.pbest_pos[best]),
        best_f=float(state.pbest_val[best]),
        history=history,
        evaluations=counted.count,
        error=error,
    )


def _record(state, bounds: Bounds, evaluations: int) -> IterationRecord:
    return IterationRecord(
        iteration=state.iter,
        evaluations=evaluations,
        best_f=float(state.pbest_val.max()),
        positions=bounds.denormalize(state.positions),
        values=state.raw_values.copy(),
    )
