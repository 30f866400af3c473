"""Swarm state, observations, reward, and the position-update step.

The swarm lives in normalized coordinates: every position component is kept
in [0, 1] and objective values are rescaled against the running best/worst
values seen so far. Both the training loop and frozen-policy deployment are
built on top of the primitives here.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import ConfigError, EvaluationError

__all__ = [
    "Bounds",
    "SwarmState",
    "init_swarm",
    "normalized_value",
    "build_observation",
    "build_observations",
    "random_neighbors",
    "compute_reward",
    "psi",
    "step_swarm",
]

# Below this best-worst spread the value scale is considered degenerate and
# normalized values fall back to 0.5.
DEGENERATE_RANGE = 1e-12


@dataclass(frozen=True)
class Bounds:
    """Per-dimension box bounds in original (unnormalized) units."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape:
            raise ConfigError("lower and upper bounds must have the same shape")
        if not np.all(lower < upper):
            raise ConfigError("every bound must satisfy lower < upper (zero-width bounds are invalid)")

    @property
    def dims(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def normalize(self, x_raw) -> np.ndarray:
        """Map original-unit coordinates into [0, 1] component-wise."""
        return (np.asarray(x_raw, dtype=float) - self.lower) / self.width

    def denormalize(self, u) -> np.ndarray:
        """Exact inverse of :meth:`normalize` on in-range inputs."""
        return self.lower + np.asarray(u, dtype=float) * self.width


@dataclass
class SwarmState:
    """Full state of an N-agent swarm in normalized coordinates.

    ``raw_values`` and ``pbest_val`` stay in original objective units;
    ``f_best_seen``/``f_worst_seen`` track the running value range over every
    evaluation of the run and only ever widen.
    """

    positions: np.ndarray  # (N, D) in [0, 1]
    raw_values: np.ndarray  # (N,)
    pbest_pos: np.ndarray  # (N, D) in [0, 1]
    pbest_val: np.ndarray  # (N,)
    gbest_idx: int
    f_best_seen: float
    f_worst_seen: float
    iter: int = 0

    @property
    def n_agents(self) -> int:
        return self.positions.shape[0]

    @property
    def dims(self) -> int:
        return self.positions.shape[1]


def init_swarm(
    objective: Callable[[np.ndarray], float],
    bounds: Bounds,
    n_agents: int,
    rng: np.random.Generator,
    init_range: tuple[float, float] | None = None,
) -> SwarmState:
    """Place agents uniformly at random and evaluate them.

    ``init_range`` optionally seeds (worst, best) of the value scale, e.g.
    with the known analytic range of a training function; observed values
    still widen the range monotonically.
    """
    if n_agents < 2:
        raise ConfigError(f"need at least 2 agents, got {n_agents}")
    positions = rng.random((n_agents, bounds.dims))
    values = _evaluate_agents(objective, positions, bounds)
    f_worst, f_best = float(values.min()), float(values.max())
    if init_range is not None:
        f_worst = min(f_worst, float(init_range[0]))
        f_best = max(f_best, float(init_range[1]))
    return SwarmState(
        positions=positions,
        raw_values=values,
        pbest_pos=positions.copy(),
        pbest_val=values.copy(),
        gbest_idx=int(np.argmax(values)),
        f_best_seen=f_best,
        f_worst_seen=f_worst,
    )


def normalized_value(f, state: SwarmState):
    """Rescale objective value(s) to [0, 1] against the running range.

    Returns 0.5 when the observed range is degenerate (all values identical),
    which keeps first-iteration observations finite.
    """
    width = state.f_best_seen - state.f_worst_seen
    f = np.asarray(f, dtype=float)
    if width < DEGENERATE_RANGE:
        out = np.full_like(f, 0.5)
    else:
        out = (f - state.f_worst_seen) / width
    return float(out) if out.ndim == 0 else out


def build_observation(state: SwarmState, i: int, n: int, j: int) -> np.ndarray:
    """The 4-component input for agent ``i`` in dimension ``j`` given neighbor ``n``.

    Components: position offset from the agent's personal best, normalized
    value offset from the personal best, position offset from the neighbor,
    and normalized value offset from the neighbor.
    """
    if i == n:
        raise ValueError(f"neighbor must differ from the agent itself (both {i})")
    v_i = normalized_value(state.raw_values[i], state)
    return np.array(
        [
            state.positions[i, j] - state.pbest_pos[i, j],
            v_i - normalized_value(state.pbest_val[i], state),
            state.positions[i, j] - state.positions[n, j],
            v_i - normalized_value(state.raw_values[n], state),
        ]
    )


def build_observations(state: SwarmState, neighbors: np.ndarray) -> np.ndarray:
    """Vectorized :func:`build_observation` for all agents and dimensions.

    ``neighbors[i]`` is the neighbor index for agent ``i`` (shared across
    dimensions). Returns an (N, D, 4) array identical element-wise to the
    scalar builder.
    """
    neighbors = np.asarray(neighbors)
    if np.any(neighbors == np.arange(state.n_agents)):
        raise ValueError("each agent's neighbor must differ from the agent itself")
    v_cur = normalized_value(state.raw_values, state)
    v_pbest = normalized_value(state.pbest_val, state)
    obs = np.empty((state.n_agents, state.dims, 4))
    obs[:, :, 0] = state.positions - state.pbest_pos
    obs[:, :, 1] = (v_cur - v_pbest)[:, None]
    obs[:, :, 2] = state.positions - state.positions[neighbors]
    obs[:, :, 3] = (v_cur - v_cur[neighbors])[:, None]
    return obs


def random_neighbors(n_agents: int, rng: np.random.Generator) -> np.ndarray:
    """One uniform neighbor index per agent, guaranteed different from the agent."""
    n = rng.integers(0, n_agents - 1, size=n_agents)
    n[n >= np.arange(n_agents)] += 1
    return n


def compute_reward(f_cur, f_prev, kappa: float = 0.9):
    """Improvement-based reward on normalized values.

    Below the transition threshold ``kappa`` the reward is ten times the
    value change; at or above it a +10 baseline is added so agents that stay
    near the optimum keep collecting reward.
    """
    f_cur = np.asarray(f_cur, dtype=float)
    f_prev = np.asarray(f_prev, dtype=float)
    delta = f_cur - f_prev
    out = np.where(f_cur < kappa, 10.0 * delta, 10.0 * (1.0 + delta))
    return float(out) if out.ndim == 0 else out


def psi(distance):
    """Action standard deviation as a linear function of distance to the global best.

    ``distance`` is the absolute per-dimension offset in normalized
    coordinates; the 0.002 intercept keeps exploration alive at the best
    agent's own location.
    """
    return 0.002 + 0.18 * distance


def _evaluate_agents(
    objective: Callable[[np.ndarray], float],
    positions: np.ndarray,
    bounds: Bounds,
    skip: int | None = None,
    out: np.ndarray | None = None,
) -> np.ndarray:
    values = np.empty(positions.shape[0]) if out is None else out
    for i in range(positions.shape[0]):
        if i == skip:
            continue
        v = float(objective(bounds.denormalize(positions[i])))
        if not np.isfinite(v):
            raise EvaluationError(f"objective returned non-finite value {v!r} for agent {i}", agent=i)
        values[i] = v
    return values


def step_swarm(
    state: SwarmState,
    deltas: np.ndarray,
    objective: Callable[[np.ndarray], float],
    bounds: Bounds,
    frozen: int | None = None,
) -> SwarmState:
    """Apply position deltas, re-evaluate, and refresh bests.

    Positions are clamped back into [0, 1] after the move. The ``frozen``
    agent (if given) neither moves nor is re-evaluated. Returns a new state;
    the input state is left untouched.
    """
    deltas = np.asarray(deltas, dtype=float)
    if deltas.shape != state.positions.shape:
        raise ValueError(f"deltas shape {deltas.shape} != positions shape {state.positions.shape}")
    if not np.all(np.isfinite(deltas)):
        raise ValueError("deltas must be finite")

    new_pos = np.clip(state.positions + deltas, 0.0, 1.0)
    if frozen is not None:
        new_pos[frozen] = state.positions[frozen]
    new_vals = _evaluate_agents(objective, new_pos, bounds, skip=frozen, out=state.raw_values.copy())

    improved = new_vals > state.pbest_val
    pbest_pos = np.where(improved[:, None], new_pos, state.pbest_pos)
    pbest_val = np.where(improved, new_vals, state.pbest_val)

    return SwarmState(
        positions=new_pos,
        raw_values=new_vals,
        pbest_pos=pbest_pos,
        pbest_val=pbest_val,
        gbest_idx=int(np.argmax(pbest_val)),
        f_best_seen=max(state.f_best_seen, float(new_vals.max())),
        f_worst_seen=min(state.f_worst_seen, float(new_vals.min())),
        iter=state.iter + 1,
    )
