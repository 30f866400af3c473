"""Policy generation: episodic swarm rollouts and clipped-ratio policy updates.

An episode is a fixed number of swarm update steps on a benchmark function
from a fresh random initialization. Every (agent, dimension) pair is one
decision sample per step; all agents share the actor/critic networks and the
per-agent reward is broadcast to that agent's per-dimension samples.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields

import numpy as np

from .benchmarks import BenchmarkSpec, get_benchmark
from .errors import ConfigError, EvaluationError
from .nets import Mlp, adam_step, gaussian_entropy, gaussian_logprob, init_adam, init_mlp, mlp_backward_batch
from .swarm import (Bounds, build_observations, compute_reward, init_swarm, normalized_value,
                    psi, random_neighbors, step_swarm)

logger = logging.getLogger(__name__)

__all__ = [
    "TrainConfig",
    "Trajectory",
    "PolicyArtifact",
    "TrainEnv",
    "action_sigma",
    "collect_episode",
    "compute_gae",
    "normalize_advantages",
    "clipped_surrogate",
    "ppo_loss",
    "train",
]

OBS_DIM = 4
HIDDEN_DIMS = (64, 64)


@dataclass
class TrainConfig:
    """Hyperparameters of a policy-generation run."""

    episodes: int = 500
    steps_per_episode: int = 25
    n_agents: int = 7
    benchmark: str = "cosine_mixture"
    dims: int = 2
    clip_eps: float = 0.2
    gamma: float = 0.99
    gae_lambda: float = 0.95
    c1: float = 0.5
    c2: float = 0.01
    lr: float = 3e-4
    update_epochs: int = 4
    exploration_steps: int = 2500
    sigma_explore: float = 0.2
    kappa: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.clip_eps < 1.0:
            raise ConfigError(f"clip_eps must be in (0, 1), got {self.clip_eps}")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.steps_per_episode < 1:
            raise ConfigError(f"steps_per_episode must be >= 1, got {self.steps_per_episode}")
        if self.episodes < 0:
            raise ConfigError(f"episodes must be >= 0, got {self.episodes}")
        if self.n_agents < 2:
            raise ConfigError(f"n_agents must be >= 2, got {self.n_agents}")
        if not 0.0 < self.kappa < 1.0:
            raise ConfigError(f"kappa must be in (0, 1), got {self.kappa}")
        if self.sigma_explore <= 0.0:
            raise ConfigError(f"sigma_explore must be positive, got {self.sigma_explore}")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class Trajectory:
    """Per-step rollout records for one episode, kept in (T, N, D) layout.

    ``dones[t]`` marks the episode boundary shared by all (agent, dimension)
    streams; advantages/returns are attached after estimation.
    """

    obs: np.ndarray  # (T, N, D, 4)
    actions: np.ndarray  # (T, N, D)
    log_probs: np.ndarray  # (T, N, D)
    sigmas: np.ndarray  # (T, N, D)
    rewards: np.ndarray  # (T, N, D)
    values: np.ndarray  # (T, N, D)
    dones: np.ndarray  # (T,)
    final_best_f: float
    advantages: np.ndarray | None = None
    returns: np.ndarray | None = None

    @property
    def n_samples(self) -> int:
        return int(np.prod(self.actions.shape))

    def mean_reward(self) -> float:
        return float(self.rewards.mean())


@dataclass
class PolicyArtifact:
    """Frozen actor/critic parameters plus training metadata.

    Deployable without the training environment; ``curve`` holds per-episode
    (episode, mean_reward, best_f) rows from the run that produced it.
    """

    actor: Mlp
    critic: Mlp
    metadata: dict = field(default_factory=dict)
    curve: list = field(default_factory=list)


class TrainEnv:
    """A benchmark plus the fixed value range used to normalize training rewards.

    During policy generation the objective is not a black box, so the value
    scale is pinned to the function's analytic range (maximum from the
    registry, minimum from a dense sample) instead of the running range used
    at deployment. Also tracks the total environment-step counter that
    drives the exploration schedule.
    """

    def __init__(self, bench: BenchmarkSpec, range_samples: int = 100_000):
        self.bench = bench
        self.bounds = Bounds(bench.lower, bench.upper)
        self.value_range = analytic_value_range(bench, range_samples)
        self.total_env_steps = 0


def analytic_value_range(bench: BenchmarkSpec, n_samples: int = 100_000) -> tuple[float, float]:
    """(min, max) of the objective, sampled densely over the box.

    Uses a full grid for 1-D/2-D functions and a seeded uniform sample in
    higher dimensions; the registry's known maximum is folded in when
    present.
    """
    if bench.dims <= 2:
        per_axis = max(2, int(round(n_samples ** (1.0 / bench.dims))))
        axes = [np.linspace(bench.lower[j], bench.upper[j], per_axis) for j in range(bench.dims)]
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=1)
    else:
        rng = np.random.default_rng(0)
        points = bench.lower + rng.random((n_samples, bench.dims)) * (bench.upper - bench.lower)
    values = np.array([bench.evaluate(p) for p in points])
    f_min, f_max = float(values.min()), float(values.max())
    if bench.known_max is not None:
        f_max = max(f_max, float(bench.known_max))
    return f_min, f_max


def action_sigma(total_env_steps: int, cfg: TrainConfig, dist_to_gbest):
    """Standard deviation for action sampling under the two-phase schedule.

    A fixed wide value during the initial exploration phase, then the linear
    distance schedule once ``exploration_steps`` environment steps have
    elapsed.
    """
    if total_env_steps < cfg.exploration_steps:
        return cfg.sigma_explore if np.ndim(dist_to_gbest) == 0 else np.full(np.shape(dist_to_gbest), cfg.sigma_explore)
    return psi(np.abs(dist_to_gbest))


def collect_episode(env: TrainEnv, actor: Mlp, critic: Mlp, cfg: TrainConfig,
                    rng: np.random.Generator) -> Trajectory:
    """Run one episode and record every per-(agent, dimension) decision sample.

    Each swarm step draws a fresh neighbor per agent, queries the actor for
    per-dimension means, samples actions at the scheduled sigma, and steps
    the whole swarm; the per-agent reward is computed from its own
    normalized value change and shared across its dimension samples.
    """
    T, N, D = cfg.steps_per_episode, cfg.n_agents, env.bench.dims
    state = init_swarm(env.bench.evaluate, env.bounds, N, rng, init_range=env.value_range)

    obs = np.empty((T, N, D, OBS_DIM))
    actions = np.empty((T, N, D))
    log_probs = np.empty((T, N, D))
    sigmas = np.empty((T, N, D))
    rewards = np.empty((T, N, D))
    values = np.empty((T, N, D))
    dones = np.zeros(T)
    dones[-1] = 1.0

    for t in range(T):
        g = int(np.argmax(state.raw_values))
        neighbors = random_neighbors(N, rng)
        step_obs = build_observations(state, neighbors)
        flat = step_obs.reshape(-1, OBS_DIM)
        mu = actor.forward_batch(flat).reshape(N, D)
        sigma = action_sigma(env.total_env_steps, cfg,
                             np.abs(state.positions - state.positions[g]))
        sigma = np.broadcast_to(sigma, (N, D))
        act = mu + sigma * rng.standard_normal((N, D))

        prev_vals = state.raw_values.copy()
        state = step_swarm(state, act, env.bench.evaluate, env.bounds)
        r_agent = compute_reward(normalized_value(state.raw_values, state),
                                 normalized_value(prev_vals, state), cfg.kappa)

        obs[t] = step_obs
        actions[t] = act
        sigmas[t] = sigma
        log_probs[t] = gaussian_logprob(mu, sigma, act)
        values[t] = critic.forward_batch(flat).reshape(N, D)
        rewards[t] = r_agent[:, None]
        env.total_env_steps += 1

    return Trajectory(obs=obs, actions=actions, log_probs=log_probs, sigmas=sigmas,
                      rewards=rewards, values=values, dones=dones,
                      final_best_f=float(state.pbest_val.max()))


def compute_gae(rewards: np.ndarray, values: np.ndarray, dones: np.ndarray,
                gamma: float, lam: float):
    """Generalized advantage estimation along the leading (time) axis.

    ``dones[t] = 1`` cuts bootstrapping after step ``t`` (the value beyond a
    terminal step is zero). Returns raw (unnormalized) advantages and
    returns-to-go = advantages + values. Trailing axes are independent
    streams.
    """
    rewards = np.asarray(rewards, dtype=float)
    values = np.asarray(values, dtype=float)
    dones = np.asarray(dones, dtype=float).reshape((-1,) + (1,) * (rewards.ndim - 1))
    T = rewards.shape[0]
    advantages = np.zeros_like(rewards)
    next_adv = np.zeros_like(rewards[0])
    next_value = np.zeros_like(rewards[0])
    for t in range(T - 1, -1, -1):
        nonterminal = 1.0 - dones[t]
        delta = rewards[t] + gamma * next_value * nonterminal - values[t]
        next_adv = delta + gamma * lam * nonterminal * next_adv
        advantages[t] = next_adv
        next_value = values[t]
    return advantages, advantages + values


def normalize_advantages(advantages: np.ndarray) -> np.ndarray:
    """Shift/scale to zero mean and unit variance over the whole batch."""
    flat = np.asarray(advantages, dtype=float)
    std = flat.std()
    if std < 1e-12:
        return np.zeros_like(flat)
    return (flat - flat.mean()) / std


def clipped_surrogate(ratio, advantages, clip_eps: float):
    """Per-sample pessimistic surrogate: min(r*A, clip(r, 1-eps, 1+eps)*A)."""
    ratio = np.asarray(ratio, dtype=float)
    advantages = np.asarray(advantages, dtype=float)
    clipped = np.clip(ratio, 1.0 - clip_eps, 1.0 + clip_eps)
    out = np.minimum(ratio * advantages, clipped * advantages)
    return float(out) if out.ndim == 0 else out


@dataclass
class UpdateBatch:
    """Flattened decision samples feeding one policy/value update."""

    obs: np.ndarray  # (B, 4)
    actions: np.ndarray  # (B,)
    old_log_probs: np.ndarray  # (B,)
    sigmas: np.ndarray  # (B,)
    advantages: np.ndarray  # (B,) normalized
    returns: np.ndarray  # (B,)


def make_update_batch(traj: Trajectory, gamma: float, lam: float) -> UpdateBatch:
    """Estimate advantages for a trajectory and flatten it for updates."""
    adv, ret = compute_gae(traj.rewards, traj.values, traj.dones, gamma, lam)
    traj.advantages, traj.returns = adv, ret
    return UpdateBatch(
        obs=traj.obs.reshape(-1, OBS_DIM),
        actions=traj.actions.ravel(),
        old_log_probs=traj.log_probs.ravel(),
        sigmas=traj.sigmas.ravel(),
        advantages=normalize_advantages(adv).ravel(),
        returns=ret.ravel(),
    )


def ppo_loss(batch: UpdateBatch, actor: Mlp, critic: Mlp, cfg: TrainConfig):
    """Clipped-surrogate loss with value and entropy terms, plus its gradients.

    Returns (loss, actor_grads, critic_grads, info). The sampling sigma is
    externally scheduled, so the entropy term carries no parameter gradient;
    it is still included in the reported loss value.
    """
    B = batch.obs.shape[0]
    mu = actor.forward_batch(batch.obs)
    new_logp = gaussian_logprob(mu, batch.sigmas, batch.actions)
    ratio = np.exp(new_logp - batch.old_log_probs)
    adv = batch.advantages

    surr_plain = ratio * adv
    clipped_ratio = np.clip(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps)
    surr_clip = clipped_ratio * adv
    policy_loss = -float(np.minimum(surr_plain, surr_clip).mean())

    v = critic.forward_batch(batch.obs)
    v_err = v - batch.returns
    value_loss = float(np.mean(v_err * v_err))
    entropy = float(np.mean(gaussian_entropy(batch.sigmas)))
    loss = policy_loss + cfg.c1 * value_loss - cfg.c2 * entropy
    if not np.isfinite(loss):
        raise EvaluationError(f"non-finite loss (policy={policy_loss}, value={value_loss})")

    # d(min)/d(mu): the unclipped branch when it is the smaller one; when the
    # clipped branch is strictly smaller the ratio sits outside the clip
    # interval and its gradient is gated to zero.
    dlogp_dmu = (batch.actions - mu) / (batch.sigmas * batch.sigmas)
    use_plain = surr_plain <= surr_clip
    dsurr_dmu = np.where(use_plain, adv * ratio * dlogp_dmu, 0.0)
    actor_grads = mlp_backward_batch(actor, batch.obs, -dsurr_dmu / B)
    critic_grads = mlp_backward_batch(critic, batch.obs, cfg.c1 * 2.0 * v_err / B)

    info = {"policy_loss": policy_loss, "value_loss": value_loss, "entropy": entropy,
            "mean_ratio": float(ratio.mean())}
    return loss, actor_grads, critic_grads, info


def _params_finite(mlp: Mlp) -> bool:
    return all(np.all(np.isfinite(a)) for a in (*mlp.weights, *mlp.biases))


def train(cfg: TrainConfig) -> PolicyArtifact:
    """Full policy-generation loop.

    Runs episodes with synchronous updates (``update_epochs`` full-batch
    passes per episode) and returns the parameters that achieved the highest
    50-episode running-mean reward. On divergence the last good snapshot is
    returned with ``metadata['diverged']`` set.
    """
    rng = np.random.default_rng(cfg.seed)
    bench = get_benchmark(cfg.benchmark, cfg.dims)
    env = TrainEnv(bench)
    actor = init_mlp([OBS_DIM, *HIDDEN_DIMS, 1], "tanh", rng, output_scale=0.01)
    critic = init_mlp([OBS_DIM, *HIDDEN_DIMS, 1], "identity", rng)
    adam_actor = init_adam(actor, cfg.lr)
    adam_critic = init_adam(critic, cfg.lr)

    best_actor, best_critic = actor.copy(), critic.copy()
    best_metric = -np.inf
    recent_rewards: list[float] = []
    curve: list[tuple[int, float, float]] = []
    diverged = False

    for ep in range(cfg.episodes):
        traj = collect_episode(env, actor, critic, cfg, rng)
        batch = make_update_batch(traj, cfg.gamma, cfg.gae_lambda)
        try:
            for _ in range(cfg.update_epochs):
                _, actor_grads, critic_grads, _ = ppo_loss(batch, actor, critic, cfg)
                adam_step(actor, actor_grads, adam_actor)
                adam_step(critic, critic_grads, adam_critic)
        except (EvaluationError, ValueError) as exc:
            logger.warning("training aborted at episode %d: %s", ep, exc)
            diverged = True
            break
        if not (_params_finite(actor) and _params_finite(critic)):
            logger.warning("non-finite parameters at episode %d; keeping last good artifact", ep)
            diverged = True
            break

        mean_r = traj.mean_reward()
        recent_rewards.append(mean_r)
        if len(recent_rewards) > 50:
            recent_rewards.pop(0)
        curve.append((ep, mean_r, traj.final_best_f))
        running = float(np.mean(recent_rewards))
        if running > best_metric:
            best_metric = running
            best_actor, best_critic = actor.copy(), critic.copy()

    metadata = {
        "config": cfg.to_dict(),
        "episodes_run": len(curve),
        "best_running_mean_reward": None if not np.isfinite(best_metric) else best_metric,
        "final_mean_reward": curve[-1][1] if curve else None,
        "diverged": diverged,
    }
    return PolicyArtifact(actor=best_actor, critic=best_critic, metadata=metadata, curve=curve)
