"""Multi-trial experiment running and mean/std reporting on the evaluation axis.

Trials derive their seeds from a master seed with a counter-based spawn, so
every trial is independent yet the whole experiment is reproducible. All
summaries are reported against cumulative objective-evaluation counts, the
cost unit shared by every optimizer here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .baselines import DeConfig, PsoConfig, de_optimize, pso_optimize
from .benchmarks import BenchmarkSpec
from .deploy import DeployConfig, OptimizationResult, optimize
from .ppo import PolicyArtifact
from .swarm import Bounds

__all__ = [
    "TrialSummary",
    "trial_seed",
    "run_trials",
    "best_so_far_at",
    "summarize",
    "default_checkpoints",
    "run_policy_trials",
    "compare_optimizers",
]


def trial_seed(master_seed: int, trial: int) -> int:
    """Derive the seed for one trial from the master seed."""
    return int(np.random.SeedSequence(master_seed, spawn_key=(trial,)).generate_state(1)[0])


def run_trials(run_one: Callable[[int], OptimizationResult], n_trials: int,
               master_seed: int) -> list[OptimizationResult]:
    """Run ``n_trials`` independent seeded trials of ``run_one(seed)``."""
    return [run_one(trial_seed(master_seed, t)) for t in range(n_trials)]


@dataclass
class TrialSummary:
    """Best-so-far statistics over trials at fixed evaluation checkpoints."""

    checkpoints: list[int]
    means: list[float]
    stds: list[float]  # population std over trials
    n_trials: int

    def rows(self):
        return list(zip(self.checkpoints, self.means, self.stds))


def best_so_far_at(result: OptimizationResult, evaluations: int) -> float:
    """Best value after the last iteration completed within ``evaluations`` calls."""
    best = None
    for rec in result.history:
        if rec.evaluations <= evaluations:
            best = rec.best_f
        else:
            break
    if best is None:
        raise ValueError(
            f"checkpoint {evaluations} precedes the first completed evaluation block "
            f"({result.history[0].evaluations})")
    return best


def summarize(results: Sequence[OptimizationResult], checkpoints: Sequence[int]) -> TrialSummary:
    """Mean and population std of best-so-far values at each checkpoint."""
    checkpoints = [int(c) for c in checkpoints]
    for r in results:
        if r.evaluations < max(checkpoints):
            raise ValueError(
                f"trial budget {r.evaluations} is below the largest checkpoint {max(checkpoints)}")
    means, stds = [], []
    for c in checkpoints:
        bests = np.array([best_so_far_at(r, c) for r in results])
        means.append(float(bests.mean()))
        stds.append(float(bests.std()))
    return TrialSummary(checkpoints=checkpoints, means=means, stds=stds, n_trials=len(results))


def default_checkpoints(first: int, budget: int, n: int = 10) -> list[int]:
    """Evaluation checkpoints: the initialization count plus ``n`` even slices."""
    if budget < first:
        raise ValueError(f"budget {budget} smaller than initialization cost {first}")
    points = {first}
    for i in range(1, n + 1):
        points.add(max(first, round(budget * i / n)))
    return sorted(points)


def iterations_for_budget(budget: int, init_evals: int, per_iter: int) -> int:
    """Iterations needed for the cumulative evaluation count to reach ``budget``."""
    if budget < init_evals:
        raise ValueError(f"budget {budget} smaller than initialization cost {init_evals}")
    return max(1, math.ceil((budget - init_evals) / per_iter))


def run_policy_trials(policy: PolicyArtifact, objective, bounds: Bounds, n_agents: int,
                      budget: int, n_trials: int, master_seed: int,
                      freeze_best: bool = True) -> list[OptimizationResult]:
    """Deploy a frozen policy for ``n_trials`` runs sized to an evaluation budget."""
    per_iter = n_agents - 1 if freeze_best else n_agents
    iters = iterations_for_budget(budget, n_agents, per_iter)
    base = DeployConfig(n_agents=n_agents, max_iters=iters, seed=0, bounds=bounds,
                        freeze_best=freeze_best)
    return run_trials(lambda s: optimize(objective, replace(base, seed=s), policy),
                      n_trials, master_seed)


def compare_optimizers(policy: PolicyArtifact, bench: BenchmarkSpec, budget: int,
                       n_trials: int, master_seed: int, n_agents: int = 10,
                       checkpoints: Sequence[int] | None = None) -> dict[str, TrialSummary]:
    """Run the learned policy, PSO, and DE under one budget and summarize all three.

    Uses the same agent/population count, trial count, and evaluation
    accounting for each optimizer; checkpoints default to ten even slices of
    the budget.
    """
    bounds = Bounds(bench.lower, bench.upper)
    if checkpoints is None:
        checkpoints = default_checkpoints(n_agents, budget)

    policy_results = run_policy_trials(policy, bench.evaluate, bounds, n_agents,
                                       budget, n_trials, master_seed)

    pso_iters = iterations_for_budget(budget, n_agents, n_agents)
    pso_results = run_trials(
        lambda s: pso_optimize(bench.evaluate, bounds,
                               PsoConfig(n_particles=n_agents, max_iters=pso_iters, seed=s)),
        n_trials, master_seed)

    de_iters = iterations_for_budget(budget, n_agents, n_agents)
    de_results = run_trials(
        lambda s: de_optimize(bench.evaluate, bounds,
                              DeConfig(population=n_agents, max_iters=de_iters, seed=s)),
        n_trials, master_seed)

    return {
        "policy": summarize(policy_results, checkpoints),
        "pso": summarize(pso_results, checkpoints),
        "de": summarize(de_results, checkpoints),
    }
