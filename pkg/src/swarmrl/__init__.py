"""Swarm-based global optimization with a policy learned by reinforcement.

Train an update policy on a cheap benchmark function, freeze it, and deploy
it to maximize arbitrary expensive black-box objectives with any number of
agents and dimensions.
"""

from .baselines import DeConfig, PsoConfig, de_optimize, pso_optimize
from .benchmarks import BENCHMARK_NAMES, BenchmarkSpec, get_benchmark
from .deploy import DeployConfig, OptimizationResult, optimize
from .errors import ConfigError, DomainError, EvaluationError
from .experiments import TrialSummary, compare_optimizers, run_trials, summarize, trial_seed
from .policyio import load_policy, save_policy
from .ppo import PolicyArtifact, TrainConfig, train
from .swarm import Bounds, SwarmState

__version__ = "0.1.0"

__all__ = [
    "BENCHMARK_NAMES",
    "BenchmarkSpec",
    "Bounds",
    "ConfigError",
    "DeConfig",
    "DeployConfig",
    "DomainError",
    "EvaluationError",
    "OptimizationResult",
    "PolicyArtifact",
    "PsoConfig",
    "SwarmState",
    "TrainConfig",
    "TrialSummary",
    "compare_optimizers",
    "de_optimize",
    "get_benchmark",
    "load_policy",
    "optimize",
    "pso_optimize",
    "run_trials",
    "save_policy",
    "summarize",
    "train",
    "trial_seed",
    "__version__",
]
