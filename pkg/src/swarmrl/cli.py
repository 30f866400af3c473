"""Command-line harness: train, optimize, compare, bench.

Configs are flat key:value YAML files whose keys mirror the config
dataclass fields exactly; unknown keys are rejected so typos in long
experiments fail fast. All CSV outputs are deterministic for a given master
seed.
"""
from __future__ import annotations

import argparse
import csv
import shlex
import subprocess
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np
import yaml

from .benchmarks import BENCHMARK_NAMES, get_benchmark
from .deploy import DeployConfig, optimize
from .errors import ConfigError, EvaluationError
from .experiments import (compare_optimizers, default_checkpoints, run_policy_trials, summarize,
                          trial_seed)
from .policyio import load_policy, save_policy
from .ppo import TrainConfig, train
from .swarm import Bounds

__all__ = ["main", "load_config", "CommandObjective"]


def load_config(path, cls):
    """Instantiate a config dataclass from a flat YAML mapping.

    Every key must name a field of ``cls``; unknown keys raise
    :class:`ConfigError` naming the offending key.
    """
    data = yaml.safe_load(Path(path).read_text())
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a flat key: value mapping")
    known = {f.name for f in fields(cls)}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown config key: {key!r}")
        if isinstance(value, (dict, list)):
            raise ConfigError(f"config key {key!r} must be a scalar, got {type(value).__name__}")
    return cls(**data)


class CommandObjective:
    """External objective: one subprocess invocation per evaluation.

    The point is written to stdin as one line of space-separated decimals;
    the command must print a single scalar line to stdout.
    """

    def __init__(self, command: str):
        self.argv = shlex.split(command)

    def __call__(self, x) -> float:
        line = " ".join(format(float(v), ".17g") for v in np.asarray(x).ravel()) + "\n"
        proc = subprocess.run(self.argv, input=line, capture_output=True, text=True)
        if proc.returncode != 0:
            raise EvaluationError(
                f"objective command exited with {proc.returncode}: {proc.stderr.strip()}")
        try:
            return float(proc.stdout.strip().splitlines()[-1])
        except (ValueError, IndexError) as exc:
            raise EvaluationError(f"objective command output not a scalar: {proc.stdout!r}") from exc


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _parse_bounds_arg(text: str, dims: int) -> np.ndarray:
    vals = [float(v) for v in text.split(",")]
    if len(vals) == 1:
        vals = vals * dims
    if len(vals) != dims:
        raise ConfigError(f"expected 1 or {dims} comma-separated bounds, got {len(vals)}")
    return np.array(vals)


def cmd_train(args) -> int:
    cfg = load_config(args.config, TrainConfig) if args.config else TrainConfig()
    get_benchmark(cfg.benchmark, cfg.dims)  # fail early on unknown benchmark
    artifact = train(cfg)
    save_policy(artifact, args.out)
    curve_path = args.curve_out or str(Path(args.out).with_suffix("")) + "_curve.csv"
    _write_csv(curve_path, ["episode", "mean_reward", "best_f"], artifact.curve)
    print(f"wrote policy to {args.out} ({artifact.metadata['episodes_run']} episodes)"
          f" and training curve to {curve_path}")
    return 0


def _resolve_objective(args):
    """Returns (objective, bounds) from --benchmark or --objective-cmd flags."""
    if args.benchmark:
        bench = get_benchmark(args.benchmark, args.dims)
        return bench.evaluate, Bounds(bench.lower, bench.upper)
    if not args.objective_cmd:
        raise ConfigError("either --benchmark or --objective-cmd is required")
    if args.lower is None or args.upper is None:
        raise ConfigError("--objective-cmd requires --lower and --upper bounds")
    lower = _parse_bounds_arg(args.lower, args.dims)
    upper = _parse_bounds_arg(args.upper, args.dims)
    return CommandObjective(args.objective_cmd), Bounds(lower, upper)


def cmd_optimize(args) -> int:
    policy = load_policy(args.policy)
    objective, bounds = _resolve_objective(args)
    base = DeployConfig(n_agents=args.agents, max_iters=args.iters, seed=0, bounds=bounds,
                        freeze_best=not args.no_freeze_best)
    results = [optimize(objective, replace(base, seed=trial_seed(args.seed, t)), policy)
               for t in range(args.trials)]
    for t, res in enumerate(results):
        if res.error:
            print(f"trial {t} aborted: {res.error}", file=sys.stderr)

    checkpoints = sorted({rec.evaluations for rec in results[0].history})
    summary = summarize(results, checkpoints)
    _write_csv(args.out, ["evaluations", "mean", "std"], summary.rows())

    trials_path = args.history_out or str(Path(args.out).with_suffix("")) + "_trials.csv"
    rows = [(t, rec.iteration, rec.evaluations, rec.best_f)
            for t, res in enumerate(results) for rec in res.history]
    _write_csv(trials_path, ["trial", "iteration", "evaluations", "best_f"], rows)

    last = summary.rows()[-1]
    print(f"{args.trials} trials, {last[0]} evaluations: best_f = {last[1]:.4f}±{last[2]:.4f}")
    print(f"wrote summary to {args.out} and per-trial histories to {trials_path}")
    return 0


def cmd_compare(args) -> int:
    policy = load_policy(args.policy)
    bench = get_benchmark(args.benchmark, args.dims)
    summaries = compare_optimizers(policy, bench, budget=args.budget, n_trials=args.trials,
                                   master_seed=args.seed, n_agents=args.agents)
    rows = [(name, c, m, s)
            for name, summary in summaries.items() for c, m, s in summary.rows()]
    _write_csv(args.out, ["optimizer", "evaluations", "mean", "std"], rows)
    for name, summary in summaries.items():
        c, m, s = summary.rows()[-1]
        print(f"{name:>6} @ {c} evaluations: {m:.4f}±{s:.4f}")
    print(f"wrote comparison to {args.out}")
    return 0


def cmd_bench(args) -> int:
    print(f"{'name':<16} {'dims':<10} {'bounds':<14} known_max")
    for name in BENCHMARK_NAMES:
        spec = get_benchmark(name)
        scalable = "any D >= 1" if name in ("cosine_mixture", "function_one") else "2 only"
        bounds = f"[{spec.lower[0]:g}, {spec.upper[0]:g}]"
        known = "-" if spec.known_max is None else f"{spec.known_max:g} (D=2)"
        print(f"{name:<16} {scalable:<10} {bounds:<14} {known}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swarmrl",
                                     description="Swarm optimizer with a learned update policy")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a policy on a benchmark function")
    p_train.add_argument("--config", help="flat YAML file of training settings")
    p_train.add_argument("--out", required=True, help="output policy file (JSON)")
    p_train.add_argument("--curve-out", help="training-curve CSV (default: <out>_curve.csv)")
    p_train.set_defaults(func=cmd_train)

    p_opt = sub.add_parser("optimize", help="deploy a frozen policy on an objective")
    p_opt.add_argument("--policy", required=True)
    p_opt.add_argument("--benchmark", choices=BENCHMARK_NAMES)
    p_opt.add_argument("--objective-cmd", help="external objective command (line protocol)")
    p_opt.add_argument("--dims", type=int, default=2)
    p_opt.add_argument("--lower", help="comma-separated lower bounds for --objective-cmd")
    p_opt.add_argument("--upper", help="comma-separated upper bounds for --objective-cmd")
    p_opt.add_argument("--agents", type=int, default=10)
    p_opt.add_argument("--iters", type=int, default=100)
    p_opt.add_argument("--trials", type=int, default=25)
    p_opt.add_argument("--seed", type=int, default=0)
    p_opt.add_argument("--no-freeze-best", action="store_true")
    p_opt.add_argument("--out", required=True, help="summary CSV path")
    p_opt.add_argument("--history-out", help="per-trial history CSV (default: <out>_trials.csv)")
    p_opt.set_defaults(func=cmd_optimize)

    p_cmp = sub.add_parser("compare", help="policy vs PSO vs DE at one evaluation budget")
    p_cmp.add_argument("--policy", required=True)
    p_cmp.add_argument("--benchmark", required=True, choices=BENCHMARK_NAMES)
    p_cmp.add_argument("--dims", type=int, default=2)
    p_cmp.add_argument("--budget", type=int, default=1000)
    p_cmp.add_argument("--trials", type=int, default=25)
    p_cmp.add_argument("--agents", type=int, default=10)
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--out", required=True)
    p_cmp.set_defaults(func=cmd_compare)

    p_bench = sub.add_parser("bench", help="print the benchmark registry")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, KeyError, FileNotFoundError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
