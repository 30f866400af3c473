"""Analytic benchmark objectives with bounds and known optima.

Every function is exposed in a uniform *maximization* convention: larger
values are better. Problems that are conventionally minimized (Matyas,
six-hump camel) are negated at registration so a single convention holds
throughout the toolkit. All evaluations are pure; out-of-bounds inputs
raise :class:`DomainError` rather than extrapolating silently.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError

__all__ = [
    "BenchmarkSpec",
    "BENCHMARK_NAMES",
    "cosine_mixture",
    "function_one",
    "function_two",
    "matyas_neg",
    "six_hump_camel_neg",
    "get_benchmark",
]


@dataclass(frozen=True)
class BenchmarkSpec:
    """An objective callable bundled with its domain and optimum metadata.

    ``known_tol`` is the guaranteed agreement between ``evaluate`` at each
    entry of ``known_argmax`` and ``known_max`` (1e-9 for exact optima,
    looser where only rounded values are published).
    """

    name: str
    dims: int
    lower: np.ndarray
    upper: np.ndarray
    evaluate: Callable[[np.ndarray], float]
    known_max: float | None = None
    known_argmax: tuple[np.ndarray, ...] | None = None
    known_tol: float = 1e-9

    def __post_init__(self):
        if self.dims < 1:
            raise ConfigError(f"dims must be >= 1, got {self.dims}")
        if not np.all(self.lower < self.upper):
            raise ConfigError(f"{self.name}: lower bounds must be < upper bounds")


def _check_input(x, dims: int | None, lo: float, hi: float, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"{name} expects a 1-D vector, got shape {x.shape}")
    if dims is not None and x.size != dims:
        raise ValueError(f"{name} is defined for {dims} variables, got {x.size}")
    if np.any(x < lo) or np.any(x > hi):
        raise DomainError(f"{name}: input {x} outside bounds [{lo}, {hi}]")
    return x


def cosine_mixture(x) -> float:
    """0.1*sum(cos(5*pi*x_j)) - sum(x_j^2) on [-1, 1]^D; max 0.1*D at the origin."""
    x = _check_input(x, None, -1.0, 1.0, "cosine_mixture")
    return float(0.1 * np.sum(np.cos(5.0 * np.pi * x)) - np.sum(x * x))


def function_one(x) -> float:
    """Sum of three cosine combs on [-10, 10]^D; max 3*D at (2, ..., 2)."""
    x = _check_input(x, None, -10.0, 10.0, "function_one")
    return float(
        np.sum(np.cos(x - 2.0)) + np.sum(np.cos(2.0 * x - 4.0)) + np.sum(np.cos(4.0 * x - 8.0))
    )


def function_two(x) -> float:
    """(1 - x1/2 + x1^5 + x2^3) * exp(-x1^2 - x2^2) on [-10, 10]^2."""
    x = _check_input(x, 2, -10.0, 10.0, "function_two")
    x1, x2 = x
    return float((1.0 - x1 / 2.0 + x1**5 + x2**3) * np.exp(-x1 * x1 - x2 * x2))


def matyas_neg(x) -> float:
    """Negated Matyas function on [-10, 10]^2; max 0 at the origin."""
    x = _check_input(x, 2, -10.0, 10.0, "matyas")
    x1, x2 = x
    return float(-(0.26 * (x1 * x1 + x2 * x2) - 0.48 * x1 * x2))


def six_hump_camel_neg(x) -> float:
    """Negated six-hump camel function on [-3, 3]^2; max ~1.0316 at two points."""
    x = _check_input(x, 2, -3.0, 3.0, "six_hump_camel")
    x1, x2 = x
    return float(
        -((4.0 - 2.1 * x1 * x1 + x1**4 / 3.0) * x1 * x1 + x1 * x2 + (-4.0 + 4.0 * x2 * x2) * x2 * x2)
    )


# Six-hump camel optimum, refined to full float64 precision from the rounded
# published location (the value evaluates exactly to the registered maximum).
_CAMEL_ARGMAX = (0.08984201310031806, -0.7126564030207396)
_CAMEL_MAX = 1.0316284534898774


def _spec_cosine_mixture(dims: int) -> BenchmarkSpec:
    return BenchmarkSpec(
        name="cosine_mixture",
        dims=dims,
        lower=np.full(dims, -1.0),
        upper=np.full(dims, 1.0),
        evaluate=cosine_mixture,
        known_max=0.1 * dims,
        known_argmax=(np.zeros(dims),),
    )


def _spec_function_one(dims: int) -> BenchmarkSpec:
    return BenchmarkSpec(
        name="function_one",
        dims=dims,
        lower=np.full(dims, -10.0),
        upper=np.full(dims, 10.0),
        evaluate=function_one,
        known_max=3.0 * dims,
        known_argmax=(np.full(dims, 2.0),),
    )


def _spec_function_two(dims: int) -> BenchmarkSpec:
    # Published optimum is rounded (true maximum is ~1.05706), hence the 1e-3
    # tolerance; the rounded value still dominates every in-bounds point.
    return BenchmarkSpec(
        name="function_two",
        dims=2,
        lower=np.full(2, -10.0),
        upper=np.full(2, 10.0),
        evaluate=function_two,
        known_max=1.058,
        known_argmax=(np.array([-0.225, 0.0]),),
        known_tol=1e-3,
    )


def _spec_matyas(dims: int) -> BenchmarkSpec:
    return BenchmarkSpec(
        name="matyas",
        dims=2,
        lower=np.full(2, -10.0),
        upper=np.full(2, 10.0),
        evaluate=matyas_neg,
        known_max=0.0,
        known_argmax=(np.zeros(2),),
    )


def _spec_six_hump_camel(dims: int) -> BenchmarkSpec:
    x1, x2 = _CAMEL_ARGMAX
    return BenchmarkSpec(
        name="six_hump_camel",
        dims=2,
        lower=np.full(2, -3.0),
        upper=np.full(2, 3.0),
        evaluate=six_hump_camel_neg,
        known_max=_CAMEL_MAX,
        known_argmax=(np.array([x1, x2]), np.array([-x1, -x2])),
    )


# name -> (factory, scalable over D)
_REGISTRY: dict[str, tuple[Callable[[int], BenchmarkSpec], bool]] = {
    "cosine_mixture": (_spec_cosine_mixture, True),
    "function_one": (_spec_function_one, True),
    "function_two": (_spec_function_two, False),
    "matyas": (_spec_matyas, False),
    "six_hump_camel": (_spec_six_hump_camel, False),
}

BENCHMARK_NAMES = tuple(_REGISTRY)


def get_benchmark(name: str, dims: int = 2) -> BenchmarkSpec:
    """Look up a registered benchmark, instantiated at ``dims`` dimensions.

    Raises KeyError for unknown names and :class:`ConfigError` when ``dims``
    is not admissible for the function (only ``cosine_mixture`` and
    ``function_one`` generalize beyond 2-D).
    """
    if name not in _REGISTRY:
        raise KeyError(f"unknown benchmark {name!r}; known: {', '.join(BENCHMARK_NAMES)}")
    factory, scalable = _REGISTRY[name]
    if dims < 1:
        raise ConfigError(f"dims must be >= 1, got {dims}")
    if not scalable and dims != 2:
        raise ConfigError(f"benchmark {name!r} is defined only for 2 variables, got dims={dims}")
    return factory(dims)
