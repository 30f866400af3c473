import math

import numpy as np
import pytest

from swarmrl.benchmarks import (
    BENCHMARK_NAMES,
    cosine_mixture,
    function_one,
    function_two,
    get_benchmark,
    matyas_neg,
    six_hump_camel_neg,
)
from swarmrl.errors import ConfigError, DomainError


class TestCosineMixture:
    def test_global_max_2d(self):
        assert cosine_mixture([0.0, 0.0]) == pytest.approx(0.2, abs=1e-12)

    def test_global_max_4d(self):
        assert cosine_mixture([0.0] * 4) == pytest.approx(0.4, abs=1e-12)

    def test_corner(self):
        # 0.1*(cos(5pi) + cos(5pi)) - 2 = -0.2 - 2
        assert cosine_mixture([1.0, 1.0]) == pytest.approx(-2.2, abs=1e-9)

    def test_out_of_bounds(self):
        with pytest.raises(DomainError):
            cosine_mixture([1.5, 0.0])


class TestFunctionOne:
    def test_max_2d(self):
        assert function_one([2.0, 2.0]) == pytest.approx(6.0, abs=1e-12)

    def test_max_1d(self):
        assert function_one([2.0]) == pytest.approx(3.0, abs=1e-12)

    def test_origin(self):
        expected = 2 * (math.cos(-2.0) + math.cos(-4.0) + math.cos(-8.0))
        assert function_one([0.0, 0.0]) == pytest.approx(expected, abs=1e-12)

    def test_grid_confirms_maximum(self):
        # independent oracle: dense vectorized grid over the 2-D box
        g = np.linspace(-10.0, 10.0, 801)
        x, y = np.meshgrid(g, g)
        f = (np.cos(x - 2) + np.cos(2 * x - 4) + np.cos(4 * x - 8)
             + np.cos(y - 2) + np.cos(2 * y - 4) + np.cos(4 * y - 8))
        assert f.max() <= 6.0 + 1e-9


class TestFunctionTwo:
    def test_known_max(self):
        assert function_two([-0.225, 0.0]) == pytest.approx(1.058, abs=1e-3)

    def test_origin(self):
        assert function_two([0.0, 0.0]) == pytest.approx(1.0, abs=1e-15)

    def test_far_field_vanishes(self):
        assert function_two([10.0, 10.0]) == pytest.approx(0.0, abs=1e-12)


class TestMatyas:
    def test_origin_is_max(self):
        assert matyas_neg([0.0, 0.0]) == 0.0

    def test_unit_point(self):
        assert matyas_neg([1.0, 1.0]) == pytest.approx(-0.04, abs=1e-12)

    @pytest.mark.parametrize("a", [-3.0, -0.5, 0.25, 2.0])
    def test_diagonal_identity(self, a):
        assert matyas_neg([a, a]) == pytest.approx(-0.04 * a * a, abs=1e-12)


class TestSixHumpCamel:
    @pytest.mark.parametrize("x", [(0.0898, -0.7126), (-0.0898, 0.7126)])
    def test_known_max(self, x):
        assert six_hump_camel_neg(list(x)) == pytest.approx(1.0316, abs=1e-3)

    def test_origin(self):
        assert six_hump_camel_neg([0.0, 0.0]) == 0.0


class TestRegistry:
    def test_names(self):
        assert BENCHMARK_NAMES == (
            "cosine_mixture", "function_one", "function_two", "matyas", "six_hump_camel",
        )

    def test_cosine_known_max_scales_with_dims(self):
        assert get_benchmark("cosine_mixture", 2).known_max == pytest.approx(0.2)
        assert get_benchmark("cosine_mixture", 4).known_max == pytest.approx(0.4)

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            get_benchmark("rosenbrock", 2)

    def test_fixed_dims_rejected(self):
        with pytest.raises(ConfigError):
            get_benchmark("matyas", 3)

    @pytest.mark.parametrize("name", BENCHMARK_NAMES)
    def test_argmax_matches_known_max(self, name):
        spec = get_benchmark(name)
        for x_star in spec.known_argmax:
            assert abs(spec.evaluate(x_star) - spec.known_max) <= spec.known_tol

    @pytest.mark.parametrize("name", BENCHMARK_NAMES)
    def test_no_random_point_beats_known_max(self, name):
        spec = get_benchmark(name)
        rng = np.random.default_rng(7)
        pts = spec.lower + rng.random((10_000, spec.dims)) * (spec.upper - spec.lower)
        for p in pts:
            assert spec.evaluate(p) <= spec.known_max + 1e-9

    @pytest.mark.parametrize("name", ["cosine_mixture", "function_one"])
    def test_permutation_symmetry(self, name):
        spec = get_benchmark(name, 4)
        rng = np.random.default_rng(3)
        for _ in range(50):
            x = spec.lower + rng.random(4) * (spec.upper - spec.lower)
            perm = rng.permutation(4)
            assert spec.evaluate(x) == pytest.approx(spec.evaluate(x[perm]), abs=1e-12)

    @pytest.mark.parametrize("name", BENCHMARK_NAMES)
    def test_deterministic_and_finite(self, name):
        spec = get_benchmark(name)
        rng = np.random.default_rng(11)
        for _ in range(100):
            x = spec.lower + rng.random(spec.dims) * (spec.upper - spec.lower)
            v1, v2 = spec.evaluate(x), spec.evaluate(x)
            assert np.isfinite(v1) and v1 == v2
