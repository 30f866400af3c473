import math

import numpy as np
import pytest

from swarmrl.nets import (
    AdamState,
    Mlp,
    adam_step,
    gaussian_entropy,
    gaussian_logprob,
    init_adam,
    init_mlp,
    mlp_backward,
    mlp_backward_batch,
    mlp_forward,
)


def fd_param_grads(loss_fn, mlp, h=1e-5):
    """Central finite differences of a scalar loss over every parameter."""
    w_grads = [np.zeros_like(w) for w in mlp.weights]
    b_grads = [np.zeros_like(b) for b in mlp.biases]
    for arrs, grads in ((mlp.weights, w_grads), (mlp.biases, b_grads)):
        for arr, grad in zip(arrs, grads):
            flat, gflat = arr.ravel(), grad.ravel()
            for k in range(flat.size):
                orig = flat[k]
                flat[k] = orig + h
                up = loss_fn()
                flat[k] = orig - h
                down = loss_fn()
                flat[k] = orig
                gflat[k] = (up - down) / (2 * h)
    return w_grads, b_grads


def max_rel_err(analytic, numeric, floor=1e-4):
    worst = 0.0
    for a_list, n_list in zip(analytic, numeric):
        for a, n in zip(a_list, n_list):
            denom = np.maximum(floor, np.maximum(np.abs(a), np.abs(n)))
            worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


class TestForward:
    def test_zero_network_outputs_zero(self):
        dims = [4, 8, 8, 1]
        net = Mlp(dims, [np.zeros((dims[i + 1], dims[i])) for i in range(3)],
                  [np.zeros(dims[i + 1]) for i in range(3)], "tanh")
        assert net.forward(np.ones(4)) == 0.0

    def test_zero_input_zero_bias(self):
        rng = np.random.default_rng(0)
        net = init_mlp([4, 16, 16, 1], "tanh", rng)
        assert net.forward(np.zeros(4)) == 0.0

    def test_single_layer_closed_form(self):
        w = 0.7
        net = Mlp([1, 1], [np.array([[w]])], [np.zeros(1)], "tanh")
        for u in (-2.0, 0.3, 1.5):
            assert net.forward([u]) == pytest.approx(math.tanh(w * u), abs=1e-15)

    def test_dimension_mismatch(self):
        net = init_mlp([4, 8, 1], "tanh", np.random.default_rng(0))
        with pytest.raises(ValueError):
            net.forward(np.ones(3))

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        net = init_mlp([4, 64, 64, 1], "tanh", rng)
        x = rng.normal(size=4)
        assert net.forward(x) == net.forward(x)

    def test_actor_output_strictly_bounded(self):
        rng = np.random.default_rng(2)
        net = init_mlp([4, 64, 64, 1], "tanh", rng)
        X = rng.normal(scale=10.0, size=(500, 4))
        out = net.forward_batch(X)
        assert np.all(out > -1.0) and np.all(out < 1.0)

    def test_identity_output_unbounded_form(self):
        net = Mlp([2, 1], [np.array([[3.0, -1.0]])], [np.array([0.5])], "identity")
        assert net.forward([1.0, 2.0]) == pytest.approx(3.0 - 2.0 + 0.5, abs=1e-15)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(3)
        net = init_mlp([4, 32, 32, 1], "tanh", rng)
        X = rng.normal(size=(10, 4))
        batch = net.forward_batch(X)
        for i in range(10):
            assert batch[i] == pytest.approx(net.forward(X[i]), abs=1e-15)


class TestBackward:
    def test_zero_upstream(self):
        rng = np.random.default_rng(4)
        net = init_mlp([4, 8, 1], "tanh", rng)
        w_g, b_g = mlp_backward(net, rng.normal(size=4), 0.0)
        assert all(np.all(g == 0) for g in w_g + b_g)

    def test_linear_net_grad_is_input(self):
        net = Mlp([1, 1], [np.array([[0.3]])], [np.zeros(1)], "identity")
        w_g, _ = mlp_backward(net, np.array([2.5]), 1.0)
        assert w_g[0][0, 0] == pytest.approx(2.5, abs=1e-15)

    @pytest.mark.parametrize("out_act", ["tanh", "identity"])
    @pytest.mark.parametrize("seed", range(5))
    def test_gradcheck_against_finite_differences(self, seed, out_act):
        rng = np.random.default_rng(seed)
        net = init_mlp([4, 10, 7, 1], out_act, rng)
        x = rng.normal(size=4)
        analytic = mlp_backward(net, x, 1.0)
        numeric = fd_param_grads(lambda: net.forward(x), net)
        assert max_rel_err(analytic, numeric) < 1e-5

    def test_batch_grad_is_sum_of_singles(self):
        rng = np.random.default_rng(9)
        net = init_mlp([4, 6, 1], "tanh", rng)
        X = rng.normal(size=(3, 4))
        up = rng.normal(size=3)
        w_b, b_b = mlp_backward_batch(net, X, up)
        w_sum = [np.zeros_like(w) for w in net.weights]
        b_sum = [np.zeros_like(b) for b in net.biases]
        for i in range(3):
            w_i, b_i = mlp_backward(net, X[i], up[i])
            w_sum = [a + b for a, b in zip(w_sum, w_i)]
            b_sum = [a + b for a, b in zip(b_sum, b_i)]
        assert max_rel_err((w_b, b_b), (w_sum, b_sum)) < 1e-10


class TestGaussian:
    def test_standard_normal_at_mode(self):
        assert gaussian_logprob(0.0, 1.0, 0.0) == pytest.approx(-0.9189385332046727, abs=1e-12)

    def test_mode_value_any_sigma(self):
        for sigma in (0.1, 1.0, 3.0):
            expected = -math.log(sigma) - 0.5 * math.log(2 * math.pi)
            assert gaussian_logprob(1.7, sigma, 1.7) == pytest.approx(expected, abs=1e-12)

    def test_hand_computed_case(self):
        expected = -0.5 - math.log(0.2) - 0.5 * math.log(2 * math.pi)
        assert gaussian_logprob(0.0, 0.2, 0.2) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.19047, abs=1e-5)

    def test_sigma_must_be_positive(self):
        with pytest.raises(ValueError):
            gaussian_logprob(0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            gaussian_entropy(-1.0)

    def test_entropy_values(self):
        assert gaussian_entropy(1.0) == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-12)
        assert gaussian_entropy(0.2) == pytest.approx(-0.19044, abs=1e-5)

    def test_entropy_log_identity(self):
        for sigma in (0.05, 0.7, 4.0):
            assert gaussian_entropy(2 * sigma) - gaussian_entropy(sigma) == pytest.approx(
                math.log(2.0), abs=1e-12)

    def test_density_integrates_to_one(self):
        # quadrature oracle over a wide action grid
        mu, sigma = 0.3, 0.45
        grid = np.linspace(mu - 12 * sigma, mu + 12 * sigma, 20001)
        dens = np.exp(gaussian_logprob(mu, sigma, grid))
        assert np.trapezoid(dens, grid) == pytest.approx(1.0, abs=1e-6)


class TestAdam:
    def test_zero_grads_fresh_state(self):
        rng = np.random.default_rng(10)
        net = init_mlp([2, 3, 1], "tanh", rng)
        before = [w.copy() for w in net.weights]
        state = init_adam(net, lr=0.01)
        zeros = ([np.zeros_like(w) for w in net.weights], [np.zeros_like(b) for b in net.biases])
        adam_step(net, zeros, state)
        assert all(np.array_equal(a, b) for a, b in zip(net.weights, before))

    def test_first_step_is_signed_lr(self):
        net = Mlp([1, 1], [np.array([[1.0]])], [np.zeros(1)], "identity")
        state = init_adam(net, lr=0.05)
        grads = ([np.array([[4.0]])], [np.array([0.0])])
        adam_step(net, grads, state)
        # bias correction makes m-hat = g and v-hat = g^2 on step 1
        assert net.weights[0][0, 0] == pytest.approx(1.0 - 0.05 * 4.0 / (4.0 + 1e-8), abs=1e-12)

    def test_non_finite_grads_rejected(self):
        net = init_mlp([2, 2, 1], "tanh", np.random.default_rng(11))
        state = init_adam(net, lr=0.01)
        grads = ([np.full_like(w, np.nan) for w in net.weights],
                 [np.zeros_like(b) for b in net.biases])
        with pytest.raises(ValueError):
            adam_step(net, grads, state)
        assert state.t == 0

    def test_converges_on_quadratic_bowl(self):
        # minimize (w - 3)^2 by following its gradient
        net = Mlp([1, 1], [np.array([[-2.0]])], [np.zeros(1)], "identity")
        state = init_adam(net, lr=0.1)
        gaps = []
        for _ in range(500):
            w = net.weights[0][0, 0]
            grads = ([np.array([[2 * (w - 3.0)]])], [np.array([0.0])])
            adam_step(net, grads, state)
            gaps.append(abs(net.weights[0][0, 0] - 3.0))
        assert gaps[-1] < 1e-3
        assert gaps[-1] < gaps[0]
