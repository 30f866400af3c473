"""Dense network with exact backprop, Gaussian head utilities, and Adam.

Everything is plain float64 numpy. The networks are small fixed-topology
MLPs (4-64-64-1 by default) with tanh hidden layers; the actor squashes its
output through a final tanh so a predicted mean step never exceeds one unit
of normalized coordinate, while the critic ends in an identity layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Mlp",
    "init_mlp",
    "mlp_forward",
    "mlp_backward",
    "mlp_backward_batch",
    "gaussian_logprob",
    "gaussian_entropy",
    "AdamState",
    "init_adam",
    "adam_step",
]

LOG_2PI = math.log(2.0 * math.pi)


@dataclass
class Mlp:
    """Weights and biases of a dense scalar-output network.

    ``weights[l]`` has shape (dims[l+1], dims[l]); hidden activations are
    tanh, the output activation is "tanh" or "identity".
    """

    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    output_activation: str = "tanh"

    def __post_init__(self):
        if self.output_activation not in ("tanh", "identity"):
            raise ValueError(f"unknown output activation {self.output_activation!r}")
        for l, w in enumerate(self.weights):
            expect = (self.layer_dims[l + 1], self.layer_dims[l])
            if w.shape != expect or self.biases[l].shape != (expect[0],):
                raise ValueError(f"layer {l}: parameter shapes do not chain with dims {self.layer_dims}")

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def copy(self) -> "Mlp":
        return Mlp(
            layer_dims=list(self.layer_dims),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            output_activation=self.output_activation,
        )

    def forward_batch(self, X: np.ndarray) -> np.ndarray:
        """Forward pass over a (B, in) batch; returns (B,) outputs."""
        out, _ = _forward_cached(self, np.asarray(X, dtype=float))
        return out

    def forward(self, x) -> float:
        """Forward pass for a single input vector; returns a scalar."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size != self.layer_dims[0]:
            raise ValueError(f"expected input of length {self.layer_dims[0]}, got shape {x.shape}")
        return float(self.forward_batch(x[None, :])[0])


def init_mlp(
    layer_dims: list[int],
    output_activation: str,
    rng: np.random.Generator,
    output_scale: float = 1.0,
) -> Mlp:
    """Uniform fan-in initialization; the last layer is rescaled by ``output_scale``.

    A small actor ``output_scale`` makes the initial policy output near-zero
    means, so early behavior is close to a pure random walk.
    """
    weights, biases = [], []
    n = len(layer_dims) - 1
    for l in range(n):
        fan_in = layer_dims[l]
        bound = 1.0 / math.sqrt(fan_in)
        w = rng.uniform(-bound, bound, size=(layer_dims[l + 1], fan_in))
        if l == n - 1:
            w = w * output_scale
        weights.append(w)
        biases.append(np.zeros(layer_dims[l + 1]))
    return Mlp(layer_dims=list(layer_dims), weights=weights, biases=biases,
               output_activation=output_activation)


def _forward_cached(mlp: Mlp, X: np.ndarray):
    """Returns (outputs (B,), activations list incl. input and output)."""
    if X.ndim != 2 or X.shape[1] != mlp.layer_dims[0]:
        raise ValueError(f"expected batch of shape (B, {mlp.layer_dims[0]}), got {X.shape}")
    acts = [X]
    a = X
    last = mlp.n_layers - 1
    for l, (w, b) in enumerate(zip(mlp.weights, mlp.biases)):
        z = a @ w.T + b
        if l < last:
            a = np.tanh(z)
        elif mlp.output_activation == "tanh":
            a = np.tanh(z)
        else:
            a = z
        acts.append(a)
    return acts[-1][:, 0], acts


def mlp_forward(mlp: Mlp, x) -> float:
    return mlp.forward(x)


def mlp_backward_batch(mlp: Mlp, X: np.ndarray, upstream: np.ndarray):
    """Gradients of sum_b upstream[b] * output[b] w.r.t. every parameter.

    Returns (weight_grads, bias_grads) shaped like the network parameters.
    """
    X = np.asarray(X, dtype=float)
    upstream = np.asarray(upstream, dtype=float)
    out, acts = _forward_cached(mlp, X)
    if upstream.shape != out.shape:
        raise ValueError(f"upstream shape {upstream.shape} != output shape {out.shape}")

    w_grads = [None] * mlp.n_layers
    b_grads = [None] * mlp.n_layers
    last = mlp.n_layers - 1

    # delta: (B, dims[l+1]) gradient w.r.t. pre-activation of layer l
    if mlp.output_activation == "tanh":
        delta = upstream[:, None] * (1.0 - acts[-1] ** 2)
    else:
        delta = upstream[:, None].copy()
    for l in range(last, -1, -1):
        w_grads[l] = delta.T @ acts[l]
        b_grads[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ mlp.weights[l]) * (1.0 - acts[l] ** 2)
    return w_grads, b_grads


def mlp_backward(mlp: Mlp, x, upstream: float = 1.0):
    """Single-input convenience wrapper around :func:`mlp_backward_batch`."""
    x = np.asarray(x, dtype=float)
    return mlp_backward_batch(mlp, x[None, :], np.array([float(upstream)]))


def gaussian_logprob(mean, sigma, action):
    """Log density of ``action`` under Normal(mean, sigma); sigma must be positive."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0.0):
        raise ValueError("sigma must be positive")
    z = (np.asarray(action, dtype=float) - np.asarray(mean, dtype=float)) / sigma
    out = -0.5 * z * z - np.log(sigma) - 0.5 * LOG_2PI
    return float(out) if out.ndim == 0 else out


def gaussian_entropy(sigma):
    """Differential entropy of Normal(., sigma): 0.5*ln(2*pi*e*sigma^2)."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0.0):
        raise ValueError("sigma must be positive")
    out = 0.5 * (LOG_2PI + 1.0) + np.log(sigma)
    return float(out) if out.ndim == 0 else out


@dataclass
class AdamState:
    """First/second moment accumulators plus hyperparameters."""

    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0


def init_adam(mlp: Mlp, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    return AdamState(
        m_w=[np.zeros_like(w) for w in mlp.weights],
        v_w=[np.zeros_like(w) for w in mlp.weights],
        m_b=[np.zeros_like(b) for b in mlp.biases],
        v_b=[np.zeros_like(b) for b in mlp.biases],
        lr=lr, beta1=beta1, beta2=beta2, eps=eps,
    )


def adam_step(mlp: Mlp, grads, state: AdamState) -> None:
    """Bias-corrected adaptive-moment update, applied in place.

    ``grads`` is a (weight_grads, bias_grads) pair as returned by the
    backward passes. Non-finite gradients reject the whole update.
    """
    w_grads, b_grads = grads
    for g in (*w_grads, *b_grads):
        if not np.all(np.isfinite(g)):
            raise ValueError("non-finite gradient; update rejected")
    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t
    for params, gs, ms, vs in (
        (mlp.weights, w_grads, state.m_w, state.v_w),
        (mlp.biases, b_grads, state.m_b, state.v_b),
    ):
        for p, g, m, v in zip(params, gs, ms, vs):
            m *= state.beta1
            m += (1.0 - state.beta1) * g
            v *= state.beta2
            v += (1.0 - state.beta2) * g * g
            p -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
