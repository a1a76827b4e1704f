"""Minimal dense networks with hand-written backward passes.

Everything runs in float64 with explicit gradient accumulation so that
analytic gradients can be checked against finite differences to tight
tolerances and training is bit-reproducible. No autograd framework is
involved; each module caches what its backward pass needs.

Convention: backward() consumes the gradient of a scalar LOSS with respect to
the module output and accumulates parameter gradients; optimizers descend.
"""

from __future__ import annotations

import math

import numpy as np


class Dense:
    """Affine layer y = x W + b with He-scaled normal initialization."""

    def __init__(self, rng: np.random.Generator, n_in: int, n_out: int):
        self.w = rng.standard_normal((n_in, n_out)) * math.sqrt(2.0 / n_in)
        self.b = np.zeros(n_out)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.w + self.b

    def backward(self, dy: np.ndarray) -> np.ndarray:
        self.gw += self._x.T @ dy
        self.gb += dy.sum(axis=0)
        return dy @ self.w.T

    def parameters(self):
        return [(self.w, self.gw), (self.b, self.gb)]


class MLP:
    """Stack of Dense layers, rectified-linear hidden, linear output."""

    def __init__(self, rng: np.random.Generator, dims: list[int]):
        if len(dims) < 2:
            raise ValueError("an MLP needs at least input and output dims")
        self.dims = list(dims)
        self.layers = [Dense(rng, a, b) for a, b in zip(dims, dims[1:])]
        self._masks = []

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._masks = []
        for layer in self.layers[:-1]:
            x = layer.forward(x)
            mask = x > 0
            self._masks.append(mask)
            x = x * mask
        return self.layers[-1].forward(x)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        dy = self.layers[-1].backward(dy)
        for layer, mask in zip(reversed(self.layers[:-1]), reversed(self._masks)):
            dy = dy * mask
            dy = layer.backward(dy)
        return dy

    def parameters(self):
        return [p for layer in self.layers for p in layer.parameters()]


class Adam:
    """Adaptive moment estimation over (param, grad) pairs updated in place."""

    def __init__(self, params, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p, _ in self.params]
        self.v = [np.zeros_like(p) for p, _ in self.params]

    def zero_grad(self):
        for _, g in self.params:
            g[...] = 0.0

    def step(self):
        self.t += 1
        bias1 = 1.0 - self.beta1**self.t
        bias2 = 1.0 - self.beta2**self.t
        for i, (p, g) in enumerate(self.params):
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            p -= self.lr * (self.m[i] / bias1) / (np.sqrt(self.v[i] / bias2) + self.eps)


def l2_normalize(x: np.ndarray) -> np.ndarray:
    """Row-wise unit vectors; zero rows are a hard error, not a fudge."""
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError("cannot normalize a zero vector")
    return x / norms


def l2_normalize_backward(x: np.ndarray, y: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Gradient through y = x/||x||: dx = (dy - y (y.dy)) / ||x|| per row."""
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    inner = np.sum(y * dy, axis=-1, keepdims=True)
    return (dy - y * inner) / norms


def cosine_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    num = np.sum(a * b, axis=-1)
    return num / (np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1))


def cosine_rows_backward_wrt_b(a, b, dcos):
    """Gradient of per-row cos(a, b) with respect to b only."""
    a_norm = np.linalg.norm(a, axis=-1, keepdims=True)
    b_norm = np.linalg.norm(b, axis=-1, keepdims=True)
    a_hat = a / a_norm
    b_hat = b / b_norm
    cos = np.sum(a_hat * b_hat, axis=-1, keepdims=True)
    return dcos[:, None] * (a_hat - cos * b_hat) / b_norm
