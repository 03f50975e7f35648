"""Small fully-connected networks with hand-written backpropagation."""

from __future__ import annotations

import numpy as np

from rislink.numerics import ParameterError


class Mlp:
    """Feed-forward network, tanh on hidden layers.

    Parameters are held in ``weights[i]`` with shape ``(fan_in, fan_out)`` and
    ``biases[i]`` with shape ``(fan_out,)``; inputs are row batches.
    """

    def __init__(self, sizes, output_activation="linear", rng=None, init_scale=None):
        if len(sizes) < 2:
            raise ParameterError("an MLP needs at least input and output sizes")
        if output_activation not in ("linear", "tanh"):
            raise ParameterError(f"unknown output activation {output_activation!r}")
        self.sizes = tuple(int(s) for s in sizes)
        self.output_activation = output_activation
        rng = np.random.default_rng(0) if rng is None else rng
        self.weights = []
        self.biases = []
        for i, (fan_in, fan_out) in enumerate(zip(self.sizes[:-1], self.sizes[1:])):
            last = i == len(self.sizes) - 2
            bound = 1.0 / np.sqrt(fan_in)
            if last and init_scale is not None:
                bound = init_scale
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(rng.uniform(-bound, bound, size=fan_out))

    @property
    def params(self):
        return [*self.weights, *self.biases]

    def copy(self) -> "Mlp":
        other = Mlp.__new__(Mlp)
        other.sizes = self.sizes
        other.output_activation = self.output_activation
        other.weights = [w.copy() for w in self.weights]
        other.biases = [b.copy() for b in self.biases]
        return other

    def load(self, other: "Mlp"):
        for dst, src in zip(self.params, other.params):
            dst[...] = src

    def polyak(self, online: "Mlp", tau: float):
        """In-place ``self <- tau * online + (1 - tau) * self``."""
        for dst, src in zip(self.params, online.params):
            dst *= 1.0 - tau
            dst += tau * src

    def forward(self, x, return_cache=False):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.shape[1] != self.sizes[0]:
            raise ParameterError(f"expected input width {self.sizes[0]}, got {x.shape[1]}")
        activations = [x]
        a = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w + b
            if i < last or self.output_activation == "tanh":
                a = np.tanh(z)
            else:
                a = z
            activations.append(a)
        out = a[0] if single else a
        return (out, activations) if return_cache else out

    __call__ = forward

    def backward(self, activations, upstream):
        """Gradients of ``sum(upstream * output)``.

        Returns ``(weight_grads, bias_grads, input_grad)``.
        """
        delta = np.asarray(upstream, dtype=float)
        if delta.ndim == 1:
            delta = delta[None, :]
        n_layers = len(self.weights)
        dw = [None] * n_layers
        db = [None] * n_layers
        for i in reversed(range(n_layers)):
            out = activations[i + 1]
            if i < n_layers - 1 or self.output_activation == "tanh":
                delta = delta * (1.0 - out**2)
            dw[i] = activations[i].T @ delta
            db[i] = delta.sum(axis=0)
            delta = delta @ self.weights[i].T
        return dw, db, delta


def mlp_forward(net: Mlp, x):
    return net.forward(x)


def mlp_backward(net: Mlp, x, upstream):
    """Parameter gradients of ``<upstream, net(x)>`` as ``(weight_grads, bias_grads)``."""
    x = np.asarray(x, dtype=float)
    out, cache = net.forward(x, return_cache=True)
    upstream = np.asarray(upstream, dtype=float)
    if upstream.shape != np.shape(out):
        raise ParameterError(f"upstream shape {upstream.shape} does not match output {np.shape(out)}")
    dw, db, _ = net.backward(cache, upstream)
    return dw, db


class Adam:
    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads):
        """Descend along ``grads`` (one array per parameter, same order)."""
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
