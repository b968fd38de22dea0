# apps/nn/dense.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from apps.common.exceptions import InvalidArgument, InvalidState, NumericError
from .activations import Activation, get_activation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tape:
    """Per-call record of a forward pass; only valid for the net version that produced it."""
    net_id: int
    version: int
    batched: bool
    inputs: tuple  # layer inputs a_0 .. a_{L-1}
    preacts: tuple  # z_1 .. z_L


class DenseNet:
    """
    Fully connected net y = f_L(... f_1(x W_1 + b_1) ...). Weights are stored
    (n_in, n_out) so a batch of row vectors goes through unchanged.
    """

    def __init__(
        self,
        sizes: Sequence[int],
        activations: str | Sequence[str] = Activation.SOFTSIGN,
        output_activation: str = Activation.IDENTITY,
        weights: Sequence[np.ndarray] | None = None,
        biases: Sequence[np.ndarray] | None = None,
    ):
        sizes = [int(s) for s in sizes]
        if len(sizes) < 2 or min(sizes) < 1:
            raise InvalidArgument(f"A net needs at least two positive layer sizes, got {sizes}")
        n_hidden = len(sizes) - 2
        if isinstance(activations, str):
            activations = [activations] * n_hidden
        if len(activations) != n_hidden:
            raise InvalidArgument(f"Expected {n_hidden} hidden activations, got {len(activations)}")

        self.sizes = sizes
        self.activations = [str(a) for a in activations]
        self.output_activation = str(output_activation)
        self._funcs = [get_activation(a) for a in [*self.activations, self.output_activation]]
        self.version = 0

        if weights is None:
            weights = [np.zeros((a, b)) for a, b in zip(sizes[:-1], sizes[1:])]
        if biases is None:
            biases = [np.zeros(b) for b in sizes[1:]]
        self.weights = [np.array(w, dtype=float) for w in weights]
        self.biases = [np.array(b, dtype=float) for b in biases]
        for w, b, (a, c) in zip(self.weights, self.biases, zip(sizes[:-1], sizes[1:])):
            if w.shape != (a, c) or b.shape != (c,):
                raise InvalidArgument(f"Layer shapes {w.shape}/{b.shape} do not match sizes {a}->{c}")

    @classmethod
    def init(
        cls,
        sizes: Sequence[int],
        rng: np.random.Generator,
        activations: str | Sequence[str] = Activation.SOFTSIGN,
        output_activation: str = Activation.IDENTITY,
        output_scale: float = 1.0,
    ) -> "DenseNet":
        """Glorot-uniform weights, zero biases; output_scale shrinks the head."""
        weights = []
        for a, b in zip(sizes[:-1], sizes[1:]):
            limit = np.sqrt(6.0 / (a + b))
            weights.append(rng.uniform(-limit, limit, size=(a, b)))
        weights[-1] = weights[-1] * output_scale
        return cls(sizes, activations, output_activation, weights=weights)

    # -----------------------------
    # Parameters
    # -----------------------------
    @property
    def n_in(self) -> int:
        return self.sizes[0]

    @property
    def n_out(self) -> int:
        return self.sizes[-1]

    @property
    def params(self) -> list[np.ndarray]:
        """[W_1, b_1, W_2, b_2, ...]; gradients use the same order."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def set_params(self, params: Sequence[np.ndarray]) -> None:
        params = list(params)
        if len(params) != 2 * len(self.weights):
            raise InvalidArgument(f"Expected {2 * len(self.weights)} parameter arrays, got {len(params)}")
        for i, p in enumerate(params):
            p = np.asarray(p, dtype=float)
            if not np.all(np.isfinite(p)):
                raise NumericError("Refusing to load non-finite parameters")
            target = self.weights[i // 2] if i % 2 == 0 else self.biases[i // 2]
            if p.shape != target.shape:
                raise InvalidArgument(f"Parameter {i} has shape {p.shape}, expected {target.shape}")
        self.weights = [np.array(p, dtype=float) for p in params[0::2]]
        self.biases = [np.array(p, dtype=float) for p in params[1::2]]
        self.version += 1

    def flatten(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params])

    def unflatten(self, vector: np.ndarray) -> None:
        vector = np.asarray(vector, dtype=float)
        if vector.size != self.n_params:
            raise InvalidArgument(f"Expected {self.n_params} values, got {vector.size}")
        params, offset = [], 0
        for p in self.params:
            params.append(vector[offset:offset + p.size].reshape(p.shape))
            offset += p.size
        self.set_params(params)

    @property
    def n_params(self) -> int:
        return int(sum(p.size for p in self.params))

    def copy(self) -> "DenseNet":
        return DenseNet(self.sizes, self.activations, self.output_activation, self.weights, self.biases)

    # -----------------------------
    # Passes
    # -----------------------------
    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, Tape]:
        x = np.asarray(x, dtype=float)
        batched = x.ndim == 2
        a = x if batched else x.reshape(1, -1)
        if a.ndim != 2 or a.shape[1] != self.n_in:
            raise InvalidArgument(f"Net expects inputs of length {self.n_in}, got shape {x.shape}")

        inputs, preacts = [], []
        for w, b, (f, _) in zip(self.weights, self.biases, self._funcs):
            inputs.append(a)
            z = a @ w + b
            preacts.append(z)
            a = f(z)
        tape = Tape(id(self), self.version, batched, tuple(inputs), tuple(preacts))
        return (a if batched else a[0]), tape

    def backward(self, tape: Tape, output_grad: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Gradients of sum(output * output_grad) w.r.t. the input and every parameter."""
        if tape.net_id != id(self) or tape.version != self.version:
            raise InvalidState("Tape was recorded on a different net or before a parameter update")
        g = np.asarray(output_grad, dtype=float)
        g = g if tape.batched else g.reshape(1, -1)
        if g.shape != tape.preacts[-1].shape:
            raise InvalidArgument(f"Output gradient shape {g.shape} does not match {tape.preacts[-1].shape}")

        grads: list[np.ndarray] = [None] * (2 * len(self.weights))
        for layer in reversed(range(len(self.weights))):
            _, df = self._funcs[layer]
            gz = g * df(tape.preacts[layer])
            grads[2 * layer] = tape.inputs[layer].T @ gz
            grads[2 * layer + 1] = gz.sum(axis=0)
            g = gz @ self.weights[layer].T
        return (g if tape.batched else g[0]), grads


def forward(net: DenseNet, x: np.ndarray) -> tuple[np.ndarray, Tape]:
    return net.forward(x)


def backward(net: DenseNet, tape: Tape, output_grad: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    return net.backward(tape, output_grad)
