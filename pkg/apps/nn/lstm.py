# apps/nn/lstm.py
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from apps.common.exceptions import InvalidArgument


@dataclass
class LstmState:
    h: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, hidden_size: int) -> "LstmState":
        return cls(np.zeros(hidden_size), np.zeros(hidden_size))


@dataclass
class LstmCellParams:
    """Gate blocks are stacked in the order input, forget, cell, output."""
    w_x: np.ndarray  # (n_in, 4H)
    w_h: np.ndarray  # (H, 4H)
    b: np.ndarray  # (4H,)

    def __post_init__(self):
        self.w_x = np.asarray(self.w_x, dtype=float)
        self.w_h = np.asarray(self.w_h, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        hidden = self.w_h.shape[0]
        if self.w_h.shape != (hidden, 4 * hidden) or self.w_x.shape[1:] != (4 * hidden,) or self.b.shape != (4 * hidden,):
            raise InvalidArgument(
                f"Inconsistent LSTM shapes w_x={self.w_x.shape} w_h={self.w_h.shape} b={self.b.shape}"
            )

    @property
    def hidden_size(self) -> int:
        return self.w_h.shape[0]

    @property
    def input_size(self) -> int:
        return self.w_x.shape[0]

    @classmethod
    def zeros(cls, input_size: int, hidden_size: int) -> "LstmCellParams":
        return cls(
            np.zeros((input_size, 4 * hidden_size)),
            np.zeros((hidden_size, 4 * hidden_size)),
            np.zeros(4 * hidden_size),
        )

    @classmethod
    def init(cls, input_size: int, hidden_size: int, rng: np.random.Generator) -> "LstmCellParams":
        scale = 1.0 / np.sqrt(hidden_size)
        return cls(
            rng.uniform(-scale, scale, size=(input_size, 4 * hidden_size)),
            rng.uniform(-scale, scale, size=(hidden_size, 4 * hidden_size)),
            np.zeros(4 * hidden_size),
        )

    @property
    def params(self) -> list[np.ndarray]:
        return [self.w_x, self.w_h, self.b]

    def flatten(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params])

    def unflatten(self, vector: np.ndarray) -> "LstmCellParams":
        vector = np.asarray(vector, dtype=float)
        sizes = [p.size for p in self.params]
        if vector.size != sum(sizes):
            raise InvalidArgument(f"Expected {sum(sizes)} values, got {vector.size}")
        parts = np.split(vector, np.cumsum(sizes)[:-1])
        return LstmCellParams(*(part.reshape(p.shape) for part, p in zip(parts, self.params)))


def lstm_step(params: LstmCellParams, x: np.ndarray, state: LstmState) -> tuple[np.ndarray, LstmState]:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != params.input_size:
        raise InvalidArgument(f"LSTM expects inputs of length {params.input_size}, got {x.shape[0]}")
    if state.h.shape != (params.hidden_size,) or state.c.shape != (params.hidden_size,):
        raise InvalidArgument(f"LSTM state does not match hidden size {params.hidden_size}")

    z = x @ params.w_x + state.h @ params.w_h + params.b
    i, f, g, o = np.split(z, 4)
    c = expit(f) * state.c + expit(i) * np.tanh(g)
    h = expit(o) * np.tanh(c)
    return h, LstmState(h, c)
