# apps/nn/adam.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from apps.common.exceptions import InvalidArgument, NumericError
from .config import NetConfig


@dataclass
class AdamState:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    @classmethod
    def for_params(cls, params: Sequence[np.ndarray], lr: float, config: NetConfig | None = None) -> "AdamState":
        config = config or NetConfig()
        return cls(
            lr=lr,
            beta1=config.beta1,
            beta2=config.beta2,
            eps=config.eps,
            m=[np.zeros_like(p, dtype=float) for p in params],
            v=[np.zeros_like(p, dtype=float) for p in params],
        )


def adam_step(
    params: Sequence[np.ndarray], grads: Sequence[np.ndarray], state: AdamState
) -> tuple[list[np.ndarray], AdamState]:
    """One bias-corrected Adam update. Returns new parameter arrays; `state` is advanced in place."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise InvalidArgument(f"Adam got {len(params)} params, {len(grads)} grads, {len(state.m)} moments")
    for p, g in zip(params, grads):
        if np.shape(p) != np.shape(g):
            raise InvalidArgument(f"Gradient shape {np.shape(g)} does not match parameter {np.shape(p)}")
        if not np.all(np.isfinite(g)):
            raise NumericError("Non-finite gradient passed to Adam")

    state.step += 1
    c1 = 1.0 - state.beta1 ** state.step
    c2 = 1.0 - state.beta2 ** state.step
    updated = []
    for i, (p, g) in enumerate(zip(params, grads)):
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g
        m_hat = state.m[i] / c1
        v_hat = state.v[i] / c2
        updated.append(np.asarray(p, dtype=float) - state.lr * m_hat / (np.sqrt(v_hat) + state.eps))
    return updated, state
