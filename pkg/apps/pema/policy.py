# apps/pema/policy.py
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from apps.common.exceptions import InvalidArgument, NumericError
from apps.nn.activations import softsign
from apps.nn.dense import DenseNet
from apps.nn.lstm import LstmCellParams, LstmState, lstm_step
from apps.sim2d.geometry import DEFAULT_STEP, N_BEAMS, Control, LidarScan


@dataclass
class PemaPolicy:
    """
    Scan -> LSTM -> softsign -> dense head -> angular velocity. The forward
    offset never changes, so the control interface matches the MI agent's.
    The recurrent state lives on the policy; call reset() before each rollout.
    """
    lstm: LstmCellParams
    head: DenseNet
    forward: float = DEFAULT_STEP
    state: LstmState = field(init=False, repr=False)

    def __post_init__(self):
        if self.lstm.input_size != N_BEAMS:
            raise InvalidArgument(f"The policy reads {N_BEAMS}-beam scans, got an LSTM of input {self.lstm.input_size}")
        if self.head.n_in != self.lstm.hidden_size or self.head.n_out != 1:
            raise InvalidArgument(
                f"Head must map {self.lstm.hidden_size} hidden units to 1 output, got {self.head.sizes}"
            )
        self.reset()

    @classmethod
    def init(cls, rng: np.random.Generator, hidden: int = 64, forward: float = DEFAULT_STEP) -> "PemaPolicy":
        lstm = LstmCellParams.init(N_BEAMS, hidden, rng)
        return cls(lstm, DenseNet.init([hidden, 1], rng), forward)

    @classmethod
    def zeros(cls, hidden: int = 64, forward: float = DEFAULT_STEP) -> "PemaPolicy":
        return cls(LstmCellParams.zeros(N_BEAMS, hidden), DenseNet([hidden, 1]), forward)

    @property
    def hidden_size(self) -> int:
        return self.lstm.hidden_size

    def reset(self) -> None:
        self.state = LstmState.zeros(self.lstm.hidden_size)

    def act(self, scan: LidarScan | np.ndarray) -> Control:
        h, self.state = lstm_step(self.lstm, getattr(scan, "readings", scan), self.state)
        dtheta = float(self.head(softsign(h))[0])
        if not np.isfinite(dtheta):
            raise NumericError("Policy produced a non-finite angular velocity")
        return Control(dtheta, self.forward)

    def __call__(self, rng: np.random.Generator, scan: LidarScan) -> Control:
        # controller signature shared with the random walk; the policy itself is deterministic
        return self.act(scan)

    # -----------------------------
    # Flat parameter vector (ARS works on this)
    # -----------------------------
    @property
    def n_params(self) -> int:
        return self.lstm.flatten().size + self.head.n_params

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.lstm.flatten(), self.head.flatten()])

    def with_params(self, vector: np.ndarray) -> "PemaPolicy":
        """A fresh policy sharing this one's shapes and forward offset."""
        vector = np.asarray(vector, dtype=float).reshape(-1)
        if vector.size != self.n_params:
            raise InvalidArgument(f"Expected {self.n_params} values, got {vector.size}")
        split = self.lstm.flatten().size
        head = self.head.copy()
        head.unflatten(vector[split:])
        return PemaPolicy(self.lstm.unflatten(vector[:split]), head, self.forward)
