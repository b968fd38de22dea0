# apps/genmodel/emission.py
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from apps.common.exceptions import InvalidArgument, InvalidState
from apps.nn.config import NetConfig
from apps.nn.dense import DenseNet, Tape
from apps.sim2d.geometry import BEAM_SPACING, MAX_RANGE, N_BEAMS, LidarScan

LOG_2PI = math.log(2.0 * math.pi)


# -----------------------------
# Rotational shift
# -----------------------------

@dataclass(frozen=True)
class Shift:
    idx0: np.ndarray  # (N, 20)
    idx1: np.ndarray
    frac: np.ndarray  # (N, 1)


def _shift(headings: np.ndarray) -> Shift:
    s = np.mod(np.asarray(headings, dtype=float).reshape(-1) / BEAM_SPACING, N_BEAMS)
    j0 = np.floor(s).astype(int)
    frac = (s - j0)[:, None]
    beams = np.arange(N_BEAMS)[None, :]
    idx0 = (beams + j0[:, None]) % N_BEAMS
    return Shift(idx0, (idx0 + 1) % N_BEAMS, frac)


def shift_scans(canonical: np.ndarray, headings) -> np.ndarray:
    """
    out[k] = canonical(k + heading / beam_spacing), read circularly with linear
    interpolation between neighbouring beams. `canonical` is (N, 20) or (20,).
    """
    canonical = np.asarray(canonical, dtype=float)
    single = canonical.ndim == 1
    c = canonical.reshape(-1, N_BEAMS)
    out = _apply(c, _shift(np.broadcast_to(np.asarray(headings, dtype=float).reshape(-1), (c.shape[0],))))
    return out[0] if single else out


def _apply(c: np.ndarray, sh: Shift) -> np.ndarray:
    return (1.0 - sh.frac) * np.take_along_axis(c, sh.idx0, 1) + sh.frac * np.take_along_axis(c, sh.idx1, 1)


def _shift_backward(sh: Shift, canonical: np.ndarray, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c_grad = np.zeros_like(grad)
    np.put_along_axis(c_grad, sh.idx0, (1.0 - sh.frac) * grad, 1)
    second = np.zeros_like(grad)
    np.put_along_axis(second, sh.idx1, sh.frac * grad, 1)
    slope = np.take_along_axis(canonical, sh.idx1, 1) - np.take_along_axis(canonical, sh.idx0, 1)
    heading_grad = (slope * grad).sum(axis=1) / BEAM_SPACING
    return c_grad + second, heading_grad


# -----------------------------
# Gaussian density
# -----------------------------

def gaussian_logpdf(obs: np.ndarray, mean: np.ndarray, sigma: float) -> np.ndarray:
    """Diagonal Gaussian log density summed over the last axis."""
    if sigma <= 0:
        raise InvalidState(f"Emission standard deviation must be positive, got {sigma}")
    z = (np.asarray(obs, dtype=float) - mean) / sigma
    d = np.shape(mean)[-1]
    return -0.5 * np.sum(z * z, axis=-1) - d * math.log(sigma) - 0.5 * d * LOG_2PI


@dataclass(frozen=True)
class EmissionTape:
    net_tape: Tape
    canonical: np.ndarray
    shift: Shift


@dataclass
class EmissionModel:
    """Chart -> canonical (heading 0) scan through a softsign net and a 0.53 * sigmoid head."""
    net: DenseNet
    sigma_e: float = 0.1

    @classmethod
    def init(
        cls, depth: int, rng: np.random.Generator, net_config: NetConfig | None = None, sigma_e: float = 0.1
    ) -> "EmissionModel":
        net_config = net_config or NetConfig()
        sizes = [depth] + [net_config.hidden_width] * net_config.emission_layers + [N_BEAMS]
        return cls(DenseNet.init(sizes, rng, activations="softsign"), sigma_e)

    @property
    def depth(self) -> int:
        return self.net.n_in

    def canonical(self, charts: np.ndarray) -> np.ndarray:
        return MAX_RANGE * expit(self.net(np.asarray(charts, dtype=float)))

    def mean(self, charts: np.ndarray, headings) -> np.ndarray:
        """Predicted agent-frame scans, (N, 20) for (N, D) charts."""
        return self.mean_with_tape(charts, headings)[0]

    def mean_with_tape(self, charts: np.ndarray, headings) -> tuple[np.ndarray, EmissionTape]:
        charts = np.asarray(charts, dtype=float).reshape(-1, self.depth)
        logits, net_tape = self.net.forward(charts)
        canonical = MAX_RANGE * expit(logits)
        sh = _shift(np.broadcast_to(np.asarray(headings, dtype=float).reshape(-1), (charts.shape[0],)))
        return _apply(canonical, sh), EmissionTape(net_tape, canonical, sh)

    def backward(self, tape: EmissionTape, mean_grad: np.ndarray) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
        """Returns (chart grads (N, D), heading grads (N,), net parameter grads)."""
        mean_grad = np.asarray(mean_grad, dtype=float).reshape(tape.canonical.shape)
        c_grad, heading_grad = _shift_backward(tape.shift, tape.canonical, mean_grad)
        logit_grad = c_grad * tape.canonical * (1.0 - tape.canonical / MAX_RANGE)
        chart_grad, param_grads = self.net.backward(tape.net_tape, logit_grad)
        return chart_grad, heading_grad, param_grads

    def logpdf(self, obs: np.ndarray, charts: np.ndarray, headings, sigma: float | None = None) -> np.ndarray:
        sigma = self.sigma_e if sigma is None else sigma
        return gaussian_logpdf(obs, self.mean(charts, headings), sigma)

    def logpdf_grad(
        self, obs: np.ndarray, charts: np.ndarray, headings, sigma: float | None = None
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[np.ndarray]]:
        """(logpdf (N,), d/dchart, d/dheading, d/dparams) summed over the batch for params."""
        sigma = self.sigma_e if sigma is None else sigma
        mean, tape = self.mean_with_tape(charts, headings)
        value = gaussian_logpdf(obs, mean, sigma)
        grad = (np.asarray(obs, dtype=float) - mean) / sigma ** 2
        chart_grad, heading_grad, param_grads = self.backward(tape, grad)
        return value, chart_grad, heading_grad, param_grads


def emission_mean(model: EmissionModel, chart: np.ndarray, heading: float) -> LidarScan:
    return LidarScan(model.mean(np.asarray(chart)[None, :], [heading])[0])


def emission_logpdf(model: EmissionModel, obs: LidarScan, chart: np.ndarray, heading: float) -> float:
    readings = obs.readings if isinstance(obs, LidarScan) else np.asarray(obs, dtype=float)
    if readings.shape != (N_BEAMS,):
        raise InvalidArgument(f"An observation has {N_BEAMS} readings, got {readings.shape}")
    return float(model.logpdf(readings[None, :], np.asarray(chart)[None, :], [heading])[0])
