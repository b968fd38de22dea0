"""
Parameter checkpoints: layer sizes, activation names and row-major flat arrays.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from apps.common.io import dump_json, load_json
from .dense import DenseNet
from .lstm import LstmCellParams
from .serializers import NetCheckpointSerializer


def net_to_dict(net: DenseNet) -> dict:
    return {
        "sizes": list(net.sizes),
        "activations": list(net.activations),
        "output_activation": net.output_activation,
        "weights": [w.ravel().tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }


def net_from_dict(data: dict) -> DenseNet:
    sizes = [int(s) for s in data["sizes"]]
    weights = [np.asarray(w, dtype=float).reshape(a, b) for w, a, b in zip(data["weights"], sizes[:-1], sizes[1:])]
    return DenseNet(sizes, list(data["activations"]), data["output_activation"], weights, data["biases"])


def lstm_to_dict(params: LstmCellParams) -> dict:
    return {
        "input_size": params.input_size,
        "hidden_size": params.hidden_size,
        "w_x": params.w_x.ravel().tolist(),
        "w_h": params.w_h.ravel().tolist(),
        "b": params.b.tolist(),
    }


def lstm_from_dict(data: dict) -> LstmCellParams:
    n, h = int(data["input_size"]), int(data["hidden_size"])
    return LstmCellParams(
        np.asarray(data["w_x"], dtype=float).reshape(n, 4 * h),
        np.asarray(data["w_h"], dtype=float).reshape(h, 4 * h),
        np.asarray(data["b"], dtype=float),
    )


def save_net(path: str | Path, net: DenseNet) -> Path:
    return dump_json(path, {"net": net_to_dict(net)})


def load_net(path: str | Path) -> DenseNet:
    return net_from_dict(load_json(path, NetCheckpointSerializer)["net"])
