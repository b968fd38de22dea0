from __future__ import annotations

import logging
from pathlib import Path

import pandas as pd

from apps.common.exceptions import FormatError
from apps.common.io import dump_json, load_json
from apps.nn.checkpoint import lstm_from_dict, lstm_to_dict, net_from_dict, net_to_dict
from .ars import CURVE_COLUMNS
from .policy import PemaPolicy
from .serializers import PolicyCheckpointSerializer

logger = logging.getLogger(__name__)


def policy_to_dict(policy: PemaPolicy) -> dict:
    return {"lstm": lstm_to_dict(policy.lstm), "head": net_to_dict(policy.head), "forward": policy.forward}


def save_policy(path: str | Path, policy: PemaPolicy) -> Path:
    return dump_json(path, policy_to_dict(policy))


def load_policy(path: str | Path) -> PemaPolicy:
    data = load_json(path, PolicyCheckpointSerializer)
    return PemaPolicy(lstm_from_dict(data["lstm"]), net_from_dict(data["head"]), data["forward"])


def write_curve(path: str | Path, curve: pd.DataFrame) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    curve[CURVE_COLUMNS].to_csv(path, index=False)
    logger.info(f"Wrote {len(curve)} training-curve rows to {path}")
    return path


def read_curve(path: str | Path) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"File not found: {path}")
    frame = pd.read_csv(path, float_precision="round_trip")
    if list(frame.columns) != CURVE_COLUMNS:
        raise FormatError(f"{path} does not have the training-curve header {','.join(CURVE_COLUMNS)}")
    return frame
