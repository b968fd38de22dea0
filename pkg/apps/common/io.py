"""
JSON document helpers shared by every on-disk format.

Documents are written with sorted keys and repr-precision floats so that
write -> read -> write is byte-identical; incoming documents are validated
with a DRF serializer before use.
"""
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
from django.conf import settings

from .exceptions import FormatError

logger = logging.getLogger(__name__)


def to_builtin(value: Any) -> Any:
    """Recursively convert numpy containers/scalars into JSON-native values."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    return value


def dumps_json(payload: dict) -> str:
    document = to_builtin(payload)
    document.setdefault("format_version", settings.LATMAP_FORMAT_VERSION)
    return json.dumps(document, sort_keys=True, allow_nan=False) + "\n"


def dump_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(payload), encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def read_json(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"File not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from exc


def validated(serializer_class, data: dict, source: str = "document") -> dict:
    """Run a DRF serializer over a raw document; schema problems become FormatError."""
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        raise FormatError(f"{source} does not match {serializer_class.__name__}: {serializer.errors}")
    return serializer.validated_data


def load_json(path: str | Path, serializer_class) -> dict:
    return validated(serializer_class, read_json(path), source=str(path))


def dump_jsonl(path: str | Path, records: list[dict]) -> Path:
    """JSON lines: one sorted-key record per line, each carrying format_version."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(dumps_json(record) for record in records), encoding="utf-8")
    logger.info(f"Wrote {len(records)} records to {path}")
    return path


def read_jsonl(path: str | Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"File not found: {path}")
    records = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno} is not valid JSON: {exc}") from exc
    return records
