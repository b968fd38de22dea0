from __future__ import annotations

from pathlib import Path

from apps.common.io import dump_jsonl, read_jsonl, validated
from .serializers import CycleRecordSerializer


def write_trace(path: str | Path, records: list[dict]) -> Path:
    return dump_jsonl(path, records)


def read_trace(path: str | Path) -> list[dict]:
    return [validated(CycleRecordSerializer, record, f"{path} record {i}") for i, record in enumerate(read_jsonl(path))]
