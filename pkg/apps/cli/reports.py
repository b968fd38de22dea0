"""
Multi-seed experiment reports: the median plus the 50% and 80% bands of a
per-step metric across runs.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

from apps.common.exceptions import FormatError, InvalidArgument
from apps.common.io import dump_json, load_json, read_json
from apps.explore.io import read_trace
from apps.navigate.io import read_navigation_report
from apps.pema.io import read_curve
from apps.slam.io import read_slam_result
from .serializers import ExperimentReportSerializer

logger = logging.getLogger(__name__)

BAND_COLUMNS = ["step", "median", "q25", "q75", "q10", "q90"]
QUANTILES = {"median": 0.5, "q25": 0.25, "q75": 0.75, "q10": 0.10, "q90": 0.90}


def _series(steps, values, name: str) -> pd.Series:
    return pd.Series(list(values), index=pd.Index(list(steps), name="step"), name=name, dtype=float)


def load_series(path: str | Path, metric: str | None = None) -> tuple[str, pd.Series]:
    """
    One metric-per-step series from a result file: SLAM results (abs_err per
    step), exploration traces (exploration_ratio or infogain per executed step),
    navigation reports (success_fraction at step 0) and training curves
    (mean_reward per iteration).
    """
    path = Path(path)
    name = path.stem
    if path.suffix == ".jsonl":
        metric = metric or "exploration_ratio"
        records = read_trace(path)
        if metric not in ("exploration_ratio", "infogain"):
            raise InvalidArgument(f"Exploration traces carry exploration_ratio and infogain, not {metric}")
        return metric, _series([r["steps_executed"] for r in records], [r[metric] for r in records], name)
    if path.suffix == ".csv":
        curve = read_curve(path)
        return "mean_reward", _series(curve["iteration"], curve["mean_reward"], name)

    raw = read_json(path)
    if "per_step" in raw:
        result = read_slam_result(path)
        return "abs_err", _series([s["t"] for s in result["per_step"]], [s["abs_err"] for s in result["per_step"]], name)
    if "success_fraction" in raw:
        report = read_navigation_report(path)
        return "success_fraction", _series([0], [report["success_fraction"]], name)
    raise FormatError(f"{path} is not a SLAM result, exploration trace, navigation report or training curve")


@dataclass
class ExperimentReport:
    metric: str
    per_seed: pd.DataFrame  # steps x runs
    bands: pd.DataFrame  # BAND_COLUMNS

    @classmethod
    def from_series(cls, metric: str, series: list[pd.Series]) -> "ExperimentReport":
        if not series:
            raise InvalidArgument("A report needs at least one result")
        table = pd.concat(series, axis=1).sort_index()
        bands = pd.DataFrame({"step": table.index.to_numpy()})
        for column, q in QUANTILES.items():
            bands[column] = table.quantile(q, axis=1).to_numpy()
        return cls(metric, table, bands[BAND_COLUMNS])

    @classmethod
    def from_files(cls, paths, metric: str | None = None) -> "ExperimentReport":
        loaded = [load_series(p, metric) for p in paths]
        metrics = {m for m, _ in loaded}
        if len(metrics) > 1:
            raise FormatError(f"Cannot mix result kinds in one report: {', '.join(sorted(metrics))}")
        report = cls.from_series(loaded[0][0] if loaded else "", [s for _, s in loaded])
        logger.info(f"Report over {len(loaded)} run(s), {len(report.bands)} step(s)")
        return report

    def to_dict(self) -> dict:
        per_seed = {
            str(run): [[int(step), float(v)] for step, v in values.dropna().items()]
            for run, values in self.per_seed.items()
        }
        payload = {"metric": self.metric, "runs": len(self.per_seed.columns), "per_seed": per_seed}
        payload.update({column: self.bands[column].tolist() for column in BAND_COLUMNS})
        return payload

    def write(self, json_path: str | Path, csv_path: str | Path) -> tuple[Path, Path]:
        json_path, csv_path = Path(json_path), Path(csv_path)
        dump_json(json_path, self.to_dict())
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        self.bands.to_csv(csv_path, index=False)
        return json_path, csv_path


def read_report(path: str | Path) -> dict:
    return load_json(path, ExperimentReportSerializer)
