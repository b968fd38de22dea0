"""
Run configuration: one `[section]` per app, flat `key = value` lines.

Sections that carry several dataclasses tell them apart by key prefix
(`mi_horizon`, `planner_max_nodes`, ...). Values are coerced to the type of
the field's default; unknown sections and keys are rejected.
"""
from __future__ import annotations

import configparser
import io
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from django.conf import settings

from apps.common.exceptions import InvalidArgument
from apps.explore.config import CandidateConfig, EntropyConfig, MiConfig
from apps.genmodel.config import ModelConfig
from apps.navigate.config import PlannerConfig, PoseSearchConfig, SafetyParams
from apps.nn.config import NetConfig
from apps.pema.config import ArsConfig
from apps.sim2d.config import WorldConfig
from apps.slam.config import SlamConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunSection:
    """[run] section; an empty output_dir means LATMAP_OUTPUT_DIR."""
    world_seed: int = 0
    experiment_seed: int = 0
    output_dir: str = ""


# section -> ((RunConfig attribute, key prefix), ...)
SECTIONS: dict[str, tuple[tuple[str, str], ...]] = {
    "sim2d": (("world", ""),),
    "nn": (("net", ""),),
    "genmodel": (("model", ""),),
    "slam": (("slam", ""),),
    "explore": (("entropy", "entropy_"), ("mi", "mi_"), ("candidates", "candidate_")),
    "navigate": (("planner", "planner_"), ("safety", "safety_"), ("pose_search", "pose_")),
    "pema": (("ars", ""),),
    "run": (("run", ""),),
}


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _coerce(raw: str, default, key: str):
    kind = type(default)
    try:
        if kind is bool:
            lowered = raw.strip().lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return lowered in ("true", "1", "yes")
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        # str, or a TextChoices value that must be one of its choices
        return kind(raw.strip())
    except ValueError as exc:
        raise InvalidArgument(f"Cannot read '{raw}' for {key} as {kind.__name__}") from exc


@dataclass(frozen=True)
class RunConfig:
    world: WorldConfig = field(default_factory=WorldConfig)
    net: NetConfig = field(default_factory=NetConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    slam: SlamConfig = field(default_factory=SlamConfig)
    entropy: EntropyConfig = field(default_factory=EntropyConfig)
    mi: MiConfig = field(default_factory=MiConfig)
    candidates: CandidateConfig = field(default_factory=CandidateConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    safety: SafetyParams = field(default_factory=SafetyParams)
    pose_search: PoseSearchConfig = field(default_factory=PoseSearchConfig)
    ars: ArsConfig = field(default_factory=ArsConfig)
    run: RunSection = field(default_factory=RunSection)

    @classmethod
    def full_scale(cls) -> "RunConfig":
        return cls(mi=MiConfig.full_scale(), ars=ArsConfig.full_scale())

    @property
    def output_dir(self) -> Path:
        return Path(self.run.output_dir) if self.run.output_dir else Path(settings.LATMAP_OUTPUT_DIR)

    # -----------------------------
    # Text form
    # -----------------------------
    def dumps(self) -> str:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        for section, parts in SECTIONS.items():
            values = {}
            for attr, prefix in parts:
                part = getattr(self, attr)
                values.update({f"{prefix}{f.name}": _format(getattr(part, f.name)) for f in fields(part)})
            parser[section] = values
        out = io.StringIO()
        parser.write(out)
        return out.getvalue()

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise InvalidArgument(f"Malformed run configuration: {exc}") from exc

        base = cls()
        updates = {}
        for section in parser.sections():
            if section not in SECTIONS:
                raise InvalidArgument(f"Unknown section [{section}]. Allowed: {', '.join(SECTIONS)}")
            parts = sorted(SECTIONS[section], key=lambda part: len(part[1]), reverse=True)
            values: dict[str, dict] = {attr: {} for attr, _ in parts}
            for key, raw in parser.items(section):
                for attr, prefix in parts:
                    name = key[len(prefix):]
                    defaults = getattr(base, attr)
                    if key.startswith(prefix) and name in {f.name for f in fields(defaults)}:
                        values[attr][name] = _coerce(raw, getattr(defaults, name), f"[{section}] {key}")
                        break
                else:
                    raise InvalidArgument(f"Unknown key '{key}' in [{section}]")
            for attr, kwargs in values.items():
                if kwargs:
                    updates[attr] = replace(getattr(base, attr), **kwargs)
        return replace(base, **updates)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise InvalidArgument(f"Run configuration not found: {path}")
        logger.info(f"Loading run configuration from {path}")
        return cls.loads(path.read_text(encoding="utf-8"))

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(), encoding="utf-8")
        return path


def resolve_config(flag: str | None = None) -> RunConfig:
    """LATMAP_CONFIG wins over --config; with neither, the defaults apply."""
    path = settings.LATMAP_CONFIG or flag
    return RunConfig.load(path) if path else RunConfig()
