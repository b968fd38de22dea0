"""Shared flags and the error-to-exit-code mapping for every latmap command."""
from __future__ import annotations

import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from apps.common.exceptions import InvalidArgument, LatmapError
from apps.common.rng import spawn
from apps.cli.config import RunConfig, resolve_config

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
RUNTIME_ERROR = 1


def parse_floats(text: str, count: int, flag: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise InvalidArgument(f"{flag} expects {count} comma-separated numbers, got '{text}'") from exc
    if len(values) != count:
        raise InvalidArgument(f"{flag} expects {count} comma-separated numbers, got '{text}'")
    return values


class LatmapCommand(BaseCommand):
    """
    Subclasses implement add_command_arguments() and run(). Input problems
    leave with exit code 2, runtime and numeric failures with 1.
    """
    config: RunConfig

    def add_arguments(self, parser):
        parser.add_argument("--config", default=None, help="Run configuration file (LATMAP_CONFIG overrides it)")
        parser.add_argument("--seed", type=int, default=None, help="Experiment seed (default: [run] experiment_seed)")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        try:
            self.config = resolve_config(options["config"])
            if options["seed"] is None:
                options["seed"] = self.config.run.experiment_seed
            self.run(**options)
        except (InvalidArgument, FileNotFoundError) as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc
        except LatmapError as exc:
            logger.error(f"{self.__module__.rsplit('.', 1)[-1]} failed", exc_info=True)
            raise CommandError(f"{type(exc).__name__}: {exc}", returncode=RUNTIME_ERROR) from exc

    def run(self, **options):
        raise NotImplementedError

    # -----------------------------
    # Helpers
    # -----------------------------
    def output_path(self, flag: str | None, default_name: str) -> Path:
        return Path(flag) if flag else self.config.output_dir / default_name

    def rngs(self, seed: int, n: int):
        return spawn(seed, n)

    def success(self, message: str) -> None:
        self.stdout.write(self.style.SUCCESS(message))

    def warning(self, message: str) -> None:
        self.stdout.write(self.style.WARNING(message))
