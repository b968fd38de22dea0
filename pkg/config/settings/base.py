from pathlib import Path

import environ

# ------------------------------------------------------------
# Paths & env
# ------------------------------------------------------------
BASE_DIR = Path(__file__).resolve().parent.parent.parent
# project root -> BASE_DIR

env = environ.Env()
ENV_FILE = BASE_DIR / ".env"
if ENV_FILE.exists():
    environ.Env.read_env(str(ENV_FILE))

# ------------------------------------------------------------
# Core
# ------------------------------------------------------------
SECRET_KEY = env("SECRET_KEY", default="latmap-insecure-not-served")
DEBUG = env.bool("DEBUG", default=False)
ALLOWED_HOSTS: list[str] = []

# ------------------------------------------------------------
# Applications
# ------------------------------------------------------------
DJANGO_APPS: list[str] = []

THIRD_PARTY_APPS = [
    "rest_framework",
]

LOCAL_APPS = [
    "apps.common",
    "apps.sim2d",
    "apps.nn",
    "apps.genmodel",
    "apps.slam",
    "apps.explore",
    "apps.navigate",
    "apps.pema",
    "apps.cli",  # management commands live here
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

# ------------------------------------------------------------
# Databases
# ------------------------------------------------------------
# Results are written to disk only; nothing is persisted in a database.
DATABASES: dict = {}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# ------------------------------------------------------------
# Internationalization
# ------------------------------------------------------------
LANGUAGE_CODE = "en-us"
TIME_ZONE = env("TIME_ZONE", default="UTC")
USE_I18N = False
USE_TZ = True

# ------------------------------------------------------------
# latmap run settings
# ------------------------------------------------------------
# LATMAP_CONFIG overrides the --config flag of every command.
LATMAP_CONFIG = env("LATMAP_CONFIG", default=None)
LATMAP_OUTPUT_DIR = Path(env("LATMAP_OUTPUT_DIR", default=str(BASE_DIR / "runs")))
LATMAP_WORKERS = env.int("LATMAP_WORKERS", default=1)
LATMAP_FORMAT_VERSION = 1

# ------------------------------------------------------------
# Logging
# ------------------------------------------------------------
LOG_LEVEL = env("LATMAP_LOG_LEVEL", default="INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "%(asctime)s [%(levelname)s] %(name)s %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "root": {"handlers": ["console"], "level": LOG_LEVEL},
    "loggers": {
        "django": {"handlers": ["console"], "level": "WARNING", "propagate": False},
    },
}

# ------------------------------------------------------------
# DRF (serializers only validate on-disk documents)
# ------------------------------------------------------------
REST_FRAMEWORK = {
    "UNAUTHENTICATED_USER": None,
    "COERCE_DECIMAL_TO_STRING": False,
}
