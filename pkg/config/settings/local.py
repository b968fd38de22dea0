from .base import *

DEBUG = True

# Tests and desk runs default to the repository-local runs/ directory
LATMAP_OUTPUT_DIR = Path(env("LATMAP_OUTPUT_DIR", default=str(BASE_DIR / "runs")))
