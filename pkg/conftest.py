"""Pytest wiring: configure Django the same way manage.py does by default."""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings.local")
django.setup()
