"""
Django settings package for the latmap toolkit.

This package uses a split settings approach:
- base.py: Common settings for all environments
- local.py: Desk/development settings (verbose logging)
- production.py: Long experiment runs (quiet logging, more workers)

Settings are imported via environment variable DJANGO_SETTINGS_MODULE
which should point to the appropriate module (e.g., config.settings.production),
or selected through LATMAP_ENV by manage.py.
"""
