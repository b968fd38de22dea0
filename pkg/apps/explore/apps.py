from django.apps import AppConfig


class ExploreConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.explore"
    verbose_name = "Information-theoretic exploration"
