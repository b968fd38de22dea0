from django.apps import AppConfig


class SlamConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.slam"
    verbose_name = "Variational SLAM"
