from django.apps import AppConfig


class PemaConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.pema"
    verbose_name = "Recurrent exploration baseline"
