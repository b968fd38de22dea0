from django.apps import AppConfig


class NnConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.nn"
    verbose_name = "Dense nets, LSTM cell and Adam"
