from django.apps import AppConfig


class GenmodelConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.genmodel"
    verbose_name = "Latent-map generative model"
