from django.apps import AppConfig


class Sim2dConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.sim2d"
    verbose_name = "2D LiDAR maze simulator"
