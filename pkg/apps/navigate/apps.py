from django.apps import AppConfig


class NavigateConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.navigate"
    verbose_name = "Hybrid-A* navigation"
