from django.apps import AppConfig


class MetricConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.metric'
    verbose_name = 'Operational distance and fidelity'
