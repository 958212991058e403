from django.apps import AppConfig


class SamplerConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.sampler'
    verbose_name = 'Random states and finite-shot simulation'
