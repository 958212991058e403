from django.apps import AppConfig


class BlochConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.bloch'
    verbose_name = 'Generalized Bloch vectors'
