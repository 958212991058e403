from django.apps import AppConfig


class MubConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.mub'
    verbose_name = 'Mutually complementary measurements'
