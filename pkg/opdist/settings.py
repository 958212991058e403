"""
Django settings for opdist project.

Проект без веб-части: только приложения с вычислениями и management-команды.
Все численные параметры CLI задаются флагами, здесь лежат только значения по умолчанию.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = 'django-insecure-opdist-local-only-no-web-surface'

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'apps.linalg',
    'apps.bloch',
    'apps.mub',
    'apps.metric',
    'apps.sampler',
    'apps.cli',
]

# Моделей нет, база данных не нужна
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_TZ = True
TIME_ZONE = 'UTC'


# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}


# Значения по умолчанию для management-команд (переопределяются флагами)
OPDIST = {
    'VERSION': '1.0.0',
    'TOLERANCE': 1e-9,
    'TRIALS': 100,
    'SEEDS': [0],
    'SHOTS': [1000, 10000, 100000, 1000000],
    'FORMAT': 'csv',
    'OUTPUT_DIR': BASE_DIR / 'results',
}
