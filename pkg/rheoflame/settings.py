"""
Django settings for the rheoflame project.

rheoflame has no web surface: the project exists to host the ``expressions``
and ``wavefront`` apps, their management commands and their tests.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('RHEOFLAME_SECRET_KEY', 'rheoflame-offline-only')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'expressions',
    'wavefront',
]

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {},
    },
]

# No models, no database.
DATABASES = {}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Logging
# https://docs.djangoproject.com/en/5.2/topics/logging/

LOG_LEVEL = os.environ.get('RHEOFLAME_LOG_LEVEL', 'WARNING').upper()

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
        'expressions': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'wavefront': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}


# Wavefront engine
# Every key may be omitted; wavefront.conf supplies the defaults.

RHEOFLAME = {
    'JET_ORDER': 4,
    'JET_STEP': 1e-4,
    'ABS_TOL': 1e-10,
    'REL_TOL': 1e-8,
    'MAX_STEP_FRACTION': 0.02,
    'WORKERS': int(os.environ.get('RHEOFLAME_WORKERS', '1')),
    'TIME_LEVELS': 129,
    'TIMEFIELD_EDGE_TOLERANCE': 1e-4,
    'TIMEFIELD_GRID': 65,
    'VALIDATION_GRID': (65, 65, 33),
    'VALIDATION_WINDOW': ((-20.0, 20.0), (-20.0, 20.0)),
    'DROPLET_STRIDE': 8,
    'DROPLET_RAYS': 64,
    'SVG_RAY_STRIDE': 8,
    'FROZEN_RAY_STRIDE': 8,
    'VERIFY': {
        'DIFFERENCE_ORDER': 'spectral',
        'CLOSED_FORM': 1e-6,
        'UNIT_SPEED': 1e-7,
        'ORTHOGONALITY': 1e-4,
        'RICHARDS': 1e-3,
        'RICHARDS_ORACLE': 1e-4,
        'FROZEN': 1e-3,
    },
}
