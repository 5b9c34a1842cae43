# Django settings for the OrdinalCalibration project.
#
# The project has no database, URLs or templates. Django is used for its
# settings layer, management commands, logging configuration and the
# rest_framework serializers that describe every JSON document we write.
import os

PROJECT_ROOT = os.path.join(os.path.dirname(__file__), '..')
BASE_DIR = os.path.dirname(os.path.abspath(__file__))

DEBUG = os.environ.get('DEBUG', 'False') == 'True'  # env vars are strings
SECRET_KEY = os.environ.get('SECRET_KEY', 'ordcal-not-a-web-service')

TIME_ZONE = 'UTC'
LANGUAGE_CODE = 'en-us'
USE_I18N = False
USE_TZ = True

INSTALLED_APPS = (
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'ordcal',
    'studies',
)

DATABASES = {}

# Default seed for every seeded command. The environment is consulted
# again at call time (see ordcal.utils.default_seed) so that a shell
# export always wins over the value captured here.
ORDCAL_SEED = int(os.environ.get('ORDCAL_SEED', '20210601'))

# Worker threads for study replicates and bootstrap resamples.
ORDCAL_THREADS = int(os.environ.get('ORDCAL_THREADS', os.cpu_count() or 1))


# Django Rest Framework
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': (
        'rest_framework.renderers.JSONRenderer',
    ),
    'COERCE_DECIMAL_TO_STRING': False,
}


LOG_FORMAT = '[%(asctime)s] %(levelname)s [%(name)s:%(lineno)s] %(message)s'
LOG_LEVEL = os.environ.get('ORDCAL_LOG_LEVEL', 'INFO')
LOG_FILE = os.environ.get('ORDCAL_LOG_FILE', '')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': LOG_FORMAT,
            'datefmt': '%d/%b/%Y %H:%M:%S',
        },
    },
    'handlers': {
        'null': {
            'level': 'DEBUG',
            'class': 'logging.NullHandler',
        },
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'ordcal': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'studies': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'py.warnings': {
            'handlers': ['null'],
            'propagate': False,
        },
    },
}

if LOG_FILE:
    LOGGING['handlers']['file'] = {
        'level': 'DEBUG',
        'class': 'logging.FileHandler',
        'filename': LOG_FILE,
        'formatter': 'verbose',
    }
    for name in ('ordcal', 'studies'):
        LOGGING['loggers'][name]['handlers'].append('file')
