# Test wiring for running the suite under pytest. Mirrors the Django
# configuration in nonlocal_crossdiff/tests/runtests.py.
import os

import django
from django.conf import settings


BASE_DIR = os.path.join(os.path.abspath(os.path.dirname(__file__)),
                        'nonlocal_crossdiff', 'tests')

_runner = None
_old_config = None


def pytest_configure(config):
  global _runner, _old_config
  if settings.configured:
    return
  settings.configure(
    SECRET_KEY="django_tests_secret_key",
    DEBUG=False,
    ALLOWED_HOSTS=[],
    INSTALLED_APPS=(
      'django.contrib.contenttypes',
      'rest_framework',
      'nonlocal_crossdiff',
    ),
    DATABASES={
      'default': {
        'ENGINE': 'django.db.backends.sqlite3',
      }
    },
    LANGUAGE_CODE='en-us',
    TIME_ZONE='UTC',
    USE_TZ=True,
    REST_FRAMEWORK={
      'DEFAULT_RENDERER_CLASSES': (
        'rest_framework.renderers.JSONRenderer',
        'rest_framework_csv.renderers.CSVRenderer',
      ),
      'DEFAULT_PARSER_CLASSES': (
        'rest_framework.parsers.JSONParser',
      ),
    },
    LOGGING={
      'version': 1,
      'disable_existing_loggers': False,
      'handlers': {
        'null': {'class': 'logging.NullHandler'},
      },
      'loggers': {
        'nonlocal_crossdiff': {'handlers': ['null'], 'level': 'WARNING', 'propagate': False},
      },
    },
    NONLOCAL_CROSSDIFF={
      'TOL_NEWTON': 1e-10,
      'OUTPUT_DIR': os.path.join(BASE_DIR, 'crossdiff-test-output'),
    },
  )
  django.setup()

  from django.test.runner import DiscoverRunner
  _runner = DiscoverRunner(verbosity=0, interactive=False)
  _runner.setup_test_environment()
  _old_config = _runner.setup_databases()


def pytest_unconfigure(config):
  if _runner is not None:
    _runner.teardown_databases(_old_config)
    _runner.teardown_test_environment()
