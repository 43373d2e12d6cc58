"""
Standalone entry point: `python -m nonlocal_crossdiff <verb> ...` runs the
crossdiff management command without a Django project.
"""
import sys

import django
from django.conf import settings

LOGGING = {
  'version': 1,
  'disable_existing_loggers': False,
  'formatters': {
    'plain': {'format': '%(asctime)s %(levelname)s %(name)s: %(message)s'},
  },
  'handlers': {
    'console': {'class': 'logging.StreamHandler', 'formatter': 'plain'},
  },
  'loggers': {
    'nonlocal_crossdiff': {'handlers': ['console'], 'level': 'INFO'},
  },
}


def configure():
  if not settings.configured:
    settings.configure(
      INSTALLED_APPS=['rest_framework', 'nonlocal_crossdiff'],
      LOGGING=LOGGING,
      USE_TZ=True,
    )
  django.setup()


def main(argv=None):
  configure()
  from nonlocal_crossdiff.management.commands.crossdiff import Command

  argv = list(sys.argv[1:] if argv is None else argv)
  Command().run_from_argv(['crossdiff', 'crossdiff'] + argv)


if __name__ == '__main__':
  main()
