from django.conf import settings

DEFAULTS = {
  'TOL_NEWTON': 1e-10,
  'MAX_NEWTON_ITERATIONS': 50,
  'MAX_RETRIES': 4,
  'TOL_NEG': 1e-12,
  'TOL_MASS': 1e-10,
  'ENTROPY_SLACK': 1e-8,
  'DESK_MAX_N': 512,
  'FULL_MAX_N': 2048,
  'DESK_LOCALIZATION_N': 256,
  'DESK_ALPHA_MAX_POWER': 5,
  'FULL_ALPHA_MAX_POWER': 7,
  'GAP_THRESHOLD': 1e-3,
  'OUTPUT_DIR': 'crossdiff-output',
}

def get_settings():
  return getattr(settings, "NONLOCAL_CROSSDIFF", {})

def get_setting(key):
  """ Look up a single library setting, falling back to the packaged default """
  return get_settings().get(key, DEFAULTS[key])
