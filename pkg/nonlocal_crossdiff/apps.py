from django.apps import AppConfig


class CrossDiffConfig(AppConfig):
  name = 'nonlocal_crossdiff'
  verbose_name = 'Nonlocal cross-diffusion'
