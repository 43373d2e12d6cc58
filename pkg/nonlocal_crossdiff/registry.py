"""
Built-in test cases. Every preset is a plain run configuration, exactly as
a user would write it in a JSON config file, plus a short description.
"""
import copy
from collections import OrderedDict, namedtuple

import numpy as np

from nonlocal_crossdiff.exceptions import ValidationFailure

Preset = namedtuple('Preset', ['name', 'description', 'config'])

HALF_PI = 0.5 * np.pi


##################
# Initial data
##################
def _indicator(lo, hi, height=1.0):
  return {'type': 'indicator', 'lo': lo, 'hi': hi, 'height': height}

def _constant(value):
  return {'type': 'constant', 'value': value}

def _cosine(amplitude, phase=0.0, frequency=1):
  return {'type': 'cosine', 'amplitude': amplitude, 'frequency': frequency, 'phase': phase}

def _hat(center, half_width, height=1.0):
  return {'type': 'hat', 'center': center, 'half_width': half_width, 'height': height}


TWO_SPECIES_DATA = OrderedDict([
  ('nonsmooth', [
    [_indicator(0.25, 0.75)],
    [_indicator(0.0, 0.25), _indicator(0.75, 1.0)],
  ]),
  ('smooth', [
    [_cosine(1.0), _constant(1.0)],
    # sin(2 pi x - pi/2) = cos(2 pi x - pi)
    [_cosine(1.0, phase=-np.pi), _constant(1.0)],
  ]),
  ('continuous', [
    [_hat(0.5, 0.5)],
    [_hat(0.0, 0.5)],
  ]),
])

THREE_SPECIES_DATA = OrderedDict([
  ('nonsmooth', [
    [_indicator(3 / 6, 5 / 6)],
    [_indicator(0.0, 1 / 6), _indicator(5 / 6, 1.0)],
    [_indicator(1 / 6, 3 / 6)],
  ]),
  ('smooth', [
    [_cosine(1.0), _constant(1.0)],
    # sin(2 pi x) = cos(2 pi x - pi/2)
    [_cosine(1.0, phase=-HALF_PI), _constant(1.0)],
    # (cos + sin + 2) / 2 = cos(2 pi x - pi/4) / sqrt(2) + 1
    [_cosine(np.sqrt(0.5), phase=-0.25 * np.pi), _constant(1.0)],
  ]),
])


##################
# Kernels
##################
def _pairs(n, kernel):
  return [dict(kernel, pair=[i, j]) for i in range(1, n + 1) for j in range(i + 1, n + 1)]

TWO_SPECIES_KERNELS = OrderedDict([
  ('indicator', {'shape': 'indicator', 'radius': 0.3, 'height': 1.0}),
  ('triangle', {'shape': 'triangle', 'radius': 0.3, 'height': 2.0}),
  ('gaussian', {'shape': 'gaussian', 'width': 1e-3}),
])

LOCALIZATION_FAMILIES = ('indicator', 'triangle', 'gaussian')


##################
# Presets
##################
def _model(n, A, pi, sigma, kernel, mode):
  return {
    'n': n,
    'A': A,
    'pi': pi,
    'sigma': sigma,
    'kernels': _pairs(n, kernel),
    'mobility': 'upwind',
    'hypothesis_mode': mode,
  }

def _outputs(run_id, snapshot_times):
  return {'run_id': run_id, 'snapshot_times': snapshot_times, 'kernels': False}


def _convergence_presets():
  presets = []
  number = 13
  for kernel_name, kernel in TWO_SPECIES_KERNELS.items():
    for data_name, data in TWO_SPECIES_DATA.items():
      name = str(number)
      # only the indicator kernel keeps the discrete pair matrices positive definite
      mode = 'strict' if kernel_name == 'indicator' else 'warn'
      config = {
        'model': _model(2, [[0.1251, 0.25], [1.0, 2.0]], [4.0, 1.0], 1e-4, kernel, mode),
        'mesh': {'N': 32},
        'time': {'T': 1.0, 'dt': 1.0 / 64},
        'initial': {'profiles': data},
        'outputs': _outputs('testcase{}'.format(name), [1.0]),
        'experiment': {'kind': 'convergence', 'N_end': 2048},
      }
      description = "Two species, {} initial data, {} kernel; space-time refinement to T = 1".format(data_name, kernel_name)
      presets.append(Preset(name, description, config))
      number += 1
  return presets


def _localization_presets():
  presets = []
  number = 2
  for family in LOCALIZATION_FAMILIES:
    for data_name, data in THREE_SPECIES_DATA.items():
      name = 'NLTL{}'.format(number)
      config = {
        'model': _model(3, [[0.5, 0.2, 0.125], [0.4, 1.0, 0.2], [0.25, 0.2, 1.0]], [4.0, 2.0, 2.0], 1e-4,
                        {'shape': 'dirac'}, 'warn'),
        'mesh': {'N': 512},
        'time': {'T': 1.0, 'dt': 1e-3},
        'initial': {'profiles': data},
        'outputs': _outputs(name.lower(), [1.0]),
        'experiment': {'kind': 'localization', 'family': family, 'alpha_max_power': 7},
      }
      description = "Three species, {} initial data; {} kernels localizing to the Dirac mass".format(data_name, family)
      presets.append(Preset(name, description, config))
      number += 1
  return presets


def _segregation_presets():
  data = OrderedDict([
    ('SEG2', [[_indicator(0.1, 0.4)], [_indicator(0.6, 0.8)]]),
    ('SEG3', [[_indicator(0.5, 0.6)], [_indicator(0.8, 0.9)], [_indicator(0.1, 0.2)]]),
  ])
  presets = []
  for name, profiles in data.items():
    n = len(profiles)
    config = {
      'model': _model(n, np.ones((n, n)).tolist(), [1.0] * n, 0.0,
                      {'shape': 'indicator', 'radius': 0.1, 'height': 100.0}, 'warn'),
      'mesh': {'N': 512},
      'time': {'T': 0.2, 'dt': 1e-4},
      'initial': {'profiles': profiles},
      'outputs': _outputs(name.lower(), [0.02, 0.2]),
      'experiment': {'kind': 'segregation'},
    }
    description = "{} species with disjoint supports, no diffusion; local vs nonlocal segregation".format(n)
    presets.append(Preset(name, description, config))
  return presets


PRESETS = OrderedDict((p.name, p) for p in _convergence_presets() + _localization_presets() + _segregation_presets())


def get_preset(name):
  try:
    preset = PRESETS[str(name)]
  except KeyError:
    raise ValidationFailure("Unknown test case '{}'. Known: {}.".format(name, ", ".join(PRESETS)))
  return Preset(preset.name, preset.description, copy.deepcopy(preset.config))


def list_presets():
  return [(p.name, p.description) for p in PRESETS.values()]
