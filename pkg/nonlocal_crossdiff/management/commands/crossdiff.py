# -*- coding: utf-8 -*-
import logging

from django.core.management.base import BaseCommand, CommandError
from rest_framework import exceptions as drf_exceptions
from rest_framework.parsers import JSONParser

from nonlocal_crossdiff import registry, studies
from nonlocal_crossdiff.counterexample import verify_negative_direction
from nonlocal_crossdiff.exceptions import CrossDiffError, ValidationFailure
from nonlocal_crossdiff.serializers.config import load_run_config

VALIDATION_EXIT = 2
FAILURE_EXIT = 3


def read_config(options):
  preset, path = options.get('preset'), options.get('config')
  if bool(preset) == bool(path):
    raise ValidationFailure("Give exactly one of --preset and --config.")
  if preset:
    return registry.get_preset(preset).config
  try:
    with open(path, 'rb') as f:
      return JSONParser().parse(f)
  except OSError as e:
    raise ValidationFailure("Cannot read config {}: {}".format(path, e.strerror))


class Command(BaseCommand):
  help = "Simulate nonlocal cross-diffusion systems on the torus and run the reference experiments"

  def add_arguments(self, parser):
    verbs = parser.add_subparsers(dest='verb', required=True)

    def with_input(sub):
      sub.add_argument('--preset', help="Name of a built-in test case")
      sub.add_argument('--config', help="Path of a JSON run configuration")
      sub.add_argument('--out', help="Output directory")
      sub.add_argument('--scale', choices=studies.SCALES, default=studies.DESK)
      return sub

    with_input(verbs.add_parser('run', help="Single simulation with snapshots and entropy ledger"))
    study = with_input(verbs.add_parser('study', help="Convergence, localization or segregation study"))
    study.add_argument('kind', choices=sorted(studies.STUDIES))
    verbs.add_parser('list-testcases', help="List the built-in test cases")
    verify = verbs.add_parser('verify-counterexample', help="Certify the indefinite exact pair matrix")
    verify.add_argument('--N', type=int, default=6)

  def handle(self, *args, **options):
    if options['verbosity'] >= 2:
      logging.getLogger('nonlocal_crossdiff').setLevel(logging.DEBUG)

    try:
      handler = getattr(self, 'handle_' + options['verb'].replace('-', '_'))
      handler(options)
    except (ValidationFailure, drf_exceptions.ValidationError, drf_exceptions.ParseError) as e:
      raise CommandError("Invalid input: {}".format(_detail(e)), returncode=VALIDATION_EXIT)
    except CrossDiffError as e:
      raise CommandError("{}: {}".format(type(e).__name__, e), returncode=FAILURE_EXIT)

  def _load(self, options):
    config = load_run_config(read_config(options))
    if options.get('out'):
      config.output_dir = options['out']
    return config

  def handle_run(self, options):
    config = self._load(options)
    result = studies.run_single(config)
    first, last = result.reports[0], result.reports[-1]
    self.stdout.write("{}: {} steps, H_B {:.6g} -> {:.6g}, H_R {:.6g} -> {:.6g}".format(
      config.run_id, len(result.trajectory.reports), first.H_B, last.H_B, first.H_R, last.H_R))

  def handle_study(self, options):
    config = self._load(options)
    result = studies.STUDIES[options['kind']](config, scale=options['scale'])
    if options['kind'] == 'segregation':
      for r in result:
        self.stdout.write("{} t={:.4f} pair {}-{}: mean gap {}, overlap {:.3e}{}".format(
          r.variant, r.t, r.pair[0] + 1, r.pair[1] + 1, _number(r.mean_gap), r.overlap,
          '' if r.expected_gap is None else ", at rest {:.4f}".format(r.expected_gap)))
      return
    raw_orders = result.raw_orders or {}
    for norm, order in result.orders.items():
      line = "{} order: {}".format(norm, _number(order, 'undefined'))
      if norm in raw_orders:
        line += " (against h: {})".format(_number(raw_orders[norm], 'undefined'))
      self.stdout.write(line)

  def handle_list_testcases(self, options):
    for name, description in registry.list_presets():
      self.stdout.write("{:<8} {}".format(name, description))

  def handle_verify_counterexample(self, options):
    certificate = verify_negative_direction(options['N'])
    for line in certificate.lines():
      self.stdout.write(line)


def _detail(error):
  return getattr(error, 'detail', None) or str(error)


def _number(value, missing='n/a'):
  return missing if value is None else '{:.4f}'.format(value)
