"""
Artifacts of a run: CSV tables rendered with djangorestframework-csv and
a JSON manifest listing everything written to the output directory.
"""
import logging
import os

import numpy as np
from rest_framework.renderers import JSONRenderer
from rest_framework_csv.renderers import CSVRenderer

from nonlocal_crossdiff import helpers

logger = logging.getLogger(__name__)

MANIFEST = 'manifest.json'


def format_value(value):
  """ 17 significant digits for floats, empty cell for missing values """
  if value is None:
    return ''
  if isinstance(value, (bool, np.bool_)):
    return str(bool(value))
  if isinstance(value, (int, np.integer)):
    return str(int(value))
  if isinstance(value, (float, np.floating)):
    return '%.17g' % value
  return str(value)


def snapshot_name(run_id, t):
  return '{}_t{:.6f}.csv'.format(run_id, t)


def snapshot_rows(state):
  header = ['x'] + ['u_{}'.format(i + 1) for i in range(state.n)]
  columns = [state.mesh.centers] + list(state.values)
  rows = [dict(zip(header, values)) for values in zip(*columns)]
  return header, rows


def entropy_rows(reports):
  n = len(reports[0].mass) if reports else 0
  header = ['t', 'H_B', 'H_R', 'Q_grad', 'D_rao'] + ['mass_{}'.format(i + 1) for i in range(n)]
  rows = []
  for r in reports:
    row = {'t': r.t, 'H_B': r.H_B, 'H_R': r.H_R, 'Q_grad': r.Q_grad, 'D_rao': r.D_rao}
    row.update({'mass_{}'.format(i + 1): m for i, m in enumerate(r.mass)})
    rows.append(row)
  return header, rows


class ArtifactWriter:
  """ Writes the tables of one run id under one directory and records them for the manifest """
  def __init__(self, directory=None, run_id='run', kind='single'):
    self.directory = directory or helpers.get_setting('OUTPUT_DIR')
    self.run_id = run_id
    self.kind = kind
    self.artifacts = []
    self.summary = {}
    os.makedirs(self.directory, exist_ok=True)

  def path(self, name):
    return os.path.join(self.directory, name)

  def write_table(self, name, header, rows):
    data = [{key: format_value(row.get(key)) for key in header} for row in rows]
    content = CSVRenderer().render(data, renderer_context={'header': header})
    with open(self.path(name), 'wb') as f:
      f.write(content)
    self.artifacts.append(name)
    logger.info("wrote %s", self.path(name))
    return self.path(name)

  def write_snapshot(self, state, run_id=None):
    header, rows = snapshot_rows(state)
    return self.write_table(snapshot_name(run_id or self.run_id, state.t), header, rows)

  def write_entropy(self, reports, run_id=None):
    header, rows = entropy_rows(reports)
    return self.write_table('{}_entropy.csv'.format(run_id or self.run_id), header, rows)

  def write_kernels(self, kernels, run_id=None):
    header = ['offset_index', 'offset_x', 'weight']
    for (i, j), K in sorted(kernels.items()):
      self.write_table('{}_kernel_{}_{}.csv'.format(run_id or self.run_id, i + 1, j + 1), header, K.rows())

  def write_study(self, records, orders, run_id=None):
    run_id = run_id or self.run_id
    header = ['h', 'N', 'L1', 'Linf', 'W1']
    self.write_table('{}_study.csv'.format(run_id), header, [r.as_dict() for r in records])
    rows = [{'norm': norm, 'order': order} for norm, order in orders.items()]
    self.write_table('{}_orders.csv'.format(run_id), ['norm', 'order'], rows)

  def write_gaps(self, reports, run_id=None):
    header = ['variant', 't', 'species_i', 'species_j', 'gap_count', 'mean_gap', 'min_gap', 'max_gap', 'overlap',
              'expected_gap']
    rows = []
    for r in reports:
      rows.append({
        'variant': r.variant, 't': r.t, 'species_i': r.pair[0] + 1, 'species_j': r.pair[1] + 1,
        'gap_count': len(r.gaps), 'mean_gap': r.mean_gap,
        'min_gap': min(r.gaps) if r.gaps else None, 'max_gap': max(r.gaps) if r.gaps else None,
        'overlap': r.overlap, 'expected_gap': r.expected_gap,
      })
    return self.write_table('{}_gaps.csv'.format(run_id or self.run_id), header, rows)

  def write_manifest(self):
    manifest = {
      'run_id': self.run_id,
      'experiment': self.kind,
      'artifacts': list(self.artifacts),
      'summary': _plain(self.summary),
    }
    with open(self.path(MANIFEST), 'wb') as f:
      f.write(JSONRenderer().render(manifest, renderer_context={'indent': 2}))
    logger.info("wrote %s", self.path(MANIFEST))
    return self.path(MANIFEST)


def _plain(value):
  """ numpy scalars and containers into JSON-ready python values """
  if isinstance(value, dict):
    return {str(k): _plain(v) for k, v in value.items()}
  if isinstance(value, (list, tuple)):
    return [_plain(v) for v in value]
  if isinstance(value, np.generic):
    return value.item()
  return value
