"""
Experiment drivers: single runs, space-time convergence ladders, the
localization limit and the segregation comparison.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from nonlocal_crossdiff import helpers
from nonlocal_crossdiff.entropy import ledger
from nonlocal_crossdiff.exceptions import SolverFailure, StudyFailure, ValidationFailure
from nonlocal_crossdiff.grid import Mesh
from nonlocal_crossdiff.kernel import DIRAC, INDICATOR, KernelSpec, localization_kernel
from nonlocal_crossdiff.metrics import ErrorRecord, eoc, restrict, state_errors
from nonlocal_crossdiff.model import discretize_kernels, validate
from nonlocal_crossdiff.outputs import ArtifactWriter
from nonlocal_crossdiff.runs import CONVERGENCE, LOCALIZATION, SEGREGATION, SINGLE
from nonlocal_crossdiff.scheme import SolverOptions, project_initial, run

logger = logging.getLogger(__name__)

DESK = 'desk'
FULL = 'paper'
SCALE_ALIASES = {'full': FULL}
SCALES = (DESK, FULL) + tuple(SCALE_ALIASES)

LOCAL = 'local'
NONLOCAL = 'nonlocal'


def check_scale(scale):
  scale = SCALE_ALIASES.get(scale, scale)
  if scale not in SCALES:
    raise ValidationFailure("Scale must be one of {}, got '{}'.".format(SCALES, scale))
  return scale


def _writer(config, writer, out, kind):
  if writer is not None:
    return writer
  return ArtifactWriter(out or config.output_dir, run_id=config.run_id, kind=kind)


def simulate(config, params=None, snapshot_times=None, keep_every=0, options=None):
  """ Project the initial data and integrate; returns the trajectory and the discrete kernels """
  params = params or config.params
  kernels = discretize_kernels(params, config.mesh)
  validate(params, kernels)
  u0 = project_initial(config.profiles, config.mesh)
  trajectory = run(u0, config.time_grid, params, kernels, options=options or SolverOptions.from_settings(),
                   snapshot_times=snapshot_times, keep_every=keep_every)
  return trajectory, kernels


##################
# Single run
##################
@dataclass
class SingleResult:
  trajectory: object
  reports: list
  snapshots: list = field(default_factory=list)


def run_single(config, out=None, writer=None):
  writer = _writer(config, writer, out, SINGLE)
  trajectory, kernels = simulate(config, snapshot_times=config.snapshot_times, keep_every=1)
  reports = ledger(trajectory, config.params, kernels)

  times = config.snapshot_times or [trajectory.initial.t, trajectory.final.t]
  snapshots = [trajectory.at(t) for t in times]
  for state in snapshots:
    writer.write_snapshot(state)
  writer.write_entropy(reports)
  if config.dump_kernels:
    writer.write_kernels(kernels)

  retries = sum(r.retries for r in trajectory.reports)
  writer.summary.update({
    'steps': len(trajectory.reports),
    'retries': retries,
    'H_B': [reports[0].H_B, reports[-1].H_B],
    'H_R': [reports[0].H_R, reports[-1].H_R],
  })
  writer.write_manifest()
  return SingleResult(trajectory=trajectory, reports=reports, snapshots=snapshots)


##################
# Convergence ladder
##################
@dataclass
class StudyResult:
  records: list
  orders: dict
  reference_N: int = None
  final_error: object = None
  raw_orders: dict = None


def convergence_ladder(N_init, dt_init, N_end):
  """ (N, dt) pairs doubling N and halving dt up to N_end """
  if N_end < N_init:
    raise ValidationFailure("N_end = {} is below the initial mesh N = {}.".format(N_end, N_init))
  levels = []
  N, dt = N_init, dt_init
  while N <= N_end:
    levels.append((N, dt))
    N, dt = 2 * N, 0.5 * dt
  return levels


def _final_values(config):
  trajectory, _ = simulate(config)
  return np.array(trajectory.final.values)


def run_convergence_study(config, scale=DESK, out=None, writer=None, solver=None):
  """
  Solve on the ladder N_init -> N_end, take the finest level as reference
  and regress the errors of all other levels, each compared with the
  reference restricted to its mesh. orders regress against h - h_ref,
  raw_orders against h alone. solver maps a level config to the final
  densities and defaults to the scheme.
  """
  scale = check_scale(scale)
  solver = solver or _final_values
  cap = helpers.get_setting('DESK_MAX_N' if scale == DESK else 'FULL_MAX_N')
  N_end = min(config.experiment.get('N_end', cap), cap)
  levels = convergence_ladder(config.mesh.N, config.dt, N_end)
  if len(levels) < 2:
    raise ValidationFailure("A convergence study needs at least two levels.")

  solutions = []
  for N, dt in levels:
    logger.info("convergence study %s: level N = %d, dt = %.6g", config.run_id, N, dt)
    try:
      solutions.append(solver(config.with_mesh(N, dt)))
    except SolverFailure as e:
      raise StudyFailure("Level N = {} failed: {}".format(N, e), level=N, cause=e)

  reference = solutions[-1]
  records = []
  for (N, _), values in zip(levels[:-1], solutions[:-1]):
    errors = state_errors(values, restrict(reference, Mesh(N)))
    records.append(ErrorRecord(h=1.0 / N, N=N, **errors))
  reference_N = levels[-1][0]
  orders = eoc(records, h_reference=1.0 / reference_N)
  raw_orders = eoc(records)
  result = StudyResult(records=records, orders=orders, reference_N=reference_N, final_error=records[-1],
                       raw_orders=raw_orders)

  writer = _writer(config, writer, out, CONVERGENCE)
  writer.write_study(records, orders)
  writer.summary.update({'reference_N': reference_N, 'orders': orders, 'raw_orders': raw_orders,
                         'final_error': records[-1].as_dict()})
  writer.write_manifest()
  return result


##################
# Localization limit
##################
def alpha_ladder(dx, max_power):
  """ alpha = 2^k dx for k = max_power, ..., 0 """
  return [(2.0 ** k) * dx for k in range(max_power, -1, -1)]


def _with_cross_kernels(params, spec):
  return params.with_kernels({(i, j): spec for i in range(params.n) for j in range(i + 1, params.n)})


def run_localization_study(config, scale=DESK, out=None, writer=None):
  """
  Distances between the nonlocal solution with kernels of scale alpha and the
  local solution (Dirac cross kernels) at the final time, regressed against
  alpha.
  """
  scale = check_scale(scale)
  family = config.experiment.get('family')
  if family is None:
    raise ValidationFailure("A localization study needs a kernel family.")
  max_power = config.experiment.get('alpha_max_power', helpers.get_setting('FULL_ALPHA_MAX_POWER'))
  if scale == DESK:
    max_power = min(max_power, helpers.get_setting('DESK_ALPHA_MAX_POWER'))
    N = min(config.mesh.N, helpers.get_setting('DESK_LOCALIZATION_N'))
    config = config.with_mesh(N, config.dt)

  try:
    logger.info("localization study %s: local reference on N = %d", config.run_id, config.mesh.N)
    reference, _ = simulate(config, params=_with_cross_kernels(config.params, KernelSpec(shape=DIRAC)))
  except SolverFailure as e:
    raise StudyFailure("Local reference run failed: {}".format(e), level=0.0, cause=e)

  records = []
  for alpha in alpha_ladder(config.mesh.dx, max_power):
    logger.info("localization study %s: alpha = %.6g", config.run_id, alpha)
    params = _with_cross_kernels(config.params, localization_kernel(family, alpha))
    try:
      trajectory, _ = simulate(config, params=params)
    except SolverFailure as e:
      raise StudyFailure("Run at alpha = {} failed: {}".format(alpha, e), level=alpha, cause=e)
    errors = state_errors(trajectory.final.values, reference.final.values)
    records.append(ErrorRecord(h=alpha, N=config.mesh.N, **errors))
  orders = eoc(records)
  result = StudyResult(records=records, orders=orders, reference_N=config.mesh.N, final_error=records[-1])

  writer = _writer(config, writer, out, LOCALIZATION)
  writer.write_study(records, orders)
  writer.summary.update({'N': config.mesh.N, 'family': family, 'orders': orders})
  writer.write_manifest()
  return result


##################
# Segregation
##################
@dataclass(frozen=True)
class GapReport:
  variant: str
  t: float
  pair: tuple
  gaps: tuple
  overlap: float
  expected_gap: float = None

  @property
  def mean_gap(self):
    return float(np.mean(self.gaps)) if self.gaps else None


def segregation_gaps(values, pair, threshold=None):
  """
  Empty stretches between the supports of species i and j on the circle.
  Cells are occupied by i, by j, by both or by some other species; between
  consecutive occupied cells a change from i to j (or back) leaves a gap of
  (distance - 1) dx, and a change into or out of a cell shared by both
  leaves none.
  """
  threshold = helpers.get_setting('GAP_THRESHOLD') if threshold is None else threshold
  values = np.asarray(values, dtype=float)
  i, j = pair
  N = values.shape[1]
  occupied = values > threshold
  others = np.delete(occupied, [i, j], axis=0).any(axis=0) if values.shape[0] > 2 else np.zeros(N, dtype=bool)
  labels = np.full(N, '', dtype=object)
  labels[others] = 'other'
  labels[occupied[i]] = 'i'
  labels[occupied[j]] = 'j'
  labels[occupied[i] & occupied[j]] = 'both'

  anchors = np.flatnonzero(labels != '')
  gaps = []
  if len(anchors) > 1:
    for a, b in zip(anchors, np.roll(anchors, -1)):
      first, second = labels[a], labels[b]
      if {first, second} == {'i', 'j'}:
        gaps.append(((b - a) % N - 1) / N)
      elif first != second and 'both' in (first, second) and 'other' not in (first, second):
        gaps.append(0.0)
  overlap = float(np.sum(values[i] * values[j]) / N)
  return tuple(gaps), overlap


def equilibrium_gap(params, pair):
  """
  Gap at which two segregated species driven apart by an indicator kernel
  of height H and radius r come to rest when sigma = 0. Facing edges relax
  into quarter sine waves of width pi / (2 w) with
  w = H sqrt(a_ij a_ji / (a_ii a_jj)), so the supports stay r - pi / (2 w)
  apart. None when the pair has no indicator kernel or no such rest state.
  """
  i, j = pair
  spec = params.kernels.get((i, j)) or params.kernels.get((j, i))
  if spec is None or spec.shape != INDICATOR or params.sigma > 0:
    return None
  A = np.asarray(params.A, dtype=float)
  coupling = A[i, j] * A[j, i]
  if coupling <= 0 or A[i, i] <= 0 or A[j, j] <= 0:
    return None
  height = 0.5 / spec.radius if spec.unit_mass else spec.height
  omega = height * np.sqrt(coupling / (A[i, i] * A[j, j]))
  gap = spec.radius - 0.5 * np.pi / omega
  return float(gap) if gap > 0 else None


def run_segregation(config, scale=DESK, out=None, writer=None):
  """
  Run the local (Dirac) and nonlocal variants, write their snapshots and the
  gap report of every species pair at every snapshot time.
  """
  check_scale(scale)
  writer = _writer(config, writer, out, SEGREGATION)
  times = config.snapshot_times or [config.time_grid.T]
  variants = [
    (LOCAL, _with_cross_kernels(config.params, KernelSpec(shape=DIRAC))),
    (NONLOCAL, config.params),
  ]
  pairs = [(i, j) for i in range(config.params.n) for j in range(i + 1, config.params.n)]

  reports = []
  for variant, params in variants:
    logger.info("segregation %s: %s variant", config.run_id, variant)
    try:
      trajectory, _ = simulate(config, params=params, snapshot_times=times)
    except SolverFailure as e:
      raise StudyFailure("{} variant failed: {}".format(variant, e), level=variant, cause=e)
    run_id = '{}_{}'.format(config.run_id, variant)
    for t in times:
      state = trajectory.at(t)
      writer.write_snapshot(state, run_id=run_id)
      for pair in pairs:
        gaps, overlap = segregation_gaps(state.values, pair)
        expected = equilibrium_gap(params, pair) if variant == NONLOCAL else None
        reports.append(GapReport(variant=variant, t=state.t, pair=pair, gaps=gaps, overlap=overlap,
                                 expected_gap=expected))

  writer.write_gaps(reports)
  writer.summary.update({'gaps': [{'variant': r.variant, 't': r.t, 'pair': [r.pair[0] + 1, r.pair[1] + 1],
                                   'mean_gap': r.mean_gap, 'expected_gap': r.expected_gap,
                                   'overlap': r.overlap} for r in reports]})
  writer.write_manifest()
  return reports


STUDIES = {
  'convergence': run_convergence_study,
  'localization': run_localization_study,
  'segregation': run_segregation,
}
