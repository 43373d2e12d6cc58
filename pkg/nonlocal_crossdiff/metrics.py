"""
Distances between discrete solutions: L^p errors after restriction to a
common mesh, the Wasserstein-1 distance on the circle, and experimental
orders of convergence.
"""
import logging
from dataclasses import asdict, dataclass

import numpy as np

from nonlocal_crossdiff.exceptions import MeshMismatch, NegativeData, ValidationFailure
from nonlocal_crossdiff.grid import norm_lq

logger = logging.getLogger(__name__)

NORMS = ('L1', 'Linf', 'W1')

MASS_MATCH_TOL = 1e-8


@dataclass(frozen=True)
class ErrorRecord:
  """ Errors of a run on the mesh of width h against the reference """
  h: float
  N: int
  L1: float
  Linf: float
  W1: float = None

  def __post_init__(self):
    for norm in NORMS:
      value = getattr(self, norm)
      if value is not None and value < 0:
        raise ValidationFailure("Errors are nonnegative, got {} = {}.".format(norm, value))

  def as_dict(self):
    return asdict(self)


def _restriction_stencil(ratio):
  """ Fine-cell offsets and weights covering one coarse cell """
  if ratio == 1:
    return np.array([0]), np.array([1.0])
  half = ratio // 2
  offsets = np.arange(-half, half + 1)
  weights = np.ones(ratio + 1)
  weights[0] = weights[-1] = 0.5
  return offsets, weights / ratio


def restrict(fine, coarse_mesh):
  """
  Volume-weighted restriction onto a coarse mesh whose cells contain 2^s
  fine cell widths. Coarse cell l, centered at l dx_c, covers 2^s - 1 fine
  cells entirely and half of the two fine cells at its ends. Works on a
  single field or on a stack of species fields.
  """
  fine = np.asarray(fine, dtype=float)
  N_f = fine.shape[-1]
  N_c = coarse_mesh.N
  ratio = N_f // N_c
  if N_f % N_c or ratio & (ratio - 1):
    raise MeshMismatch("Cannot restrict {} cells onto {}: meshes are not nested by a power of two.".format(N_f, N_c))
  offsets, weights = _restriction_stencil(ratio)
  index = (ratio * np.arange(N_c)[:, None] + offsets[None, :]) % N_f
  return fine[..., index] @ weights


def _same_shape(a, b):
  a = np.asarray(a, dtype=float)
  b = np.asarray(b, dtype=float)
  if a.shape != b.shape:
    raise MeshMismatch("Fields of shapes {} and {} cannot be compared.".format(a.shape, b.shape))
  return a, b


def lp_error(a, b, p):
  a, b = _same_shape(a, b)
  return norm_lq(a - b, p)


def wasserstein1(a, b):
  """
  W_1 on the circle between the cell masses dx a_l and dx b_l placed at the
  cell centers: with cumulative differences G_l = sum_{m <= l} dx (a_m - b_m),
  W_1 = sum_l dx |G_l - median(G)|.
  """
  a, b = _same_shape(a, b)
  if a.ndim != 1:
    raise MeshMismatch("wasserstein1 compares single fields.")
  if np.min(a) < 0 or np.min(b) < 0:
    raise NegativeData("Wasserstein distances need nonnegative fields.")
  dx = 1.0 / a.shape[0]
  if abs(dx * (np.sum(a) - np.sum(b))) > MASS_MATCH_TOL:
    raise ValidationFailure("Fields carry different masses ({:.12g} vs {:.12g}).".format(dx * np.sum(a), dx * np.sum(b)))
  G = np.cumsum(dx * (a - b))
  return float(dx * np.sum(np.abs(G - np.median(G))))


def state_errors(a, b, with_w1=True):
  """ Species errors between two states on the same mesh: L1 and W1 summed, Linf maximal """
  a, b = _same_shape(np.atleast_2d(a), np.atleast_2d(b))
  errors = {
    'L1': sum(lp_error(a[i], b[i], 1) for i in range(a.shape[0])),
    'Linf': max(lp_error(a[i], b[i], np.inf) for i in range(a.shape[0])),
    'W1': None,
  }
  if with_w1:
    errors['W1'] = sum(wasserstein1(np.maximum(a[i], 0.0), np.maximum(b[i], 0.0)) for i in range(a.shape[0]))
  return errors


def eoc(records, norms=NORMS, h_reference=0.0):
  """
  Least-squares slope of log(error) against log(h - h_reference) over all
  records, per norm. A first-order error measured against a reference that
  itself carries an O(h_reference) error scales like h - h_reference. A norm
  with fewer than two records, a nonpositive error or h <= h_reference is
  undefined and reported as None.
  """
  orders = {}
  for norm in norms:
    pairs = [(r.h - h_reference, getattr(r, norm)) for r in records if getattr(r, norm) is not None]
    if len(pairs) < 2 or any(h <= 0 or e <= 0 for h, e in pairs):
      logger.warning("Order in %s is undefined for these records.", norm)
      orders[norm] = None
      continue
    h, e = np.array(pairs).T
    orders[norm] = float(np.polyfit(np.log(h), np.log(e), 1)[0])
  return orders
