"""
Witness that pointwise positive definiteness of the cell-averaged pair
matrices is not implied by the continuous condition: for the indicator
kernel of radius 3 dx / 2 the matrix

  Mhat_{l,l'} = integral over K_l of integral over K_l' of B(x - y) dy dx

is pentadiagonal-periodic with entries dx^2, 7/8 dx^2, 1/8 dx^2 and has the
alternating vector w = (+1, -1, ...) as an eigenvector with a negative
eigenvalue.

Mhat is a double integral over two cells. It is not dx^2 B_{l-l'}, the
cell-average weights used by the scheme (those give dx^2, dx^2 and 0 on the
same three diagonals).
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import circulant

from nonlocal_crossdiff.exceptions import CounterexampleFailure, ValidationFailure
from nonlocal_crossdiff.kernel import representative_offsets

logger = logging.getLogger(__name__)

BAND = {0: 1.0, 1: 7.0 / 8.0, 2: 1.0 / 8.0}

STATED_EIGENVALUE_FACTOR = -4.0

ENTRY_TOL = 1e-12
EIGEN_TOL = 1e-14
QUADRATURE_NODES = 8


@dataclass(frozen=True, eq=False)
class ExactPairMatrix:
  N: int
  matrix: np.ndarray
  quadrature_deviation: float

  @property
  def dx(self):
    return 1.0 / self.N

  def entry(self, offset):
    return float(self.matrix[0, offset % self.N])


@dataclass(frozen=True)
class Certificate:
  N: int
  weights: tuple
  quadrature_deviation: float
  eigenvalue: float
  eigen_residual: float
  min_eigenvalue: float
  J: float
  notes: tuple = field(default_factory=tuple)

  @property
  def passed(self):
    return self.J < 0 and self.eigenvalue < 0 and self.eigen_residual <= EIGEN_TOL

  def lines(self):
    dx2 = (1.0 / self.N) ** 2
    rows = [
      "N = {}".format(self.N),
      "entries vs quadrature: max deviation {:.3e}".format(self.quadrature_deviation),
      "eigenvalue of w: {:.17g} ({:.6g} dx^2)".format(self.eigenvalue, self.eigenvalue / dx2),
      "eigenvector residual: {:.3e}".format(self.eigen_residual),
      "smallest eigenvalue of Mhat: {:.17g}".format(self.min_eigenvalue),
      "J = {:.17g}".format(self.J),
    ]
    rows.extend("note: {}".format(note) for note in self.notes)
    rows.append("PASS" if self.passed else "FAIL")
    return rows


def _check_size(N):
  if int(N) != N or N % 2 or N <= 5:
    raise ValidationFailure("The construction needs an even N > 5, got {}.".format(N))


def closed_form_row(N):
  """ First row of Mhat from the overlap areas """
  dx = 1.0 / N
  row = np.zeros(N)
  for offset, factor in BAND.items():
    row[offset] = row[-offset] = factor * dx * dx
  return row


def quadrature_row(N):
  """
  First row of Mhat by quadrature: the inner integral is the exact overlap
  length of (x - r, x + r) with K_m, piecewise linear in x, and the outer
  integral is split at its kinks.
  """
  dx = 1.0 / N
  r = 1.5 * dx
  nodes, weights = leggauss(QUADRATURE_NODES)
  row = np.zeros(N)
  for index, m in enumerate(representative_offsets(N)):
    lo, hi = (m - 0.5) * dx, (m + 0.5) * dx
    kinks = np.array([lo - r, lo + r, hi - r, hi + r])
    cuts = np.unique(np.clip(np.concatenate(([-0.5 * dx, 0.5 * dx], kinks)), -0.5 * dx, 0.5 * dx))
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
      x = 0.5 * (a + b) + 0.5 * (b - a) * nodes
      overlap = np.maximum(0.0, np.minimum(x + r, hi) - np.maximum(x - r, lo))
      total += 0.5 * (b - a) * float(overlap @ weights)
    row[index] = total
  return row


def build_exact_matrix(N):
  _check_size(N)
  row = closed_form_row(N)
  deviation = float(np.max(np.abs(row - quadrature_row(N))))
  if deviation > ENTRY_TOL:
    raise CounterexampleFailure("Closed-form entries deviate from quadrature by {:.3e}.".format(deviation))
  # symmetric, so the circulant of the row equals that of the column
  return ExactPairMatrix(N=N, matrix=circulant(row), quadrature_deviation=deviation)


def _check_weights(W):
  W = np.atleast_2d(np.array(W, dtype=float))
  if W.shape[0] != W.shape[1] or not np.allclose(W, W.T, rtol=1e-12, atol=0.0):
    raise ValidationFailure("The weight matrix (pi_i a_ij) must be square and symmetric.")
  if np.min(np.linalg.eigvalsh(W)) <= 0:
    raise ValidationFailure("The weight matrix (pi_i a_ij) must be positive definite.")
  return W


def verify_negative_direction(N, W=None):
  """
  Build z_i = v_i w with v the top eigenvector of W = (pi_i a_ij) and
  return the certificate for J = sum_ij W_ij z_i^T Mhat z_j < 0.
  """
  M = build_exact_matrix(N)
  W = _check_weights([[1.0]] if W is None else W)
  w = (-1.0) ** np.arange(N)
  Mw = M.matrix @ w
  eigenvalue = float(w @ Mw / (w @ w))
  residual = float(np.max(np.abs(Mw - eigenvalue * w)))

  _, vectors = np.linalg.eigh(W)
  z = np.kron(vectors[:, -1], w)
  J = float(z @ np.kron(W, M.matrix) @ z)

  dx2 = M.dx ** 2
  notes = []
  if not np.isclose(eigenvalue, STATED_EIGENVALUE_FACTOR * dx2):
    notes.append("computed eigenvalue {:.6g} dx^2 differs from the stated {:g} dx^2".format(
      eigenvalue / dx2, STATED_EIGENVALUE_FACTOR))

  certificate = Certificate(N=N, weights=tuple(map(tuple, W)), quadrature_deviation=M.quadrature_deviation,
                            eigenvalue=eigenvalue, eigen_residual=residual,
                            min_eigenvalue=float(np.min(np.linalg.eigvalsh(M.matrix))), J=J, notes=tuple(notes))
  if residual > EIGEN_TOL:
    raise CounterexampleFailure("w is not an eigenvector of Mhat (residual {:.3e}).".format(residual))
  if J >= 0:
    raise CounterexampleFailure("J = {:.17g} is not negative.".format(J))
  logger.info("counterexample N=%d: eigenvalue %.6g dx^2, J = %.6g", N, eigenvalue / dx2, J)
  return certificate
