"""
Model parameters and the structural hypotheses they have to satisfy:
detailed balance pi_i a_ij = pi_j a_ji and uniform positive definiteness of
the pair matrices

  M^{ij}_m = [[ pi_i a_ii,                (n-1) pi_i a_ij B^{ij}_m ],
              [ (n-1) pi_j a_ji B^{ij}_m,  pi_j a_jj               ]],  i < j.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from nonlocal_crossdiff import kernel as kernels_module
from nonlocal_crossdiff.exceptions import DetailedBalanceViolation, HypothesisH3Violation, ValidationFailure
from nonlocal_crossdiff.mobility import UPWIND, check_rule

logger = logging.getLogger(__name__)

STRICT = 'strict'
WARN = 'warn'
HYPOTHESIS_MODES = (STRICT, WARN)

DETAILED_BALANCE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ModelParams:
  """
  Species count n, interaction matrix A, weights pi, diffusion sigma and the
  cross kernels keyed by ordered 0-based pairs (i, j), i != j. A pair given
  in one order only is completed with the reflected kernel.
  """
  n: int
  A: np.ndarray
  pi: np.ndarray
  sigma: float
  kernels: dict = field(default_factory=dict)
  mobility: str = UPWIND
  hypothesis_mode: str = STRICT

  def __post_init__(self):
    A = np.array(self.A, dtype=float)
    pi = np.array(self.pi, dtype=float)
    if self.n < 1:
      raise ValidationFailure("At least one species is required.")
    if A.shape != (self.n, self.n):
      raise ValidationFailure("A must be {0}x{0}, got shape {1}.".format(self.n, A.shape))
    if pi.shape != (self.n,) or np.any(pi <= 0):
      raise ValidationFailure("pi must hold {} positive weights.".format(self.n))
    if not np.all(np.isfinite(A)):
      raise ValidationFailure("A must be finite.")
    if self.sigma < 0:
      raise ValidationFailure("sigma must be nonnegative.")
    check_rule(self.mobility)
    if self.hypothesis_mode not in HYPOTHESIS_MODES:
      raise ValidationFailure("hypothesis_mode must be one of {}.".format(HYPOTHESIS_MODES))
    for (i, j) in self.kernels:
      if i == j or not (0 <= i < self.n and 0 <= j < self.n):
        raise ValidationFailure("Kernel pair ({}, {}) is not an ordered pair of distinct species.".format(i + 1, j + 1))
    for i in range(self.n):
      for j in range(self.n):
        if i != j and (i, j) not in self.kernels and (j, i) not in self.kernels:
          raise ValidationFailure("No kernel given for species pair ({}, {}).".format(i + 1, j + 1))
    A.setflags(write=False)
    pi.setflags(write=False)
    object.__setattr__(self, 'A', A)
    object.__setattr__(self, 'pi', pi)

  def pairs(self):
    return [(i, j) for i in range(self.n) for j in range(self.n) if i != j]

  def with_kernels(self, kernels):
    """ Same parameters with a different kernel assignment """
    return ModelParams(n=self.n, A=self.A, pi=self.pi, sigma=self.sigma, kernels=kernels,
                       mobility=self.mobility, hypothesis_mode=self.hypothesis_mode)


@dataclass(frozen=True)
class CoercivityReport:
  c_M: float
  applicable: bool
  satisfied: bool


@dataclass(frozen=True)
class HypothesisReport:
  detailed_balance_defect: float
  balanced: bool
  coercivity: CoercivityReport
  asymmetric_pairs: tuple
  uneven_pairs: tuple = ()

  @property
  def satisfied(self):
    return self.balanced and self.coercivity.satisfied and not self.asymmetric_pairs and not self.uneven_pairs


def discretize_kernels(params, mesh):
  """ Tabulate every cross kernel on the mesh, keyed by ordered pair """
  tabulated = {}
  for pair, spec in params.kernels.items():
    tabulated[pair] = kernels_module.cell_average(spec, mesh)
  for (i, j) in params.pairs():
    if (i, j) not in tabulated:
      tabulated[(i, j)] = tabulated[(j, i)].transposed()
  return tabulated


def check_detailed_balance(params):
  """ max_{i<j} |pi_i a_ij - pi_j a_ji| """
  weighted = params.pi[:, None] * params.A
  defect = np.abs(weighted - weighted.T)
  worst = float(np.max(np.triu(defect, 1))) if params.n > 1 else 0.0
  scale = float(np.max(np.abs(weighted)))
  if worst > DETAILED_BALANCE_RTOL * scale:
    message = "Detailed balance fails: max |pi_i a_ij - pi_j a_ji| = {:.3e}.".format(worst)
    if params.hypothesis_mode == STRICT:
      raise DetailedBalanceViolation(message)
    logger.warning(message)
  return worst


def assemble_pair_matrix(params, i, j, b):
  if i >= j:
    raise ValidationFailure("Pair matrices are assembled for i < j only.")
  factor = (params.n - 1)
  return np.array([
    [params.pi[i] * params.A[i, i], factor * params.pi[i] * params.A[i, j] * b],
    [factor * params.pi[j] * params.A[j, i] * b, params.pi[j] * params.A[j, j]],
  ])


def _smallest_eigenvalues(a, b, c, d):
  """ Smallest eigenvalue of the symmetric part of [[a, b], [c, d]], in closed form """
  s = 0.5 * (b + c)
  return 0.5 * (a + d) - np.sqrt(0.25 * (a - d) ** 2 + s * s)


def coercivity_constant(params, kernels):
  """
  c_M = min over pairs i < j and offsets m of the smallest eigenvalue of
  M^{ij}_m. Dirac cross kernels make the offset family degenerate, in which
  case c_M is reported as not applicable.
  """
  if params.n == 1:
    c_M = float(params.pi[0] * params.A[0, 0])
    return _coercivity_verdict(params, c_M)

  if any(kernels[pair].is_dirac for pair in params.pairs()):
    return CoercivityReport(c_M=None, applicable=False, satisfied=True)

  c_M = np.inf
  for i in range(params.n):
    for j in range(i + 1, params.n):
      b = np.unique(kernels[(i, j)].weights)
      corner = assemble_pair_matrix(params, i, j, 1.0)
      lam = _smallest_eigenvalues(corner[0, 0], corner[0, 1] * b, corner[1, 0] * b, corner[1, 1])
      c_M = min(c_M, float(np.min(lam)))
  return _coercivity_verdict(params, c_M)


def _coercivity_verdict(params, c_M):
  if c_M > 0:
    return CoercivityReport(c_M=c_M, applicable=True, satisfied=True)
  message = "Pair matrices are not positive definite (c_M = {:.4e}).".format(c_M)
  if params.hypothesis_mode == STRICT:
    raise HypothesisH3Violation(message)
  logger.warning(message)
  return CoercivityReport(c_M=c_M, applicable=True, satisfied=False)


def validate(params, kernels):
  """ Check every structural hypothesis; raises in strict mode, logs in warn mode """
  defect = check_detailed_balance(params)
  coercivity = coercivity_constant(params, kernels)
  asymmetric = []
  for i in range(params.n):
    for j in range(i + 1, params.n):
      if (i, j) in params.kernels and (j, i) in params.kernels:
        K, K_ji = kernels[(i, j)], kernels[(j, i)]
        if K.is_dirac != K_ji.is_dirac or (not K.is_dirac and not np.allclose(K.transposed().weights, K_ji.weights, rtol=1e-12, atol=0.0)):
          asymmetric.append((i + 1, j + 1))
  if asymmetric:
    logger.warning("Kernels of pairs %s are not reflections of each other.", asymmetric)
  uneven = [(i + 1, j + 1) for (i, j) in sorted(params.kernels) if not kernels[(i, j)].is_even()]
  if uneven:
    logger.warning("Kernels of pairs %s are not even: B(-x) != B(x).", uneven)
  scale = float(np.max(np.abs(params.pi[:, None] * params.A)))
  balanced = defect <= DETAILED_BALANCE_RTOL * scale
  return HypothesisReport(detailed_balance_defect=defect, balanced=balanced, coercivity=coercivity,
                          asymmetric_pairs=tuple(asymmetric), uneven_pairs=tuple(uneven))
