"""
Discrete Boltzmann and Rao entropies, the dissipation terms of the two
entropy inequalities, and the per-step ledger checking that both entropies
decrease along a trajectory.
"""
import dataclasses
import logging

import numpy as np
from scipy.special import xlogy

from nonlocal_crossdiff import helpers
from nonlocal_crossdiff.exceptions import EntropyIncrease, NegativeData, ValidationFailure
from nonlocal_crossdiff.mobility import C0, face_mobility_unchecked
from nonlocal_crossdiff.model import WARN, discretize_kernels, validate
from nonlocal_crossdiff.scheme import Scheme

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class EntropyReport:
  t: float
  k: int
  H_B: float
  H_R: float
  mass: tuple
  Q_grad: float
  D_rao: float
  D_fisher: float
  boltzmann_budget_defect: float = None
  rao_budget_defect: float = None


def _values(state, tol_neg=None):
  tol_neg = helpers.get_setting('TOL_NEG') if tol_neg is None else tol_neg
  if np.min(state.values) < -tol_neg:
    raise NegativeData("Entropies are defined for nonnegative densities.")
  return np.maximum(state.values, 0.0)


def _increments(U, dx):
  """ D u_i for every species at once """
  return (np.roll(U, -1, axis=1) - U) / dx


def boltzmann_entropy(state, params):
  """ sum_i pi_i sum_l dx h(u_il), h(s) = s (log s - 1), h(0) = 0 """
  U = _values(state)
  h = xlogy(U, U) - U
  return float(state.mesh.dx * np.sum(params.pi[:, None] * h))


def _cross_sum(U, params, kernels, dx):
  """ sum_{i != j} pi_i a_ij sum_l dx U_i (K^ij * U_j) """
  total = 0.0
  for (i, j) in params.pairs():
    if params.A[i, j] != 0.0:
      total += params.pi[i] * params.A[i, j] * dx * float(U[i] @ kernels[(i, j)].convolve(U[j]))
  return total


def rao_entropy(state, params, kernels):
  U = _values(state)
  dx = state.mesh.dx
  local = dx * np.sum(params.pi * np.diag(params.A) * np.sum(U * U, axis=1))
  return float(0.5 * local + 0.5 * _cross_sum(U, params, kernels, dx))


def gradient_form(state, params, kernels):
  """
  The pair-matrix quadratic form on D u, normalised by 1/(n-1):
    sum_i pi_i a_ii |u_i|_{1,2}^2 + sum_{i != j} pi_i a_ij sum_l dx D u_i (K^ij * D u_j)
  """
  dx = state.mesh.dx
  DU = _increments(state.values, dx)
  local = dx * np.sum(params.pi * np.diag(params.A) * np.sum(DU * DU, axis=1))
  return float(local + _cross_sum(DU, params, kernels, dx))


def dissipation_forms(state, p, params, kernels, rule=None):
  """ (Q_grad, D_rao, D_fisher) evaluated at the state and its potential p """
  rule = rule or params.mobility
  U = _values(state)
  dx = state.mesh.dx
  Q_grad = gradient_form(state, params, kernels)

  p = np.asarray(p, dtype=float)
  dp = np.roll(p, -1, axis=1) - p
  m = face_mobility_unchecked(rule, U, np.roll(U, -1, axis=1), dp)
  D_rao = float(dx * np.sum(params.pi[:, None] * m * (dp / dx) ** 2))

  root = _increments(np.sqrt(U), dx)
  D_fisher = float(4.0 * params.sigma * dx * np.sum(params.pi[:, None] * root * root))
  return Q_grad, D_rao, D_fisher


def _monotonicity_enforced(params, kernels):
  report = validate(dataclasses.replace(params, hypothesis_mode=WARN), kernels)
  if not report.satisfied:
    logger.warning("Structural hypotheses fail; entropy monotonicity is not checked.")
  return report.satisfied


def _check_decrease(name, previous, current, slack, t):
  if current > previous + slack * (1.0 + abs(previous)):
    raise EntropyIncrease("{} increased from {:.17g} to {:.17g} at t = {:.6f}.".format(name, previous, current, t))


def ledger(trajectory, params, kernels=None, rule=None, slack=None, enforce=None):
  """
  One EntropyReport per stored state. Budget defects compare the entropy drop
  with the dissipation of the step and are only filled in between
  consecutive steps. Monotonicity is enforced when the structural hypotheses
  hold, unless enforce says otherwise.
  """
  states = trajectory.states if hasattr(trajectory, 'states') else list(trajectory)
  if not states:
    raise ValidationFailure("Cannot build a ledger of an empty trajectory.")
  mesh = states[0].mesh
  kernels = kernels if kernels is not None else discretize_kernels(params, mesh)
  rule = rule or params.mobility
  slack = helpers.get_setting('ENTROPY_SLACK') if slack is None else slack
  if enforce is None:
    enforce = _monotonicity_enforced(params, kernels)
  scheme = Scheme(params, mesh, kernels, rule)

  reports = []
  for state in states:
    p = scheme.potential(state)
    H_B = boltzmann_entropy(state, params)
    H_R = rao_entropy(state, params, kernels)
    Q_grad, D_rao, D_fisher = dissipation_forms(state, p, params, kernels, rule)
    b_defect = r_defect = None
    if reports:
      previous = reports[-1]
      if enforce:
        _check_decrease("H_B", previous.H_B, H_B, slack, state.t)
        _check_decrease("H_R", previous.H_R, H_R, slack, state.t)
      if state.k == previous.k + 1:
        dt = state.t - previous.t
        b_defect = previous.H_B - H_B - dt * (C0 * Q_grad + D_fisher)
        r_defect = previous.H_R - H_R - dt * (D_rao + params.sigma * Q_grad)
    reports.append(EntropyReport(t=state.t, k=state.k, H_B=H_B, H_R=H_R, mass=tuple(state.masses()),
                                 Q_grad=Q_grad, D_rao=D_rao, D_fisher=D_fisher,
                                 boltzmann_budget_defect=b_defect, rao_budget_defect=r_defect))
  return reports
