"""
Implicit Euler finite-volume scheme for the nonlocal cross-diffusion system

  (dx/dt)(u_{i,l} - u_{i,l}^prev) + F_{i,l+1/2} - F_{i,l-1/2} = 0,
  F_{i,l+1/2} = -(sigma/dx)(u_{i,l+1} - u_{i,l}) - (m_{i,l+1/2}/dx)(p_{i,l+1} - p_{i,l}),
  p_i = a_ii u_i + sum_{j != i} a_ij K^{ij} * u_j,

solved at every step by Newton's method with the exact Jacobian.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from nonlocal_crossdiff import helpers
from nonlocal_crossdiff.exceptions import (MassDefectError, MeshMismatch, NegativeData, NegativeStateUnrecoverable,
                                           NewtonDivergence, SolverFailure, ValidationFailure)
from nonlocal_crossdiff.grid import Mesh, TimeGrid
from nonlocal_crossdiff.initial import cell_averages
from nonlocal_crossdiff.mobility import POSITIVITY_FLOOR, UPWIND, face_mobility_unchecked, logmean_partials
from nonlocal_crossdiff.model import discretize_kernels

logger = logging.getLogger(__name__)

NONNEGATIVITY_SLACK = 1e-12

# resolution of the nonnegativity check on initial profiles
PROFILE_CHECK_CELLS = 8192

ARMIJO = 1e-4
MIN_DAMPING = 2.0 ** -12
POLISH_ITERATIONS = 3


@dataclass(frozen=True, eq=False)
class State:
  """ Densities u_{i,l} of n species at step k, time t """
  values: np.ndarray
  mesh: Mesh
  k: int = 0
  t: float = 0.0

  def __post_init__(self):
    values = np.array(self.values, dtype=float, ndmin=2)
    if values.shape[1] != self.mesh.N:
      raise MeshMismatch("State has {} cells, mesh has {}.".format(values.shape[1], self.mesh.N))
    if not np.all(np.isfinite(values)):
      raise ValidationFailure("State holds non-finite values.")
    if np.min(values) < -NONNEGATIVITY_SLACK:
      raise NegativeData("State has negative densities (min {:.3e}).".format(np.min(values)))
    values.setflags(write=False)
    object.__setattr__(self, 'values', values)

  @property
  def n(self):
    return self.values.shape[0]

  def masses(self):
    return self.values.sum(axis=1) * self.mesh.dx

  def advanced(self, values, dt):
    return State(values=values, mesh=self.mesh, k=self.k + 1, t=self.t + dt)


@dataclass(frozen=True)
class StepReport:
  newton_iterations: int
  final_residual_inf: float
  dt_used: float
  retries: int
  mass_defect: tuple


@dataclass(frozen=True)
class SolverOptions:
  tol_newton: float = 1e-10
  max_newton_iterations: int = 50
  max_retries: int = 4
  tol_neg: float = 1e-12
  tol_mass: float = 1e-10

  @classmethod
  def from_settings(cls, **overrides):
    values = {
      'tol_newton': helpers.get_setting('TOL_NEWTON'),
      'max_newton_iterations': helpers.get_setting('MAX_NEWTON_ITERATIONS'),
      'max_retries': helpers.get_setting('MAX_RETRIES'),
      'tol_neg': helpers.get_setting('TOL_NEG'),
      'tol_mass': helpers.get_setting('TOL_MASS'),
    }
    values.update(overrides)
    return cls(**values)


@dataclass
class Trajectory:
  states: list = field(default_factory=list)
  reports: list = field(default_factory=list)

  @property
  def final(self):
    return self.states[-1]

  @property
  def initial(self):
    return self.states[0]

  def at(self, t, tol=1e-9):
    """ The stored state closest to time t """
    best = min(self.states, key=lambda s: abs(s.t - t))
    if abs(best.t - t) > tol + 0.5 * self._dt():
      raise ValidationFailure("No state stored near t = {}.".format(t))
    return best

  def _dt(self):
    if len(self.states) < 2:
      return 0.0
    return min(b.t - a.t for a, b in zip(self.states, self.states[1:]))


def project_initial(profiles, mesh):
  """ Exact cell averages of the initial profiles, one per species """
  check = Mesh(PROFILE_CHECK_CELLS)
  values = []
  for i, profile in enumerate(profiles):
    if np.min(cell_averages(profile, check)) < -NONNEGATIVITY_SLACK:
      raise NegativeData("Initial datum of species {} takes negative values.".format(i + 1))
    values.append(cell_averages(profile, mesh))
  return State(values=np.array(values), mesh=mesh)


class Scheme:
  """
  The discrete operator for fixed parameters, mesh and kernels. The block
  matrix P with p = P u and its face increments dP are assembled once and
  reused by every step.
  """
  def __init__(self, params, mesh, kernels=None, rule=None):
    self.params = params
    self.mesh = mesh
    self.kernels = kernels if kernels is not None else discretize_kernels(params, mesh)
    self.rule = rule or params.mobility
    for pair in params.pairs():
      if self.kernels[pair].N != mesh.N:
        raise MeshMismatch("Kernel {} is tabulated on {} cells, mesh has {}.".format(pair, self.kernels[pair].N, mesh.N))
    self.P = self._assemble_potential_operator()
    P3 = self.P.reshape(params.n, mesh.N, -1)
    self.dP = np.roll(P3, -1, axis=1) - P3

  @property
  def shape(self):
    return (self.params.n, self.mesh.N)

  def _assemble_potential_operator(self):
    n, N = self.shape
    A = self.params.A
    P = np.zeros((n * N, n * N))
    for i in range(n):
      rows = slice(i * N, (i + 1) * N)
      P[rows, rows] = A[i, i] * np.eye(N)
      for j in range(n):
        if j != i and A[i, j] != 0.0:
          P[rows, j * N:(j + 1) * N] = A[i, j] * self.kernels[(i, j)].matrix
    return P

  def _values(self, u):
    values = u.values if isinstance(u, State) else np.asarray(u, dtype=float)
    if values.shape != self.shape:
      raise MeshMismatch("Expected densities of shape {}, got {}.".format(self.shape, values.shape))
    return values

  ##################
  # Discrete operators
  ##################
  def potential(self, u):
    U = self._values(u)
    return (self.P @ U.ravel()).reshape(self.shape)

  def mobilities(self, U, p):
    dp = np.roll(p, -1, axis=1) - p
    return face_mobility_unchecked(self.rule, U, np.roll(U, -1, axis=1), dp)

  def fluxes(self, u, p=None):
    """ F[i, l] is the flux through face l + 1/2 """
    U = self._values(u)
    p = self.potential(U) if p is None else p
    dx = self.mesh.dx
    dU = np.roll(U, -1, axis=1) - U
    dp = np.roll(p, -1, axis=1) - p
    m = self.mobilities(U, p)
    return -(self.params.sigma / dx) * dU - (m / dx) * dp

  def residual(self, u, u_prev, dt):
    U = self._values(u)
    F = self.fluxes(U)
    return (self.mesh.dx / dt) * (U - self._values(u_prev)) + F - np.roll(F, 1, axis=1)

  def jacobian(self, u, dt):
    """ Exact Jacobian of the residual; the upwind branch is frozen at the current iterate """
    U = self._values(u)
    n, N = self.shape
    dx = self.mesh.dx
    p = self.potential(U)
    dp = np.roll(p, -1, axis=1) - p
    m = self.mobilities(U, p)

    dF = -(m / dx)[:, :, None] * self.dP

    species = np.repeat(np.arange(n), N)
    cells = np.tile(np.arange(N), n)
    own = species * N + cells
    right = species * N + (cells + 1) % N

    sigma = self.params.sigma / dx
    dF[species, cells, right] -= sigma
    dF[species, cells, own] += sigma

    drift = -(dp / dx).ravel()
    if self.rule == UPWIND:
      upwind_column = np.where(dp.ravel() >= 0, right, own)
      dF[species, cells, upwind_column] += drift
    else:
      floor_L = np.maximum(U, POSITIVITY_FLOOR)
      floor_R = np.roll(floor_L, -1, axis=1)
      dL, dR = logmean_partials(floor_L, floor_R)
      dF[species, cells, own] += drift * dL.ravel()
      dF[species, cells, right] += drift * dR.ravel()

    J = (dF - np.roll(dF, 1, axis=1)).reshape(n * N, n * N)
    J[np.diag_indices(n * N)] += dx / dt
    return J

  ##################
  # Nonlinear solve
  ##################
  def _newton(self, U_prev, dt, options):
    tol = options.tol_newton * (self.mesh.dx / dt + 1.0)
    U = U_prev.copy()
    R = self.residual(U, U_prev, dt)
    res_inf = float(np.max(np.abs(R)))
    iterations = 0
    while res_inf > tol:
      if iterations >= options.max_newton_iterations:
        raise NewtonDivergence("Newton did not converge in {} iterations (residual {:.3e}).".format(iterations, res_inf))
      U, R = self._newton_update(U, U_prev, R, dt)
      res_inf = float(np.max(np.abs(R)))
      iterations += 1
      logger.debug("newton %d: |R|_inf = %.3e", iterations, res_inf)

    if np.min(U) < -options.tol_neg:
      for _ in range(POLISH_ITERATIONS):
        try:
          U, R = self._newton_update(U, U_prev, R, dt)
        except NewtonDivergence:
          break
        iterations += 1
      res_inf = float(np.max(np.abs(R)))
    if np.min(U) < -options.tol_neg:
      raise NegativeStateUnrecoverable("Converged state has negative densities (min {:.3e}).".format(np.min(U)))
    U = np.where(U < 0.0, 0.0, U)

    defect = np.abs(U.sum(axis=1) - U_prev.sum(axis=1)) * self.mesh.dx
    masses = U_prev.sum(axis=1) * self.mesh.dx
    if np.any(defect > options.tol_mass * (1.0 + masses)):
      raise MassDefectError("Mass defect {} exceeds tolerance.".format(defect))
    return U, iterations, res_inf

  def _newton_update(self, U, U_prev, R, dt):
    J = self.jacobian(U, dt)
    try:
      delta = scipy.linalg.solve(J, -R.ravel(), check_finite=True).reshape(self.shape)
    except (scipy.linalg.LinAlgError, ValueError) as error:
      raise NewtonDivergence("Linear solve failed: {}".format(error))
    norm0 = np.linalg.norm(R)
    damping = 1.0
    while damping >= MIN_DAMPING:
      U_try = U + damping * delta
      R_try = self.residual(U_try, U_prev, dt)
      if np.all(np.isfinite(R_try)) and np.linalg.norm(R_try) <= (1.0 - ARMIJO * damping) * norm0:
        if damping < 1.0:
          logger.debug("line search accepted damping %.3e", damping)
        return U_try, R_try
      damping *= 0.5
    raise NewtonDivergence("Line search failed to reduce the residual ({:.3e}).".format(norm0))

  def advance(self, U_prev, dt, options):
    """ One implicit step of size dt, halving dt on failure up to max_retries times """
    tally = {'iterations': 0, 'retries': 0, 'dt_used': dt, 'residual': 0.0}
    U = self._advance(U_prev, dt, options, 0, tally)
    defect = np.abs(U.sum(axis=1) - U_prev.sum(axis=1)) * self.mesh.dx
    report = StepReport(newton_iterations=tally['iterations'], final_residual_inf=tally['residual'],
                        dt_used=tally['dt_used'], retries=tally['retries'], mass_defect=tuple(defect))
    return U, report

  def _advance(self, U_prev, dt, options, depth, tally):
    try:
      U, iterations, residual = self._newton(U_prev, dt, options)
    except SolverFailure as failure:
      if depth >= options.max_retries:
        raise
      tally['retries'] += 1
      tally['dt_used'] = min(tally['dt_used'], 0.5 * dt)
      logger.info("step failed at dt = %.3e (%s); retrying with dt/2", dt, failure)
      U_half = self._advance(U_prev, 0.5 * dt, options, depth + 1, tally)
      return self._advance(U_half, 0.5 * dt, options, depth + 1, tally)
    tally['iterations'] += iterations
    tally['residual'] = max(tally['residual'], residual)
    return U


def nonlocal_p(state, params, kernels):
  return Scheme(params, state.mesh, kernels).potential(state)


def face_fluxes(state, p, params, rule=None, kernels=None):
  return Scheme(params, state.mesh, kernels, rule).fluxes(state, p)


def residual(u_candidate, u_prev, dt, params, kernels=None, rule=None):
  if u_candidate.mesh.N != u_prev.mesh.N:
    raise MeshMismatch("Candidate and previous state live on different meshes.")
  return Scheme(params, u_candidate.mesh, kernels, rule).residual(u_candidate, u_prev, dt)


def step(u_prev, dt, params, kernels=None, rule=None, options=None, scheme=None):
  """ Advance one implicit Euler step; returns the new state and its StepReport """
  scheme = scheme or Scheme(params, u_prev.mesh, kernels, rule)
  options = options or SolverOptions.from_settings()
  try:
    U, report = scheme.advance(np.array(u_prev.values), dt, options)
  except SolverFailure as failure:
    failure.report = {'k': u_prev.k, 't': u_prev.t, 'dt': dt}
    raise
  return u_prev.advanced(U, dt), report


def run(u0, time_grid, params, kernels=None, rule=None, options=None, snapshot_times=None, keep_every=1):
  """
  Integrate the projected initial state u0 over time_grid. Every
  keep_every-th state is stored, plus the states closest to snapshot_times
  and the final one; keep_every=0 stores only those.
  """
  if not isinstance(u0, State):
    raise ValidationFailure("run() expects a projected initial State.")
  if not isinstance(time_grid, TimeGrid):
    raise ValidationFailure("run() expects a TimeGrid.")
  scheme = Scheme(params, u0.mesh, kernels, rule)
  options = options or SolverOptions.from_settings()
  dt = time_grid.dt
  wanted = set()
  for t in snapshot_times or ():
    wanted.add(int(round(t / dt)) if dt else 0)

  trajectory = Trajectory(states=[u0])
  state = u0
  for k in range(1, time_grid.Nt + 1):
    state, report = step(state, dt, params, options=options, scheme=scheme)
    trajectory.reports.append(report)
    if (keep_every and k % keep_every == 0) or k in wanted or k == time_grid.Nt:
      trajectory.states.append(state)
  return trajectory
