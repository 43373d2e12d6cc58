"""
Uniform periodic mesh of the unit torus and the discrete norms of
piecewise constant fields.

Cells are K_l = ((l - 1/2) dx, (l + 1/2) dx) with centers x_l = l dx for
l = 0..N-1; every index is taken modulo N. A field is a plain numpy vector
with one value per cell.
"""
from dataclasses import dataclass

import numpy as np

from nonlocal_crossdiff.exceptions import MeshMismatch, ValidationFailure


@dataclass(frozen=True)
class Mesh:
  N: int

  def __post_init__(self):
    if int(self.N) != self.N or self.N < 3:
      raise ValidationFailure("Mesh needs an integer cell count N >= 3, got {}.".format(self.N))

  @property
  def dx(self):
    return 1.0 / self.N

  @property
  def centers(self):
    return np.arange(self.N) * self.dx

  @property
  def faces(self):
    """ Left cell faces x_{l-1/2}; face l+1/2 is faces[l] + dx """
    return (np.arange(self.N) - 0.5) * self.dx


@dataclass(frozen=True)
class TimeGrid:
  T: float
  Nt: int

  def __post_init__(self):
    if self.T <= 0:
      raise ValidationFailure("End time must be positive.")
    if int(self.Nt) != self.Nt or self.Nt < 0:
      raise ValidationFailure("Step count must be a nonnegative integer.")

  @classmethod
  def from_step(cls, T, dt):
    if dt <= 0:
      raise ValidationFailure("Time step must be positive.")
    return cls(T=T, Nt=int(round(T / dt)))

  @property
  def dt(self):
    return self.T / self.Nt if self.Nt else 0.0

  def times(self):
    return np.arange(self.Nt + 1) * self.dt


def as_field(values, mesh):
  v = np.asarray(values, dtype=float)
  if v.ndim != 1 or v.shape[0] != mesh.N:
    raise MeshMismatch("Field of shape {} does not live on a mesh of {} cells.".format(v.shape, mesh.N))
  return v


def diff(v, mesh):
  """ D_l v = (v_{l+1} - v_l) / dx with periodic wraparound """
  v = as_field(v, mesh)
  return (np.roll(v, -1) - v) / mesh.dx


def _check_exponent(q):
  if q == np.inf or q == 'inf':
    return np.inf
  q = float(q)
  if q < 1:
    raise ValidationFailure("Norm exponent must satisfy q >= 1, got {}.".format(q))
  return q


def norm_lq(v, q, mesh=None):
  """ (sum dx |v_l|^q)^(1/q); q = inf gives max |v_l| """
  v = np.asarray(v, dtype=float)
  if mesh is not None:
    v = as_field(v, mesh)
  q = _check_exponent(q)
  if q == np.inf:
    return float(np.max(np.abs(v)))
  dx = 1.0 / v.shape[0]
  return float(np.sum(dx * np.abs(v) ** q) ** (1.0 / q))


def seminorm_w1q(v, q, mesh):
  return norm_lq(diff(v, mesh), q)


def norm_w1q(v, q, mesh):
  """ Full discrete W^{1,q} norm (|v|_{1,q}^q + ||v||_{0,q}^q)^(1/q) """
  q = _check_exponent(q)
  if q == np.inf:
    return max(seminorm_w1q(v, q, mesh), norm_lq(v, q, mesh))
  return (seminorm_w1q(v, q, mesh) ** q + norm_lq(v, q, mesh) ** q) ** (1.0 / q)


def bv_norm(v, mesh):
  return norm_lq(v, 1, mesh) + seminorm_w1q(v, 1, mesh)


def mass(v, mesh):
  """ Integral of a piecewise constant field over the torus """
  return float(np.sum(as_field(v, mesh)) * mesh.dx)
