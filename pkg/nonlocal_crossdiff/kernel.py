"""
Interaction kernels on the torus and their exact cell averages

  B_m = (1/dx) * integral of B over K_m = ((m - 1/2) dx, (m + 1/2) dx)

read periodically. The periodic discrete convolution

  (K * v)_l = sum_l' dx B_{l - l'} v_l'

is applied through the circulant matrix of the weights.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import circulant
from scipy.special import erf

from nonlocal_crossdiff.exceptions import KernelError, MeshMismatch
from nonlocal_crossdiff.grid import as_field

logger = logging.getLogger(__name__)

DIRAC = 'dirac'
INDICATOR = 'indicator'
TRIANGLE = 'triangle'
GAUSSIAN = 'gaussian'
TABULATED = 'tabulated'
CALLABLE = 'callable'

SHAPES = (DIRAC, INDICATOR, TRIANGLE, GAUSSIAN, TABULATED)

# Gauss-Legendre nodes per sub-interval for callable kernels
QUADRATURE_NODES = 16

# erfc(5.6) < 1e-14: Gaussian images farther than this many widths are dropped
GAUSSIAN_TAIL_WIDTHS = 5.6 * np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class KernelSpec:
  """
  Analytic description of a kernel in torus units.

  indicator: height * 1_(-radius, radius)
  triangle:  height * max(1 - |z| / radius, 0)
  gaussian:  exp(-z^2 / 2 width^2) / sqrt(2 pi width^2)
  unit_mass replaces height by the value giving integral one.
  """
  shape: str
  radius: float = None
  height: float = 1.0
  width: float = None
  unit_mass: bool = False
  weights: tuple = None
  function: object = field(default=None, repr=False)

  def __post_init__(self):
    if self.shape not in SHAPES + (CALLABLE,):
      raise KernelError("Unknown kernel shape '{}'.".format(self.shape))
    if self.shape in (INDICATOR, TRIANGLE):
      if self.radius is None or not 0 < self.radius <= 0.5:
        raise KernelError("Kernel radius must lie in (0, 1/2], got {}.".format(self.radius))
      if self.height < 0:
        raise KernelError("Kernel height must be nonnegative.")
    if self.shape == GAUSSIAN and (self.width is None or self.width <= 0):
      raise KernelError("Gaussian width must be positive.")
    if self.shape == TABULATED:
      if self.weights is None:
        raise KernelError("Tabulated kernels need weights.")
      if np.any(np.asarray(self.weights, dtype=float) < 0):
        raise KernelError("Tabulated kernel weights must be nonnegative.")
    if self.shape == CALLABLE and not callable(self.function):
      raise KernelError("Callable kernels need a function of the offset.")

  @property
  def effective_height(self):
    if not self.unit_mass:
      return self.height
    if self.shape == INDICATOR:
      return 1.0 / (2.0 * self.radius)
    if self.shape == TRIANGLE:
      return 1.0 / self.radius
    return self.height

  def antiderivative(self, y):
    """ A primitive of the non-periodized profile """
    if self.shape == INDICATOR:
      return self.effective_height * np.clip(y, -self.radius, self.radius)
    if self.shape == TRIANGLE:
      c = np.clip(y, -self.radius, self.radius)
      return self.effective_height * (c - np.sign(c) * c * c / (2.0 * self.radius))
    if self.shape == GAUSSIAN:
      return 0.5 * erf(y / (np.sqrt(2.0) * self.width))
    raise KernelError("Kernel shape '{}' has no closed-form primitive.".format(self.shape))

  def image_count(self):
    """ Number of periodic images needed on each side """
    if self.shape == GAUSSIAN:
      return int(np.ceil(GAUSSIAN_TAIL_WIDTHS * self.width + 1.0))
    return 1


def localization_kernel(shape, alpha):
  """ Unit-mass kernel of scale alpha, tending to the Dirac mass as alpha -> 0 """
  if alpha == 0 or shape == DIRAC:
    return KernelSpec(shape=DIRAC)
  if shape == GAUSSIAN:
    return KernelSpec(shape=GAUSSIAN, width=alpha)
  return KernelSpec(shape=shape, radius=alpha, unit_mass=True)


def representative_offsets(N):
  """ Offset m mapped into [-N/2, N/2) """
  m = np.arange(N)
  return (m + N // 2) % N - N // 2


@dataclass(frozen=True, eq=False)
class DiscreteKernel:
  mode: str
  N: int
  weights: np.ndarray = None

  def __post_init__(self):
    if self.mode not in (DIRAC, TABULATED):
      raise KernelError("Discrete kernels are either 'dirac' or 'tabulated'.")
    if self.mode == TABULATED:
      w = np.asarray(self.weights, dtype=float)
      if w.shape != (self.N,):
        raise KernelError("Expected {} kernel weights, got shape {}.".format(self.N, w.shape))
      if np.any(w < 0):
        raise KernelError("Kernel weights must be nonnegative.")
      w.setflags(write=False)
      object.__setattr__(self, 'weights', w)

  @property
  def dx(self):
    return 1.0 / self.N

  @property
  def is_dirac(self):
    return self.mode == DIRAC

  @cached_property
  def matrix(self):
    """ C[l, l'] = dx * B_{(l - l') mod N}; the identity for a Dirac kernel """
    if self.is_dirac:
      return np.eye(self.N)
    return self.dx * circulant(self.weights)

  def convolve(self, v):
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != self.N:
      raise MeshMismatch("Kernel lives on {} cells, field on {}.".format(self.N, v.shape[-1]))
    if self.is_dirac:
      return v.copy()
    return self.matrix @ v

  def transposed(self):
    if self.is_dirac:
      return self
    return DiscreteKernel(mode=TABULATED, N=self.N, weights=np.roll(self.weights[::-1], 1))

  def total_mass(self):
    if self.is_dirac:
      return 1.0
    return float(self.dx * np.sum(self.weights))

  def is_even(self, rtol=1e-13):
    if self.is_dirac:
      return True
    scale = max(float(np.max(self.weights)), 1.0)
    return bool(np.all(np.abs(self.weights - self.transposed().weights) <= rtol * scale))

  def rows(self):
    """ (offset_index, offset_x, weight) rows for the kernel dump """
    if self.is_dirac:
      return [{'offset_index': 0, 'offset_x': 0.0, 'weight': float('inf')}]
    offsets = representative_offsets(self.N)
    return [{'offset_index': int(m), 'offset_x': float(offsets[m] * self.dx), 'weight': float(w)}
            for m, w in enumerate(self.weights)]


def _average_closed_form(spec, mesh):
  m = representative_offsets(mesh.N)
  left = (m - 0.5) * mesh.dx
  right = (m + 0.5) * mesh.dx
  total = np.zeros(mesh.N)
  k_max = spec.image_count()
  # Sum the smallest contributions first
  for k in sorted(range(-k_max, k_max + 1), key=abs, reverse=True):
    total += spec.antiderivative(right + k) - spec.antiderivative(left + k)
  return total / mesh.dx


def _average_quadrature(function, mesh, subdivisions=4):
  """ Composite Gauss-Legendre cell averages of a callable on (-1/2, 1/2] """
  nodes, node_weights = leggauss(QUADRATURE_NODES)
  m = representative_offsets(mesh.N)
  h = mesh.dx / subdivisions
  averages = np.zeros(mesh.N)
  for s in range(subdivisions):
    a = (m - 0.5) * mesh.dx + s * h
    y = a[:, None] + 0.5 * h * (nodes[None, :] + 1.0)
    y = (y + 0.5) % 1.0 - 0.5
    values = np.asarray(function(y), dtype=float)
    if np.any(values < 0):
      raise KernelError("Callable kernel took negative values.")
    averages += 0.5 * h * values @ node_weights
  return averages / mesh.dx


def cell_average(spec, mesh):
  """ Tabulate a kernel on the mesh """
  if spec.shape == DIRAC:
    return DiscreteKernel(mode=DIRAC, N=mesh.N)
  if spec.shape == TABULATED:
    weights = np.asarray(spec.weights, dtype=float)
    if weights.shape != (mesh.N,):
      raise KernelError("Tabulated kernel has {} weights for a mesh of {} cells.".format(weights.shape[0], mesh.N))
    return DiscreteKernel(mode=TABULATED, N=mesh.N, weights=weights)
  if spec.shape == CALLABLE:
    return DiscreteKernel(mode=TABULATED, N=mesh.N, weights=_average_quadrature(spec.function, mesh))
  weights = _average_closed_form(spec, mesh)
  # Round-off in the primitive differences can leave -1e-17 on empty cells
  weights[np.abs(weights) < 1e-15 * max(1.0, float(np.max(weights)))] = 0.0
  return DiscreteKernel(mode=TABULATED, N=mesh.N, weights=weights)


def convolve(kernel, v):
  return kernel.convolve(v)


def transpose_kernel(kernel):
  return kernel.transposed()


def lp_norm(kernel, p):
  """ Discrete L^p norm of the weights """
  w = np.abs(kernel.weights)
  if p == np.inf:
    return float(np.max(w))
  return float(np.sum(kernel.dx * w ** p) ** (1.0 / p))
