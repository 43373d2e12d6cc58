"""
Initial profiles on the torus. Each term knows the exact integral of its
periodic extension over any interval, so cell averages are exact.
"""
from dataclasses import dataclass
from functools import partial

import numpy as np
from numpy.polynomial.legendre import leggauss

from nonlocal_crossdiff.exceptions import NegativeData, ValidationFailure

TWO_PI = 2.0 * np.pi

# periodic images scanned by compactly supported terms
IMAGES = (-2, -1, 0, 1, 2)


@dataclass(frozen=True)
class Constant:
  value: float

  def integral(self, a, b):
    return self.value * (b - a)


@dataclass(frozen=True)
class Indicator:
  """ height on [lo, hi] (0 <= lo < hi <= 1), zero elsewhere """
  lo: float
  hi: float
  height: float = 1.0

  def __post_init__(self):
    if not 0 <= self.lo < self.hi <= 1:
      raise ValidationFailure("Indicator bounds must satisfy 0 <= lo < hi <= 1.")

  def integral(self, a, b):
    total = 0.0
    for k in IMAGES:
      total = total + np.clip(b - k, self.lo, self.hi) - np.clip(a - k, self.lo, self.hi)
    return self.height * total


@dataclass(frozen=True)
class Hat:
  """ height * max(1 - d(x, center) / half_width, 0) with d the torus distance """
  center: float
  half_width: float
  height: float = 1.0

  def __post_init__(self):
    if not 0 < self.half_width <= 0.5:
      raise ValidationFailure("Hat half width must lie in (0, 1/2].")

  def _primitive(self, y):
    c = np.clip(y - self.center, -self.half_width, self.half_width)
    return c - np.sign(c) * c * c / (2.0 * self.half_width)

  def integral(self, a, b):
    total = 0.0
    for k in IMAGES:
      total = total + self._primitive(b - k) - self._primitive(a - k)
    return self.height * total


@dataclass(frozen=True)
class Cosine:
  """ amplitude * cos(2 pi frequency x + phase), frequency a positive integer """
  amplitude: float
  frequency: int = 1
  phase: float = 0.0

  def __post_init__(self):
    if int(self.frequency) != self.frequency or self.frequency < 1:
      raise ValidationFailure("Cosine frequency must be a positive integer.")

  def integral(self, a, b):
    w = TWO_PI * self.frequency
    return self.amplitude * (np.sin(w * b + self.phase) - np.sin(w * a + self.phase)) / w


@dataclass(frozen=True)
class Sampled:
  """ Any callable profile, averaged with composite Gauss-Legendre quadrature """
  function: object
  nodes: int = 16
  subdivisions: int = 8

  def integral(self, a, b):
    x, w = leggauss(self.nodes)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    total = np.zeros(np.broadcast(a, b).shape)
    h = (b - a) / self.subdivisions
    for s in range(self.subdivisions):
      left = a + s * h
      y = left[..., None] + 0.5 * h[..., None] * (x + 1.0)
      values = np.asarray(self.function(y % 1.0), dtype=float)
      if np.any(values < 0):
        raise NegativeData("Initial data must be nonnegative.")
      total = total + 0.5 * h * (values @ w)
    return total


@dataclass(frozen=True)
class Profile:
  """ Sum of terms describing one species """
  terms: tuple

  def integral(self, a, b):
    return sum(term.integral(a, b) for term in self.terms)


def cell_averages(profile, mesh):
  """ (1/dx) * integral over K_l of the profile """
  left = (np.arange(mesh.N) - 0.5) * mesh.dx
  return np.asarray(profile.integral(left, left + mesh.dx), dtype=float) / mesh.dx


def sampled(values):
  """ Periodic piecewise linear interpolant of point values at x_k = k / len(values) """
  samples = np.asarray(values, dtype=float)
  if samples.ndim != 1 or len(samples) < 2:
    raise ValidationFailure("Sampled data needs at least two point values.")
  if np.any(samples < 0):
    raise NegativeData("Initial data must be nonnegative.")
  nodes = np.arange(len(samples)) / len(samples)
  return Sampled(function=partial(np.interp, xp=nodes, fp=samples, period=1.0))


TERM_TYPES = {
  'constant': Constant,
  'indicator': Indicator,
  'hat': Hat,
  'cosine': Cosine,
  'sampled': sampled,
}


def term_from_dict(data):
  data = dict(data)
  kind = data.pop('type')
  if kind not in TERM_TYPES:
    raise ValidationFailure("Unknown initial term '{}'.".format(kind))
  return TERM_TYPES[kind](**data)


def profile_from_terms(terms):
  return Profile(terms=tuple(term_from_dict(t) for t in terms))
