import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.django import TestCase
from hypothesis.extra.numpy import arrays

from nonlocal_crossdiff import kernel
from nonlocal_crossdiff.exceptions import KernelError, MeshMismatch
from nonlocal_crossdiff.grid import Mesh, norm_lq
from nonlocal_crossdiff.kernel import DiscreteKernel, KernelSpec


@st.composite
def kernels_and_fields(draw, min_N=3, max_N=64):
  """ A tabulated kernel with some empty offsets and a signed field on the same mesh """
  N = draw(st.integers(min_N, max_N))
  weights = draw(arrays(np.float64, N, elements=st.floats(0.0, 10.0)))
  weights[draw(arrays(np.bool_, N))] = 0.0
  v = draw(arrays(np.float64, N, elements=st.floats(-10.0, 10.0)))
  return DiscreteKernel(mode=kernel.TABULATED, N=N, weights=weights), v


class CellAverageTestCase(TestCase):
  def test_indicator_overlaps(self):
    """ Assert indicator r = 0.3 on ten cells averages to its exact overlap lengths """
    K = kernel.cell_average(KernelSpec(shape=kernel.INDICATOR, radius=0.3), Mesh(10))
    self.assertTrue(np.allclose(K.weights, [1, 1, 1, 0.5, 0, 0, 0, 0.5, 1, 1], atol=1e-14))
    self.assertTrue(abs(K.total_mass() - 0.6) < 1e-14)

  def test_indicator_three_cells_wide(self):
    """ Assert indicator r = 3dx/2 covers offsets 0 and +-1 only """
    for N in (6, 11, 40):
      K = kernel.cell_average(KernelSpec(shape=kernel.INDICATOR, radius=1.5 / N), Mesh(N))
      expected = np.zeros(N)
      expected[[0, 1, N - 1]] = 1.0
      self.assertTrue(np.allclose(K.weights, expected, atol=1e-12))

  def test_triangle_and_gaussian_masses(self):
    """ Assert the averaged triangle and Gaussian keep their integrals """
    mesh = Mesh(64)
    triangle = kernel.cell_average(KernelSpec(shape=kernel.TRIANGLE, radius=0.3, height=2.0), mesh)
    self.assertTrue(abs(triangle.total_mass() - 0.6) < 1e-13)
    self.assertTrue(triangle.is_even())
    gaussian = kernel.cell_average(KernelSpec(shape=kernel.GAUSSIAN, width=1e-3), mesh)
    self.assertTrue(abs(gaussian.total_mass() - 1.0) < 1e-13)
    self.assertTrue(gaussian.weights[0] > 63.9)
    wide = kernel.cell_average(KernelSpec(shape=kernel.GAUSSIAN, width=0.4), mesh)
    self.assertTrue(abs(wide.total_mass() - 1.0) < 1e-13)

  def test_localization_kernels_have_unit_mass(self):
    """ Assert the localization family integrates to one for every scale """
    mesh = Mesh(128)
    for shape in (kernel.INDICATOR, kernel.TRIANGLE, kernel.GAUSSIAN):
      for alpha in (0.5, 0.1, 1.0 / 64):
        K = kernel.cell_average(kernel.localization_kernel(shape, alpha), mesh)
        self.assertTrue(abs(K.total_mass() - 1.0) < 1e-12)
    self.assertTrue(kernel.localization_kernel(kernel.INDICATOR, 0).shape == kernel.DIRAC)

  def test_callable_kernel(self):
    """ Assert quadrature averages of a callable match the closed form """
    mesh = Mesh(20)
    spec = KernelSpec(shape=kernel.CALLABLE, function=lambda z: np.maximum(1 - np.abs(z) / 0.3, 0.0))
    closed = kernel.cell_average(KernelSpec(shape=kernel.TRIANGLE, radius=0.3), mesh)
    self.assertTrue(np.allclose(kernel.cell_average(spec, mesh).weights, closed.weights, atol=1e-4))

  def test_invalid_specs(self):
    """ Assert radius > 1/2 and negative tabulated weights are rejected """
    with self.assertRaises(KernelError):
      KernelSpec(shape=kernel.INDICATOR, radius=0.6)
    with self.assertRaises(KernelError):
      KernelSpec(shape=kernel.TABULATED, weights=(1.0, -1.0, 0.0))
    with self.assertRaises(KernelError):
      KernelSpec(shape='boxcar', radius=0.1)
    with self.assertRaises(KernelError):
      kernel.cell_average(KernelSpec(shape=kernel.TABULATED, weights=(1.0, 0.0, 0.0)), Mesh(4))


class ConvolveTestCase(TestCase):
  def setUp(self):
    self.mesh = Mesh(10)
    self.K = kernel.cell_average(KernelSpec(shape=kernel.INDICATOR, radius=0.3), self.mesh)

  def test_constant_field(self):
    """ Assert convolving a constant multiplies it by the kernel mass """
    self.assertTrue(np.allclose(kernel.convolve(self.K, np.full(10, 2.0)), 1.2))

  def test_unit_mass_at_cell_zero(self):
    """ Assert convolving a discrete unit mass reproduces the kernel profile """
    v = np.zeros(10)
    v[0] = 10.0
    self.assertTrue(np.allclose(kernel.convolve(self.K, v), self.K.weights))

  def test_dirac_is_identity(self):
    """ Assert Dirac convolution returns the field unchanged """
    dirac = kernel.cell_average(KernelSpec(shape=kernel.DIRAC), self.mesh)
    v = np.random.default_rng(4).random(10)
    self.assertTrue(np.array_equal(kernel.convolve(dirac, v), v))

  def test_mesh_mismatch(self):
    """ Assert fields on another mesh are rejected """
    with self.assertRaises(MeshMismatch):
      kernel.convolve(self.K, np.ones(8))

  def test_transpose(self):
    """ Assert transpose reflects offsets and is an involution """
    weights = np.zeros(8)
    weights[1] = 1.0
    K = DiscreteKernel(mode=kernel.TABULATED, N=8, weights=weights)
    T = kernel.transpose_kernel(K)
    self.assertTrue(T.weights[7] == 1.0 and np.sum(T.weights) == 1.0)
    self.assertTrue(np.array_equal(T.transposed().weights, K.weights))
    self.assertTrue(np.array_equal(self.K.transposed().weights, self.K.weights))

  @settings(max_examples=1000, deadline=None)
  @given(kernels_and_fields(min_N=4))
  def test_commutation_identity(self, case):
    """ Assert differencing commutes with the discrete convolution """
    K, v = case
    N = K.N
    l = np.arange(N)[:, None]
    lp = np.arange(N)[None, :]
    B = K.weights
    left = np.sum((B[(l + 1 - lp) % N] - B[(l - lp) % N]) * v[None, :], axis=1)
    right = np.sum(B[(l - lp) % N] * (np.roll(v, -1) - v)[None, :], axis=1)
    self.assertTrue(np.max(np.abs(left - right)) <= 1e-13 * max(1.0, np.sum(B) * np.max(np.abs(v))))

  @settings(max_examples=1000, deadline=None)
  @given(kernels_and_fields(max_N=50), st.sampled_from(((1, 2, 2), (2, 1, 2), (1, 1, 1))))
  def test_young_inequality(self, case, exponents):
    """ Assert ||K * v||_r <= ||B||_p ||v||_q for 1 + 1/r = 1/p + 1/q """
    K, v = case
    p, q, r = exponents
    lhs = norm_lq(K.convolve(v), r)
    self.assertTrue(lhs <= kernel.lp_norm(K, p) * norm_lq(v, q) * (1 + 1e-12) + 1e-15)

  @settings(max_examples=200, deadline=None)
  @given(kernels_and_fields(max_N=50))
  def test_mass_identity(self, case):
    """ Assert the convolution integrates to kernel mass times field mass """
    K, v = case
    N = K.N
    scale = 1.0 + K.total_mass() * np.max(np.abs(v))
    self.assertTrue(abs(np.sum(K.convolve(v)) / N - K.total_mass() * np.sum(v) / N) <= 1e-12 * scale)

  def test_kernel_dump_rows(self):
    """ Assert kernel dump rows carry centered offsets """
    rows = self.K.rows()
    self.assertTrue(len(rows) == 10)
    self.assertTrue(abs(rows[3]['offset_x'] - 0.3) < 1e-15)
    self.assertTrue(rows[7]['offset_index'] == 7 and abs(rows[7]['offset_x'] + 0.3) < 1e-15)
