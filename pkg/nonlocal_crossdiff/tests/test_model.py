import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.django import TestCase
from hypothesis.extra.numpy import arrays

from nonlocal_crossdiff import kernel, model
from nonlocal_crossdiff.entropy import gradient_form
from nonlocal_crossdiff.exceptions import DetailedBalanceViolation, HypothesisH3Violation, ValidationFailure
from nonlocal_crossdiff.grid import Mesh, seminorm_w1q
from nonlocal_crossdiff.kernel import KernelSpec
from nonlocal_crossdiff.model import ModelParams
from nonlocal_crossdiff.scheme import State

INDICATOR = KernelSpec(shape=kernel.INDICATOR, radius=0.3)


def two_species(mode=model.STRICT, spec=INDICATOR, **kwargs):
  return ModelParams(n=2, A=[[0.1251, 0.25], [1.0, 2.0]], pi=[4.0, 1.0], sigma=1e-4,
                     kernels={(0, 1): spec}, hypothesis_mode=mode, **kwargs)


def three_species(mode=model.STRICT, spec=INDICATOR):
  return ModelParams(n=3, A=[[0.5, 0.2, 0.125], [0.4, 1.0, 0.2], [0.25, 0.2, 1.0]], pi=[4.0, 2.0, 2.0],
                     sigma=1e-4, kernels={(0, 1): spec, (0, 2): spec, (1, 2): spec}, hypothesis_mode=mode)


class ModelParamsTestCase(TestCase):
  def test_invalid_params(self):
    """ Assert malformed parameters are rejected at construction """
    with self.assertRaises(ValidationFailure):
      ModelParams(n=2, A=[[1, 0], [0, 1]], pi=[1.0, 0.0], sigma=0.1, kernels={(0, 1): INDICATOR})
    with self.assertRaises(ValidationFailure):
      ModelParams(n=2, A=[[1, 0, 0], [0, 1, 0]], pi=[1.0, 1.0], sigma=0.1, kernels={(0, 1): INDICATOR})
    with self.assertRaises(ValidationFailure):
      ModelParams(n=2, A=[[1, 0], [0, 1]], pi=[1.0, 1.0], sigma=-1.0, kernels={(0, 1): INDICATOR})
    with self.assertRaises(ValidationFailure):
      ModelParams(n=2, A=[[1, 0], [0, 1]], pi=[1.0, 1.0], sigma=0.1, kernels={})
    with self.assertRaises(ValidationFailure):
      two_species(mobility='harmonic')

  def test_reflected_kernels(self):
    """ Assert a kernel given for (i, j) only is reflected for (j, i) """
    weights = np.zeros(8)
    weights[1] = 8.0
    params = two_species(mode=model.WARN, spec=KernelSpec(shape=kernel.TABULATED, weights=tuple(weights)))
    tabulated = model.discretize_kernels(params, Mesh(8))
    self.assertTrue(tabulated[(1, 0)].weights[7] == 8.0)


class KernelSymmetryTestCase(TestCase):
  def test_uneven_tabulated_kernel(self):
    """ Assert a tabulated kernel with all its mass at offset +1 is flagged as not even """
    weights = np.zeros(8)
    weights[1] = 1.0
    params = two_species(mode=model.WARN, spec=KernelSpec(shape=kernel.TABULATED, weights=tuple(weights)))
    with self.assertLogs('nonlocal_crossdiff.model', level='WARNING') as logs:
      report = model.validate(params, model.discretize_kernels(params, Mesh(8)))
    self.assertTrue(report.uneven_pairs == ((1, 2),) and report.asymmetric_pairs == ())
    self.assertTrue(not report.satisfied)
    self.assertTrue(any('not even' in line for line in logs.output))

  def test_even_kernels(self):
    """ Assert built-in kernels and even tabulated weights pass the symmetry check """
    weights = (2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
    for spec in (INDICATOR, KernelSpec(shape=kernel.TABULATED, weights=weights)):
      params = two_species(mode=model.WARN, spec=spec)
      report = model.validate(params, model.discretize_kernels(params, Mesh(8)))
      self.assertTrue(report.uneven_pairs == ())


class DetailedBalanceTestCase(TestCase):
  def test_registry_weights(self):
    """ Assert the two- and three-species weights balance exactly """
    self.assertTrue(model.check_detailed_balance(two_species()) == 0.0)
    self.assertTrue(model.check_detailed_balance(three_species()) == 0.0)

  def test_symmetric_matrix(self):
    """ Assert symmetric A with unit weights is balanced """
    params = ModelParams(n=2, A=[[1.0, 0.3], [0.3, 1.0]], pi=[1.0, 1.0], sigma=0.0, kernels={(0, 1): INDICATOR})
    self.assertTrue(model.check_detailed_balance(params) == 0.0)

  def test_violation(self):
    """ Assert unbalanced weights raise in strict mode and are reported in warn mode """
    A = [[1.0, 0.5], [0.3, 1.0]]
    with self.assertRaises(DetailedBalanceViolation):
      model.check_detailed_balance(ModelParams(n=2, A=A, pi=[1.0, 1.0], sigma=0.0, kernels={(0, 1): INDICATOR}))
    params = ModelParams(n=2, A=A, pi=[1.0, 1.0], sigma=0.0, kernels={(0, 1): INDICATOR}, hypothesis_mode=model.WARN)
    self.assertTrue(abs(model.check_detailed_balance(params) - 0.2) < 1e-15)
    report = model.validate(params, model.discretize_kernels(params, Mesh(10)))
    self.assertTrue(not report.balanced and not report.satisfied)


class PairMatrixTestCase(TestCase):
  def test_examples(self):
    """ Assert assembled pair matrices for b = 1 and b = 0 """
    params = two_species()
    self.assertTrue(np.allclose(model.assemble_pair_matrix(params, 0, 1, 1.0), [[0.5004, 1.0], [1.0, 2.0]]))
    self.assertTrue(np.allclose(model.assemble_pair_matrix(params, 0, 1, 0.0), [[0.5004, 0.0], [0.0, 2.0]]))
    with self.assertRaises(ValidationFailure):
      model.assemble_pair_matrix(params, 1, 0, 1.0)

  def test_three_species_factor(self):
    """ Assert the (n - 1) factor on the off-diagonal entries """
    M = model.assemble_pair_matrix(three_species(), 0, 1, 0.5)
    self.assertTrue(np.allclose(M, [[2.0, 0.8], [0.8, 2.0]]))

  def test_symmetric_under_detailed_balance(self):
    """ Assert pair matrices are exactly symmetric when detailed balance holds """
    params = three_species()
    for i, j in ((0, 1), (0, 2), (1, 2)):
      for b in (0.0, 0.25, 1.0, 3.7):
        M = model.assemble_pair_matrix(params, i, j, b)
        self.assertTrue(M[0, 1] == M[1, 0])


class CoercivityTestCase(TestCase):
  def test_indicator_kernel(self):
    """ Assert c_M for the two-species indicator test case """
    params = two_species()
    report = model.coercivity_constant(params, model.discretize_kernels(params, Mesh(32)))
    expected = 0.5 * 2.5004 - np.sqrt(0.25 * 2.5004 ** 2 - 8e-4)
    self.assertTrue(report.satisfied and abs(report.c_M - expected) < 1e-12)
    self.assertTrue(abs(report.c_M - 3.2e-4) < 1e-6)

  def test_zero_kernel_offsets(self):
    """ Assert uncoupled species give c_M = min(pi_i a_ii, pi_j a_jj) """
    params = ModelParams(n=2, A=[[1.0, 0.0], [0.0, 3.0]], pi=[1.0, 1.0], sigma=0.0, kernels={(0, 1): INDICATOR})
    report = model.coercivity_constant(params, model.discretize_kernels(params, Mesh(10)))
    self.assertTrue(report.c_M == 1.0)

  def test_segregation_parameters(self):
    """ Assert the segregation parameters violate positive definiteness """
    spec = KernelSpec(shape=kernel.INDICATOR, radius=0.1, height=100.0)
    params = ModelParams(n=2, A=np.ones((2, 2)), pi=[1.0, 1.0], sigma=0.0, kernels={(0, 1): spec},
                         hypothesis_mode=model.WARN)
    kernels = model.discretize_kernels(params, Mesh(64))
    report = model.coercivity_constant(params, kernels)
    self.assertTrue(report.c_M < 0 and not report.satisfied)
    strict = ModelParams(n=2, A=np.ones((2, 2)), pi=[1.0, 1.0], sigma=0.0, kernels={(0, 1): spec})
    with self.assertRaises(HypothesisH3Violation):
      model.coercivity_constant(strict, kernels)

  def test_dirac_not_applicable(self):
    """ Assert c_M is not applicable for Dirac cross kernels """
    params = three_species(mode=model.WARN, spec=KernelSpec(shape=kernel.DIRAC))
    report = model.coercivity_constant(params, model.discretize_kernels(params, Mesh(16)))
    self.assertTrue(report.c_M is None and not report.applicable)

  @settings(max_examples=500, deadline=None)
  @given(st.sampled_from((2, 3)), st.sampled_from((8, 31, 64)), st.data())
  def test_quadratic_form_bounds(self, n, N, data):
    """ Assert Q(v) >= 0 and Q(v) >= c_M sum_i |v_i|_{1,2}^2 on nonnegative field tuples """
    params = two_species() if n == 2 else three_species()
    mesh = Mesh(N)
    kernels = model.discretize_kernels(params, mesh)
    c_M = model.coercivity_constant(params, kernels).c_M
    V = data.draw(arrays(np.float64, (n, N), elements=st.floats(0.0, 10.0)))
    Q = gradient_form(State(values=V, mesh=mesh), params, kernels)
    energy = sum(seminorm_w1q(v, 2, mesh) ** 2 for v in V)
    self.assertTrue(Q >= -1e-12)
    self.assertTrue(Q >= c_M * energy - 1e-9 * (1 + energy))
