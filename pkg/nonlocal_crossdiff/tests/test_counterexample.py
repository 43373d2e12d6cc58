import numpy as np

from django.test import TestCase

from nonlocal_crossdiff import counterexample
from nonlocal_crossdiff.exceptions import ValidationFailure


class ExactMatrixTestCase(TestCase):
  def test_band_entries(self):
    """ Assert the exact pair matrix has entries dx^2, 7/8 dx^2 and 1/8 dx^2 on its band """
    for N in (6, 8, 20):
      M = counterexample.build_exact_matrix(N)
      dx2 = M.dx ** 2
      self.assertTrue(abs(M.entry(0) - dx2) < 1e-15)
      self.assertTrue(abs(M.entry(1) - 7 * dx2 / 8) < 1e-15 and abs(M.entry(-1) - 7 * dx2 / 8) < 1e-15)
      self.assertTrue(abs(M.entry(2) - dx2 / 8) < 1e-15 and abs(M.entry(-2) - dx2 / 8) < 1e-15)
      self.assertTrue(all(M.entry(k) == 0.0 for k in range(3, N - 2)))
      self.assertTrue(M.quadrature_deviation <= 1e-12)

  def test_quadrature_agrees_with_closed_form(self):
    """ Assert quadrature of the overlap integral reproduces the closed-form row """
    for N in (6, 10, 64):
      self.assertTrue(np.allclose(counterexample.quadrature_row(N), counterexample.closed_form_row(N), rtol=0, atol=1e-15))

  def test_invalid_sizes(self):
    """ Assert odd or too small N is rejected """
    for N in (4, 7, 9):
      with self.assertRaises(ValidationFailure):
        counterexample.build_exact_matrix(N)


class CertificateTestCase(TestCase):
  def test_single_species(self):
    """ Assert J = w^T Mhat w < 0 for one species on six cells """
    certificate = counterexample.verify_negative_direction(6)
    self.assertTrue(certificate.passed)
    self.assertTrue(abs(certificate.J + 1.0 / 12) < 1e-15)
    self.assertTrue(abs(certificate.eigenvalue + 0.5 / 36) < 1e-16)
    self.assertTrue(certificate.min_eigenvalue <= certificate.eigenvalue)

  def test_discrepancy_is_noted(self):
    """ Assert the certificate notes that the eigenvalue is -dx^2/2 rather than -4 dx^2 """
    certificate = counterexample.verify_negative_direction(8)
    self.assertTrue(len(certificate.notes) == 1 and '-0.5 dx^2' in certificate.notes[0])
    lines = certificate.lines()
    self.assertTrue(lines[0] == "N = 8" and lines[-1] == "PASS")

  def test_species_weights(self):
    """ Assert the negative direction survives positive definite species weights """
    W = [[0.5004, 1.0], [1.0, 2.0]]
    certificate = counterexample.verify_negative_direction(10, W)
    top = np.max(np.linalg.eigvalsh(W))
    self.assertTrue(certificate.passed)
    self.assertTrue(abs(certificate.J - top * certificate.eigenvalue * 10) < 1e-15)

  def test_invalid_weights(self):
    """ Assert nonsymmetric or indefinite weights are rejected """
    with self.assertRaises(ValidationFailure):
      counterexample.verify_negative_direction(6, [[1.0, 0.5], [0.2, 1.0]])
    with self.assertRaises(ValidationFailure):
      counterexample.verify_negative_direction(6, [[1.0, 2.0], [2.0, 1.0]])
