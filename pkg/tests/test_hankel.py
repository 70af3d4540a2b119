import math
import unittest

import numpy as np

from src.thermal.exceptions import DomainError
from src.thermal.hankel import (
    apply_T, bessel_ode_residual, eigenfunction_psi_k, expansion_detail, hankel_inverse,
    hankel_transform, orthonormality_smoothed, resolvent_via_expansion,
)
from src.thermal.kernels import kernel_Z
from src.thermal.models import Grid
from src.thermal.specfun import bessel_j0


class TestEigenfunctions(unittest.TestCase):
    def test_values_and_support(self):
        self.assertEqual(eigenfunction_psi_k(3.0, 0.0), 1.0)
        self.assertEqual(eigenfunction_psi_k(2.0, -1.0), 0.0)
        self.assertEqual(eigenfunction_psi_k(-2.0, 1.0), 0.0)
        self.assertTrue(np.array_equal(eigenfunction_psi_k(0.0, [-1.0, 5.0]), [1.0, 1.0]))
        self.assertAlmostEqual(eigenfunction_psi_k(-1.0, -2.0), bessel_j0(2 * math.sqrt(2.0)),
                               places=15)
        with self.assertRaises(DomainError):
            eigenfunction_psi_k(math.inf, 1.0)

    def test_ode_residual(self):
        self.assertLess(bessel_ode_residual(1.0, 2.0), 1e-6)
        self.assertLess(bessel_ode_residual(-0.5, -3.0), 1e-6)
        with self.assertRaises(DomainError):
            bessel_ode_residual(1.0, 1e-3)

    def test_apply_T(self):
        grid = Grid.uniform(0.5, 3.0, 251)
        k = 1.2
        values = eigenfunction_psi_k(k, grid.points)
        residual = apply_T(values, grid) + k * values
        self.assertLess(float(np.max(np.abs(residual[2:-2]))), 1e-5)


class TestHankelTransform(unittest.TestCase):
    def test_exponential_pairs(self):
        for x in (0.5, 2.0):
            value = hankel_transform(lambda k: math.exp(-k), '+', x)
            self.assertLess(abs(value - math.exp(-x)), 1e-7, msg=x)
        value = hankel_transform(lambda k: math.exp(-2 * k), '+', 1.3)
        self.assertLess(abs(value - math.exp(-0.65) / 2), 1e-7)
        back = hankel_inverse(lambda x: math.exp(-x / 2) / 2, '+', 0.4)
        self.assertLess(abs(back - math.exp(-0.8)), 1e-7)

    def test_negative_branch(self):
        value = hankel_transform(lambda k: math.exp(k), '-', 0.5)
        self.assertLess(abs(value - math.exp(-0.5)), 1e-7)

    def test_zero_and_errors(self):
        self.assertEqual(hankel_transform(lambda k: 0.0, '+', 1.0), 0j)
        with self.assertRaises(DomainError):
            hankel_transform(lambda k: 1.0, '+', -1.0)
        with self.assertRaises(DomainError):
            hankel_transform(lambda k: 1.0, '0', 1.0)


class TestNormalization(unittest.TestCase):
    def test_packet_peaks_at_matching_eigenvalue(self):
        values = [orthonormality_smoothed(1.0, 1.0, w) for w in (0.5, 0.25, 0.125)]
        self.assertLess(abs(values[-1] - 1.0), 0.05)
        self.assertLess(abs(orthonormality_smoothed(1.0, 2.0, 0.125)), 0.05)

    def test_disjoint_supports(self):
        self.assertEqual(orthonormality_smoothed(1.0, -1.0, 0.1), 0j)
        with self.assertRaises(DomainError):
            orthonormality_smoothed(1.0, 1.0, 0.0)
        with self.assertRaises(DomainError):
            orthonormality_smoothed(0.0, 1.0, 0.1)


class TestExpansion(unittest.TestCase):
    def test_matches_resolvent_kernel(self):
        value = resolvent_via_expansion(1j, 1.0, 2.0)
        self.assertLess(abs(value - kernel_Z(1j, 1.0, 2.0)), 1e-4)

    def test_conjugation(self):
        value = resolvent_via_expansion(0.5 + 1j, 0.7, 1.5)
        conjugate = resolvent_via_expansion(0.5 - 1j, 0.7, 1.5)
        self.assertLess(abs(conjugate - value.conjugate()), 1e-8)

    def test_detail_and_errors(self):
        detail = expansion_detail(1j, -1.0, -2.0)
        self.assertAlmostEqual(detail.value, detail.head + detail.tail, places=14)
        self.assertGreater(detail.tail_bound, 0.0)
        self.assertEqual(resolvent_via_expansion(1j, -1.0, 2.0), 0j)
        with self.assertRaises(DomainError):
            resolvent_via_expansion(2.0, 1.0, 2.0)
        with self.assertRaises(DomainError):
            resolvent_via_expansion(1j, 0.0, 0.0)
        with self.assertRaises(DomainError):
            resolvent_via_expansion(1j, 1.0, 2.0, k_cutoff=-1.0)


if __name__ == '__main__':
    unittest.main()
