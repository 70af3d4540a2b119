import cmath
import math
import unittest

import numpy as np

from src.thermal.exceptions import DomainError, SingularPointError
from src.thermal.kernels import (
    VARIANTS, kernel_B, kernel_F_alpha, kernel_green_p, kernel_lattice, kernel_propagator_HT,
    kernel_resolvent_HT, kernel_resolvent_Pi, kernel_U, kernel_Z, laplace_kernel_Z,
    named_kernel, pv_identity_G, pv_identity_xy, pv_numeric_G, pv_numeric_xy,
    run_conformance,
)
from src.thermal.models import ExperimentConfig
from src.thermal.specfun import bessel_i0, bessel_j0, bessel_k0
from src.thermal.validators import validate_experiment


class TestPrincipalValueIdentities(unittest.TestCase):
    def test_closed_forms(self):
        self.assertEqual(pv_identity_G(0.8, '-'), 0j)
        self.assertAlmostEqual(pv_identity_G(1.0, '+'), 2j * math.pi * bessel_j0(2.0), places=14)
        self.assertEqual(pv_identity_G(-1.0, '+'), -pv_identity_G(1.0, '+'))
        self.assertEqual(pv_identity_xy(1.0, 2.0), 0j)
        with self.assertRaises(DomainError):
            pv_identity_G(1.0, 'x')

    def test_numeric_G(self):
        for branch in ('+', '-'):
            numeric = pv_numeric_G(0.7, branch, tol=1e-6)
            self.assertLess(abs(numeric - pv_identity_G(0.7, branch)), 1e-4, msg=branch)

    def test_numeric_xy(self):
        numeric = pv_numeric_xy(1.3, -0.4, tol=1e-6)
        self.assertLess(abs(numeric - pv_identity_xy(1.3, -0.4)), 1e-4)


class TestKernels(unittest.TestCase):
    def test_B_antisymmetric(self):
        xs = np.array([-2.0, -0.3, 0.0, 0.4, 1.7])
        for x in xs:
            for y in xs:
                self.assertAlmostEqual(kernel_B(x, y), -kernel_B(y, x), places=15)
        self.assertEqual(kernel_B(1.0, 1.0), 0j)

    def test_U_bound_and_time_reversal(self):
        rng = np.random.default_rng(3)
        x, y = rng.uniform(-5, 5, (2, 1000))
        for tau in (0.3, -1.2, 4.0):
            values = kernel_U(tau, x, y)
            self.assertLessEqual(float(np.max(abs(tau) * np.abs(values))), 1 + 1e-12)
        self.assertAlmostEqual(kernel_U(-0.7, 1.0, 2.0), np.conj(kernel_U(0.7, 1.0, 2.0)),
                               places=14)
        with self.assertRaises(DomainError):
            kernel_U(0.0, 1.0, 1.0)

    def test_Z_support_and_conjugation(self):
        self.assertEqual(kernel_Z(1j, 1.0, -2.0), 0j)
        value = kernel_Z(1 + 1j, 0.5, 2.0)
        self.assertAlmostEqual(kernel_Z(1 - 1j, 0.5, 2.0), value.conjugate(), places=14)
        with self.assertRaises(DomainError):
            kernel_Z(2.0, 0.5, 1.0)
        with self.assertRaises(DomainError):
            kernel_Z(1j, 0.5, 1.0, variant='other')

    def test_F_alpha_variants(self):
        self.assertEqual(VARIANTS, ('paper', 'minmax'))
        arg = 2 * cmath.exp(-0.25j * math.pi)
        value = kernel_F_alpha(1j, 1.0, 2.0, variant='paper')
        self.assertAlmostEqual(value, bessel_i0(arg) * bessel_k0(arg), places=14)
        other = kernel_F_alpha(1j, 1.0, 2.0, variant='minmax')
        self.assertGreater(abs(value - other), 1e-3)
        params = validate_experiment(ExperimentConfig('kernel', {'variant': 'paper'}))
        self.assertEqual(params['variant'], 'paper')

    def test_Z_matches_laplace_oracle(self):
        oracle = laplace_kernel_Z(1 + 1j, 0.5, 1.0, tol=1e-9)
        self.assertLess(abs(kernel_Z(1 + 1j, 0.5, 1.0) - oracle.value), 1e-5)

    def test_green_p(self):
        self.assertEqual(kernel_green_p(1j, 0.0, 1.0), 0j)
        self.assertAlmostEqual(kernel_green_p(1j, 0.0, 0.0), 0.5j, places=15)
        with self.assertRaises(DomainError):
            kernel_green_p(1.0, 0.0, 1.0)

    def test_resolvent_Pi_diagonal(self):
        for zeta in (2 + 1j, -0.5 - 3j):
            sign = 1.0 if zeta.imag > 0 else -1.0
            for x in (-1.3, 0.7):
                value = kernel_resolvent_Pi(0.4, zeta, x, x)
                expected = sign * 1j / (2 * x * x)
                self.assertLessEqual(abs(value - expected), 1e-15 * abs(expected))
        with self.assertRaises(SingularPointError):
            kernel_resolvent_Pi(0.4, 1j, 0.0, 1.0)

    def test_thermal_shifts(self):
        lam = 2.0
        self.assertAlmostEqual(kernel_propagator_HT(lam, 0.5, 0.1, 0.3),
                               kernel_U(1.0, 0.6, 0.8), places=14)
        self.assertAlmostEqual(kernel_resolvent_HT(lam, 2j, 0.1, 0.3),
                               kernel_Z(1j, 0.6, 0.8) / lam, places=14)


class TestConformance(unittest.TestCase):
    def test_small_lattice(self):
        report = run_conformance(lattice=(0.5, 1.0), alphas=(1j,), tol=1e-5)
        self.assertIn(report.selected_variant, VARIANTS)
        self.assertEqual(len(report.entries), 4)
        self.assertLess(report.max_errors['minmax'], 1e-5)
        self.assertEqual(sorted(report.max_errors), ['minmax', 'paper'])
        self.assertTrue(report.passed)

    def test_lattice_marks_singular_points(self):
        frame = kernel_lattice(named_kernel('resolvent_pi', zeta=1j), [0.0, 1.0], [1.0])
        self.assertTrue(math.isnan(frame['re'].iloc[0]))
        self.assertFalse(math.isnan(frame['re'].iloc[1]))
        self.assertEqual(list(frame.columns), ['x', 'y', 're', 'im'])

    def test_named_kernel_unknown(self):
        with self.assertRaises(DomainError):
            named_kernel('Q')


if __name__ == '__main__':
    unittest.main()
