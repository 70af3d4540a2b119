import math
import unittest

import numpy as np

from src.thermal.exceptions import DomainError, PoleError
from src.thermal.specfun import (
    J0_FIRST_ZERO, OracleEvaluator, bessel_i0, bessel_j0, bessel_j0_envelope, bessel_k0,
    kelvin_kei, kelvin_ker, relative_error, special_function_table,
)


class TestSpecialFunctions(unittest.TestCase):
    def test_j0_anchors(self):
        self.assertEqual(bessel_j0(0.0), 1.0)
        self.assertLess(abs(bessel_j0(J0_FIRST_ZERO)), 1e-10)

    def test_kei_at_origin(self):
        self.assertLess(abs(kelvin_kei(0.0) + math.pi / 4), 1e-12)

    def test_ker_pole(self):
        with self.assertRaises(PoleError):
            kelvin_ker(0.0)
        with self.assertRaises(DomainError):
            kelvin_ker(-1.0)

    def test_k0_pole_and_cut(self):
        with self.assertRaises(PoleError):
            bessel_k0(0.0)
        with self.assertRaises(DomainError):
            bessel_k0(-2.0 + 0j)

    def test_non_finite(self):
        with self.assertRaises(DomainError):
            bessel_j0(math.nan)
        with self.assertRaises(DomainError):
            bessel_i0(complex(math.inf, 0))

    def test_i0_imaginary_is_j0(self):
        # I₀(ix) = J₀(x)
        rng = np.random.default_rng(1)
        xs = rng.uniform(-30.0, 30.0, 200)
        diff = np.abs(bessel_i0(1j * xs) - bessel_j0(xs))
        self.assertLess(float(diff.max()), 1e-10)

    def test_kelvin_is_rotated_k0(self):
        # ker x + i kei x = K₀(x e^{iπ/4})
        for x in (0.3, 1.0, 4.5, 11.0):
            rotated = bessel_k0(x * np.exp(1j * math.pi / 4))
            self.assertLess(abs(kelvin_ker(x) + 1j * kelvin_kei(x) - rotated), 1e-12)

    def test_envelope_reconstructs_j0(self):
        z = np.linspace(0.5, 40.0, 50)
        rebuilt = np.real(bessel_j0_envelope(z) * np.exp(1j * z))
        self.assertLess(float(np.max(np.abs(rebuilt - bessel_j0(z)))), 1e-13)

    def test_relative_error_zero_reference(self):
        self.assertEqual(relative_error(1e-3, 0.0), 1e-3)

    def test_table_columns(self):
        table = special_function_table([0.5, 1.0, 2.0])
        self.assertEqual(sorted(table), ['i0', 'j0', 'k0', 'kei', 'ker', 'x'])
        with self.assertRaises(DomainError):
            special_function_table([0.0, 1.0])


class TestOracleEvaluator(unittest.TestCase):
    def setUp(self):
        self.oracle = OracleEvaluator()

    def test_j0_agrees_with_scipy(self):
        for x in (0.0, 1.0, 7.3, 19.0, 25.0, 60.0):
            self.assertLess(relative_error(bessel_j0(x), self.oracle.j0(x)), 1e-12)

    def test_first_zero(self):
        self.assertLess(abs(self.oracle.j0_first_zero() - J0_FIRST_ZERO), 1e-10)

    def test_overlap_band(self):
        self.assertLess(self.oracle.overlap_disagreement(), 1e-10)

    def test_i0_series_and_integral(self):
        for x in (0.5, 3.0, 10.0):
            self.assertLess(relative_error(self.oracle.i0(x), self.oracle.i0_integral(x)), 1e-12)
            self.assertLess(relative_error(bessel_i0(x), self.oracle.i0(x)), 1e-10)

    def test_k0_routes(self):
        for z in (0.5, 2.0 + 1.0j, 15.0, 3.0j):
            self.assertLess(relative_error(bessel_k0(z), self.oracle.k0(z)), 1e-9)

    def test_kelvin(self):
        ker, kei = self.oracle.kelvin(2.0)
        self.assertLess(abs(ker - kelvin_ker(2.0)), 1e-12)
        self.assertLess(abs(kei - kelvin_kei(2.0)), 1e-12)

    def test_calibrate_crossover(self):
        best, scores = self.oracle.calibrate_crossover([5.0, 20.0], samples=5)
        self.assertEqual(best, 20.0)
        self.assertEqual(set(scores), {5.0, 20.0})


if __name__ == '__main__':
    unittest.main()
