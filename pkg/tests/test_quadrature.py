import math
import unittest

from scipy import special

from src.thermal.exceptions import DomainError
from src.thermal.models import PVWindow
from src.thermal.quadrature import (
    integrate_adaptive, integrate_bessel_tail, integrate_fourier_line, integrate_oscillatory,
    integrate_pv_symmetric, integrate_pv_window, laplace_transform, neville_extrapolate,
    pv_limit,
)


def gaussian(u):
    return math.exp(-u * u)


class TestAdaptive(unittest.TestCase):
    def test_gaussian_line(self):
        result = integrate_adaptive(gaussian, -math.inf, math.inf)
        self.assertLess(abs(result.value - math.sqrt(math.pi)), 1e-10)
        self.assertTrue(result.converged)
        self.assertGreater(result.evaluations, 1)

    def test_complex_integrand_with_breakpoint(self):
        result = integrate_adaptive(lambda u: abs(u) * (1 + 1j), -1.0, 1.0, points=[0.0])
        self.assertLess(abs(result.value - (1 + 1j)), 1e-12)

    def test_empty_interval(self):
        with self.assertRaises(DomainError):
            integrate_adaptive(gaussian, 1.0, 1.0)


class TestOscillatory(unittest.TestCase):
    def test_half_line(self):
        # ∫_0^∞ e^{−u} e^{2iu} du = 1/(1 − 2i)
        result = integrate_oscillatory(lambda u: math.exp(-u), 2.0, 0.0)
        self.assertLess(abs(result.value - 1 / (1 - 2j)), 1e-9)

    def test_finite_interval(self):
        result = integrate_oscillatory(lambda u: 1.0, 3.0, 0.0, 1.0)
        expected = (complex(math.cos(3.0), math.sin(3.0)) - 1) / 3j
        self.assertLess(abs(result.value - expected), 1e-10)

    def test_reflected_lower_half_line(self):
        result = integrate_oscillatory(lambda u: math.exp(u), -2.0, -math.inf, 0.0)
        self.assertLess(abs(result.value - 1 / (1 - 2j)), 1e-9)

    def test_fourier_line(self):
        # ∫ e^{−u²} e^{iu} du = √π e^{−1/4}
        result = integrate_fourier_line(gaussian, 1.0)
        self.assertLess(abs(result.value - math.sqrt(math.pi) * math.exp(-0.25)), 1e-9)

    def test_bessel_tail(self):
        # ∫_0^∞ e^{−pu} J₀(u) du = 1/√(p² + 1)
        p = 0.2
        result = integrate_bessel_tail(lambda u: math.exp(-p * u), [1.0], tol=1e-11)
        self.assertLess(abs(result.value - 1 / math.sqrt(p * p + 1)), 1e-8)
        self.assertEqual(result.metadata['switch'], 8.0)


class TestPrincipalValue(unittest.TestCase):
    def test_window(self):
        result = integrate_pv_window(gaussian, PVWindow(2.0, 0.5))
        expected = math.sqrt(math.pi) * (special.erf(2.0) - special.erf(0.5))
        self.assertLess(abs(result.value - expected), 1e-10)

    def test_symmetric(self):
        result = integrate_pv_symmetric(gaussian)
        self.assertLess(abs(result.value - math.sqrt(math.pi)), 1e-10)

    def test_pv_limit_sine_integral(self):
        # P∫ e^{iu}/u du = iπ
        value = pv_limit(lambda u: complex(math.cos(u), math.sin(u)) / u, tol=1e-5,
                         outer_frequency=1.0)
        self.assertLess(abs(value - 1j * math.pi), 1e-5)

    def test_schedule_must_expand(self):
        with self.assertRaises(DomainError):
            pv_limit(gaussian, [PVWindow(10.0, 0.1), PVWindow(5.0, 0.01)])

    def test_neville_exact_for_polynomial(self):
        h = [1.0, 0.5, 0.25]
        values = [1 + 2 * x + 3 * x * x for x in h]
        limit, _ = neville_extrapolate(h, values)
        self.assertLess(abs(limit - 1.0), 1e-12)


class TestLaplace(unittest.TestCase):
    def test_constant(self):
        # i∫_0^∞ e^{iζt} dt = −1/ζ
        zeta = 1 + 2j
        value = laplace_transform(lambda t: 1.0, zeta, tol=1e-9)
        self.assertLess(abs(value + 1 / zeta), 1e-8)

    def test_full_result_metadata(self):
        result = laplace_transform(lambda t: 1.0, 1j, full_result=True)
        self.assertIn('truncation', result.metadata)

    def test_real_spectral_parameter(self):
        with self.assertRaises(DomainError):
            laplace_transform(lambda t: 1.0, 1.0)


if __name__ == '__main__':
    unittest.main()
