import math
import unittest

import numpy as np
from scipy import special

from src.thermal.exceptions import DomainError
from src.thermal.models import Wavefunction
from src.thermal.quadrature import integrate_adaptive
from src.thermal.spectral import (
    density_from_borel, dos_laplacian, idos_interval, idos_interval_via_momentum,
    idos_laplacian, idos_momentum_sum, idos_momentum_window, local_idos,
    momentum_sum_tail_bound, pv_idos, pv_idos_window, spectral_density_momentum,
    spectral_density_Pi, twisted_involution_kernel,
)
from src.thermal.wavefunction import canonical_state, default_grid, fourier_exact


class TestIntegratedDensity(unittest.TestCase):
    def test_interval_closed_form(self):
        for theta in (0.0, 1.1, 3.0):
            self.assertEqual(idos_interval(theta, 2.5, 0.5, 2.0), 2.5 / (2 * math.pi))
        self.assertEqual(idos_interval(0.0, 1.0, -3.0, -1.0), 1.0 / (6 * math.pi))
        with self.assertRaises(DomainError):
            idos_interval(0.0, 1.0, -1.0, 1.0)
        with self.assertRaises(DomainError):
            idos_interval(0.0, 1.0, 2.0, 1.0)

    def test_interval_via_momentum(self):
        direct = idos_interval(0.0, 1.7, 0.4, 3.0)
        self.assertAlmostEqual(idos_interval_via_momentum(1.7, 0.4, 3.0), direct, places=14)

    def test_local_idos(self):
        self.assertAlmostEqual(local_idos(1.0, 2.0, 1.0), 1.0 / (2 * math.pi * 6.0), places=15)
        self.assertAlmostEqual(local_idos(1.0, -2.0, 1.0), 1.0 / (2 * math.pi * 6.0), places=15)
        with self.assertRaises(DomainError):
            local_idos(1.0, 0.0, 1.0)

    def test_pv_idos(self):
        for L in (1.5, 5.0, 40.0):
            self.assertLess(abs(pv_idos_window(2.0, L) - pv_idos(0.0, 2.0)), 1e-10)
        self.assertEqual(pv_idos_window(-2.0, 5.0), -pv_idos_window(2.0, 5.0))
        with self.assertRaises(DomainError):
            pv_idos_window(1.0, 1.0)

    def test_momentum_partial_sum(self):
        value = idos_momentum_sum(1.0, 50.0, 2000)
        self.assertLess(abs(value - 1 / (2 * math.pi)), 1e-4)
        self.assertLessEqual(abs(value - 1 / (2 * math.pi)), momentum_sum_tail_bound(1.0, 50.0, 2000))
        self.assertEqual(momentum_sum_tail_bound(10.0, 50.0, 100), math.inf)

    def test_momentum_window(self):
        self.assertLess(abs(idos_momentum_window(0.8, 20.0, 400, tol=1e-8) - 0.8 / (2 * math.pi)),
                        1e-3)

    def test_laplacian(self):
        integral = integrate_adaptive(dos_laplacian, 0.0, 4.0, 1e-12).value.real
        self.assertLess(abs(integral - idos_laplacian(4.0)), 1e-8)
        self.assertAlmostEqual(idos_laplacian(4.0), 2 / math.pi, places=15)
        self.assertEqual(idos_laplacian(-1.0), 0.0)
        with self.assertRaises(DomainError):
            dos_laplacian(0.0)


class TestSpectralDensity(unittest.TestCase):
    def setUp(self):
        self.psi = canonical_state('shifted', default_grid())

    def test_Pi_density_mass(self):
        energies = np.linspace(-60.0, 60.0, 4001)
        for name in ('gaussian', 'shifted'):
            density = spectral_density_Pi(0.7, canonical_state(name, default_grid()), energies)
            self.assertLess(abs(density.total_mass() - 1.0), 1e-4, msg=name)
            self.assertTrue(np.all(density.density >= 0))

    def test_Pi_mass_independent_of_theta(self):
        psi = canonical_state('gaussian', default_grid())
        energies = np.linspace(-120.0, 120.0, 241)
        masses = [spectral_density_Pi(theta, psi, energies).total_mass()
                  for theta in (0.0, math.pi / 3, math.pi)]
        self.assertLess(max(masses) - min(masses), 1e-10)

    def test_Pi_density_matches_position_transform(self):
        psi = canonical_state('hermite1', default_grid())
        theta = 0.9
        source = psi.source

        def twisted(x):
            return np.exp(-0.5j * theta * np.sign(x)) * source(1.0 / x) / x

        energies = np.array([-1.3, 0.5, 3.0])
        density = spectral_density_Pi(theta, psi, energies)
        for eps, value in zip(energies, density.density):
            expected = abs(fourier_exact(twisted, eps, singular_points=[0.0], tol=1e-11)) ** 2
            self.assertLess(abs(value - expected), 1e-7, msg=eps)

    def test_log_singularity_at_zero(self):
        psi = canonical_state('gaussian', default_grid())
        energies = np.array([-1.0, 0.0, 1.0])
        self.assertTrue(math.isinf(spectral_density_Pi(math.pi / 3, psi, energies).density[1]))
        self.assertTrue(np.all(np.isfinite(spectral_density_Pi(0.0, psi, energies).density)))

    def test_twisted_kernel(self):
        self.assertEqual(twisted_involution_kernel(0.0, [1.0], [2.0])[0, 0], 0j)
        value = twisted_involution_kernel(0.0, [1.0], [-2.0])[0, 0]
        self.assertAlmostEqual(value, -1j * special.j0(2 * math.sqrt(2.0)), places=15)
        value = twisted_involution_kernel(math.pi, [-0.5], [-2.0])[0, 0]
        self.assertAlmostEqual(value, -2j / math.pi * special.k0(2.0), places=15)
        with self.assertRaises(DomainError):
            twisted_involution_kernel(0.0, [0.0], [1.0])

    def test_unnormalized_input(self):
        source = self.psi.source
        doubled = Wavefunction.from_function(lambda x: 2.0 * source(x), default_grid())
        energies = np.linspace(-5.0, 5.0, 51)
        reference = spectral_density_Pi(0.0, self.psi, energies)
        rescaled = spectral_density_Pi(0.0, doubled, energies)
        self.assertAlmostEqual(rescaled.metadata['normalized_from'], 2.0, places=8)
        self.assertTrue(np.allclose(rescaled.density, reference.density, rtol=0, atol=1e-10))

    def test_momentum_density_gaussian(self):
        psi = canonical_state('gaussian', default_grid())
        energies = np.linspace(-4.0, 4.0, 201)
        density = spectral_density_momentum(psi, energies)
        expected = np.exp(-energies ** 2) / math.sqrt(math.pi)
        self.assertLess(float(np.max(np.abs(density.density - expected))), 1e-6)

    def test_borel_inversion(self):
        psi = canonical_state('gaussian', default_grid())
        value = density_from_borel(psi, 0.5, delta=1e-3)
        self.assertLess(abs(value - math.exp(-0.25) / math.sqrt(math.pi)), 5e-3)

    def test_energy_grid_validation(self):
        with self.assertRaises(DomainError):
            spectral_density_momentum(self.psi, [1.0, 0.0])


if __name__ == '__main__':
    unittest.main()
