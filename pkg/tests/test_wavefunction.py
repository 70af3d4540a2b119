import math
import unittest

import numpy as np

from src.thermal.exceptions import DomainError, ShapeError
from src.thermal.models import Grid, Wavefunction
from src.thermal.wavefunction import (
    CANONICAL_STATES, apply_diag, canonical_state, default_grid, evaluate, fourier,
    fourier_exact, fourier_inverse, from_frame, gaussian_source, inner, mass_outside, norm,
    norm_continuous, normalized, restrict, thermal_gauss_grid, to_frame,
)


def shifted_gaussian_transform(k, center, width):
    amplitude = (math.pi * width ** 2) ** -0.25
    return amplitude * width * np.exp(-(width * k) ** 2 / 2) * np.exp(-1j * k * center)


class TestCanonicalStates(unittest.TestCase):
    def setUp(self):
        self.grid = default_grid()

    def test_unit_norm(self):
        for name in CANONICAL_STATES:
            psi = canonical_state(name, self.grid)
            self.assertAlmostEqual(norm(psi), 1.0, delta=1e-6, msg=name)
            self.assertAlmostEqual(norm_continuous(psi), 1.0, delta=1e-8, msg=name)

    def test_unknown_state(self):
        with self.assertRaises(DomainError):
            canonical_state('square', self.grid)

    def test_hermite_orthogonal_to_gaussian(self):
        g = canonical_state('gaussian', self.grid)
        h = canonical_state('hermite1', self.grid)
        self.assertLess(abs(inner(g, h)), 1e-12)

    def test_inner_requires_same_grid(self):
        psi = canonical_state('gaussian', self.grid)
        phi = canonical_state('gaussian', default_grid(points=1025))
        with self.assertRaises(ShapeError):
            inner(psi, phi)


class TestFourier(unittest.TestCase):
    def setUp(self):
        self.grid = default_grid()
        self.psi = canonical_state('shifted', self.grid)

    def test_backends_match_closed_form(self):
        k_grid = Grid.uniform(-5.0, 5.0, 201)
        expected = shifted_gaussian_transform(k_grid.points, 1.5, 0.7)
        for backend, tol in (('quadrature', 1e-10), ('fft', 1e-6)):
            transformed = fourier(self.psi, k_grid, backend)
            self.assertLess(float(np.max(np.abs(transformed.values - expected))), tol,
                            msg=backend)
            self.assertFalse(transformed.metadata['truncation_warning'])

    def test_inverse(self):
        k_grid = Grid.uniform(-12.0, 12.0, 1025)
        back = fourier_inverse(fourier(self.psi, k_grid), Grid.uniform(-3.0, 3.0, 61))
        expected = gaussian_source(center=1.5, width=0.7)(back.x)
        self.assertLess(float(np.max(np.abs(back.values - expected))), 1e-6)

    def test_exact_oracle(self):
        value = fourier_exact(gaussian_source(center=1.5, width=0.7), 1.0)
        self.assertLess(abs(value - shifted_gaussian_transform(1.0, 1.5, 0.7)), 1e-9)

    def test_truncation_warning(self):
        flat = Wavefunction(Grid.uniform(-1.0, 1.0, 101), np.ones(101))
        transformed = fourier(flat, Grid.uniform(-1.0, 1.0, 11), 'quadrature')
        self.assertTrue(transformed.metadata['truncation_warning'])

    def test_unknown_backend(self):
        with self.assertRaises(DomainError):
            fourier(self.psi, Grid.uniform(-1.0, 1.0, 11), 'dft')


class TestGridHelpers(unittest.TestCase):
    def test_thermal_gauss_grid(self):
        grid = thermal_gauss_grid(2.0, outer=9.0, panels=10, order=4)
        self.assertFalse(np.any(grid.points == -0.5))
        self.assertAlmostEqual(float(grid.weights.sum()), 18.0, places=10)
        right = thermal_gauss_grid(2.0, outer=9.0, panels=10, order=4, sides='right')
        self.assertTrue(np.all(right.points > -0.5))
        with self.assertRaises(DomainError):
            thermal_gauss_grid(2.0, sides='top')

    def test_mass_outside_and_restrict(self):
        psi = canonical_state('gaussian', default_grid())
        self.assertLess(mass_outside(psi, -8.0, 8.0), 1e-20)
        half = restrict(psi, 0.0, math.inf)
        self.assertAlmostEqual(norm(half) ** 2, 0.5, delta=5e-3)

    def test_apply_diag_keeps_source(self):
        psi = canonical_state('gaussian', default_grid())
        doubled = apply_diag(lambda x: 2.0 + 0 * np.asarray(x), psi)
        self.assertAlmostEqual(norm_continuous(doubled), 2.0, delta=1e-8)
        self.assertAlmostEqual(complex(evaluate(doubled, np.array([0.0]))[0]).real,
                               2 * math.pi ** -0.25, places=12)

    def test_normalized_zero(self):
        zero = Wavefunction(Grid.uniform(0.0, 1.0, 3), np.zeros(3))
        with self.assertRaises(DomainError):
            normalized(zero)

    def test_frame_columns(self):
        psi = canonical_state('chirped', Grid.uniform(-4.0, 4.0, 81))
        frame = to_frame(psi)
        self.assertEqual(list(frame.columns), ['x', 're', 'im'])
        rebuilt = from_frame(frame)
        self.assertTrue(np.allclose(rebuilt.values, psi.values, rtol=0, atol=1e-15))
        with self.assertRaises(ShapeError):
            from_frame(frame.drop(columns=['im']))


if __name__ == '__main__':
    unittest.main()
