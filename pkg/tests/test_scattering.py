import math
import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from src.thermal.exceptions import ConvergenceError, DomainError, FileError, SingularPointError
from src.thermal.models import Grid
from src.thermal.operators import translate
from src.thermal.scattering import (
    ADMISSIBLE_PRESETS, check_decay_hypothesis, evolve_pg, generator_residual, load_g_hat_csv,
    phase_primitive, potential_M, preset_integral, preset_spec, state_grid, s_matrix_closed,
    s_matrix_num, scatter_report, wave_operator_num,
)
from src.thermal.wavefunction import canonical_state


class TestPresets(unittest.TestCase):
    def test_decay_hypothesis(self):
        for name in ADMISSIBLE_PRESETS + ('zero',):
            self.assertTrue(check_decay_hypothesis(preset_spec(name)), msg=name)
        self.assertFalse(check_decay_hypothesis(preset_spec('linear')))
        with self.assertRaises(DomainError):
            preset_spec('cubic')

    def test_potential_at_origin(self):
        self.assertEqual(potential_M(preset_spec('gauss2'), 0.0), 0j)
        with self.assertRaises(SingularPointError):
            potential_M(preset_spec('linear'), np.array([0.0, 1.0]))

    def test_phase_primitive_odd(self):
        spec = preset_spec('lorentz')
        x = np.array([-3.0, -0.5, 0.0, 0.5, 3.0])
        phase = phase_primitive(spec, x)
        self.assertEqual(phase[2], 0j)
        self.assertTrue(np.allclose(phase, -phase[::-1], rtol=0, atol=1e-9))


class TestSMatrix(unittest.TestCase):
    def test_closed_form(self):
        self.assertEqual(s_matrix_closed(preset_spec('zero')), 1 + 0j)
        for name in ADMISSIBLE_PRESETS:
            for lam in (1.0, 2.5):
                expected = np.exp(-1j * math.sqrt(2 * math.pi) / lam * preset_integral(name))
                value = s_matrix_closed(preset_spec(name, lam))
                self.assertLess(abs(value - expected), 1e-8, msg=name)
        with self.assertRaises(DomainError):
            s_matrix_closed(preset_spec('linear'))

    def test_numeric_matches_closed(self):
        spec = preset_spec('gauss2')
        psi = canonical_state('shifted', state_grid())
        value = s_matrix_num(spec, psi)
        self.assertLess(abs(value - s_matrix_closed(spec)), 1e-4)
        self.assertLess(abs(abs(value) - 1.0), 1e-6)

    def test_linear_preset_fails_cauchy_check(self):
        psi = canonical_state('gaussian', Grid.uniform(-5.0, 5.0, 41))
        with self.assertRaises(ConvergenceError):
            wave_operator_num(preset_spec('linear'), '+', psi)

    def test_zero_report(self):
        grid = Grid.uniform(-5.0, 5.0, 101)
        states = {'gaussian': canonical_state('gaussian', grid)}
        report = scatter_report(preset_spec('zero'), states)
        self.assertEqual(report['s_closed'], 1 + 0j)
        self.assertAlmostEqual(report['s_numeric']['gaussian'], 1 + 0j, places=12)
        self.assertLess(report['probe_residuals']['gaussian'], 1e-12)


class TestDynamics(unittest.TestCase):
    def test_free_evolution_is_translation(self):
        psi = canonical_state('gaussian', state_grid())
        evolved = evolve_pg(preset_spec('zero'), 1.3, psi)
        shifted = translate(psi, 1.3)
        self.assertTrue(np.allclose(evolved.values, shifted.values, rtol=0, atol=1e-14))

    def test_generator(self):
        psi = canonical_state('gaussian', state_grid())
        self.assertLess(generator_residual(preset_spec('gauss2'), psi), 1e-4)


class TestTable(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_table_reproduces_preset(self):
        s = np.linspace(-12.0, 12.0, 4801)
        values = s ** 2 * np.exp(-s ** 2)
        path = os.path.join(self.temp_dir.name, 'g_hat.csv')
        pd.DataFrame({'s': s, 're': values, 'im': np.zeros_like(s)}).to_csv(path, index=False)
        spec = load_g_hat_csv(path, decay_constants=(1.0, 1.0))
        samples = np.array([-3.3, -0.71, 0.0, 0.42, 2.05])
        expected = preset_spec('gauss2').g_hat(samples)
        self.assertLess(float(np.max(np.abs(spec.g_hat(samples) - expected))), 1e-8)
        self.assertEqual(spec.g_hat(np.array([15.0]))[0], 0j)
        self.assertTrue(check_decay_hypothesis(spec))

    def test_bad_tables(self):
        with self.assertRaises(FileError):
            load_g_hat_csv(os.path.join(self.temp_dir.name, 'missing.csv'))
        path = os.path.join(self.temp_dir.name, 'bad.csv')
        pd.DataFrame({'s': [0.0, 1.0], 're': [0.0, 1.0]}).to_csv(path, index=False)
        with self.assertRaises(FileError):
            load_g_hat_csv(path)


if __name__ == '__main__':
    unittest.main()
