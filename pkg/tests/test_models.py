import json
import math
import os
import tempfile
import unittest

import numpy as np

from src.thermal.config import Config, deep_merge
from src.thermal.exceptions import (
    AccuracyError, BlowUpError, ConfigError, ConvergenceError, DomainError, FileError,
    PoleError, ShapeError, ThermalToolkitError, create_error,
)
from src.thermal.models import (
    ClassicalConfig, CriterionResult, AcceptanceReport, EvalDomain, ExperimentConfig,
    FlowParams, Grid, PVWindow, QuadResult, RunConfig, SIGN, ThermalParams, Wavefunction,
)


class TestExceptions(unittest.TestCase):
    def test_details_in_message(self):
        error = DomainError("非有限輸入", {'x': 'nan'})
        self.assertIn('nan', str(error))
        self.assertIsInstance(error, ThermalToolkitError)

    def test_create_error_by_range(self):
        # 依代碼範圍對應異常類別
        self.assertIsInstance(create_error(1001), DomainError)
        self.assertIsInstance(create_error(1005), PoleError)
        self.assertIsInstance(create_error(1007), ShapeError)
        self.assertIsInstance(create_error(2002), ConvergenceError)
        self.assertIsInstance(create_error(2001), AccuracyError)
        self.assertIsInstance(create_error(3002), BlowUpError)
        self.assertIsInstance(create_error(4001, path='a.csv'), FileError)
        self.assertIsInstance(create_error(5001), ConfigError)

    def test_convergence_is_accuracy(self):
        self.assertTrue(issubclass(ConvergenceError, AccuracyError))


class TestModels(unittest.TestCase):
    def test_eval_domain_validate(self):
        EvalDomain(crossover=20.0).validate()
        with self.assertRaises(DomainError):
            EvalDomain(crossover=-1.0).validate()
        with self.assertRaises(DomainError):
            EvalDomain(target_rel_tol=1e-3).validate()

    def test_pv_window(self):
        PVWindow(10.0, 0.1)
        with self.assertRaises(DomainError):
            PVWindow(1.0, 2.0)
        with self.assertRaises(DomainError):
            PVWindow(math.inf, 1.0)

    def test_quad_result_add(self):
        total = QuadResult(1.0, 1e-10, 10) + QuadResult(2j, 2e-10, 5, converged=False)
        self.assertEqual(total.value, 1 + 2j)
        self.assertAlmostEqual(total.err_estimate, 3e-10)
        self.assertEqual(total.evaluations, 15)
        self.assertFalse(total.converged)

    def test_grid_uniform_weights(self):
        grid = Grid.uniform(0.0, 1.0, 11)
        self.assertAlmostEqual(grid.weights.sum(), 1.0, places=14)
        self.assertAlmostEqual(grid.spacing, 0.1, places=14)

    def test_grid_rejects_unsorted(self):
        with self.assertRaises(DomainError):
            Grid.from_points([0.0, 2.0, 1.0])

    def test_log_symmetric_excludes_center(self):
        grid = Grid.log_symmetric(-1.0, 1e-4, 10.0, 50)
        self.assertFalse(np.any(grid.points == -1.0))
        self.assertEqual(grid.size, 100)

    def test_gauss_legendre_integrates_polynomial(self):
        grid = Grid.gauss_legendre([0.0, 1.0, 2.0], order=4)
        self.assertAlmostEqual(float(np.sum(grid.weights * grid.points ** 3)), 4.0, places=12)

    def test_wavefunction_shape(self):
        grid = Grid.uniform(-1.0, 1.0, 5)
        with self.assertRaises(ShapeError):
            Wavefunction(grid, np.zeros(4))
        with self.assertRaises(DomainError):
            Wavefunction(grid, np.array([0, 1, np.nan, 0, 0]))

    def test_sign_convention(self):
        self.assertEqual(SIGN.sgn(0.0), 0.0)
        self.assertEqual(SIGN.heaviside(0.0), 0.5)
        self.assertEqual(SIGN.sgn(-3.0), -1.0)

    def test_flow_params_reduce_theta(self):
        params = FlowParams(theta=2 * math.pi + 0.5)
        self.assertAlmostEqual(params.theta, 0.5, places=12)

    def test_thermal_params(self):
        self.assertEqual(ThermalParams(2.0).x_c, -0.5)
        with self.assertRaises(DomainError):
            ThermalParams(0.0)

    def test_classical_config(self):
        cfg = ClassicalConfig.from_dict({'m': 1, 'lambda': 0.5, 'gamma': [1, 0],
                                         'rho0': [0, 1], 'wp0': [1, 1]})
        self.assertEqual(cfg.ell, 2.0)
        self.assertEqual(cfg.dimension, 2)
        with self.assertRaises(DomainError):
            ClassicalConfig(1.0, 1.0, [1.0, 1.0], [0.0, 0.0], [0.0, 0.0])
        with self.assertRaises(ShapeError):
            ClassicalConfig(1.0, 1.0, [1.0], [0.0, 0.0], [0.0, 0.0])

    def test_run_config_validate(self):
        RunConfig().validate()
        with self.assertRaises(ConfigError):
            RunConfig(tol=0.0).validate()
        with self.assertRaises(ConfigError):
            RunConfig(threads=0).validate()

    def test_experiment_config_unknown_command(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig('plot').validate()

    def test_acceptance_report_failing(self):
        report = AcceptanceReport([CriterionResult(1, 'anchors', True),
                                   CriterionResult(2, 'pv', False)])
        self.assertFalse(report.passed)
        self.assertEqual(report.failing, ['2:pv'])
        self.assertEqual(report.to_dict()['failing'], ['2:pv'])


class TestConfig(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_defaults(self):
        config = Config()
        self.assertEqual(config.get('specfun.k0.crossover'), 12.0)
        self.assertIsNone(config.get('no.such.key'))
        with self.assertRaises(ConfigError):
            config.require('no.such.key')

    def test_deep_merge(self):
        merged = deep_merge({'a': {'b': 1, 'c': 2}}, {'a': {'b': 3}})
        self.assertEqual(merged, {'a': {'b': 3, 'c': 2}})

    def test_from_file_json_and_overrides(self):
        path = os.path.join(self.temp_dir.name, 'user.json')
        with open(path, 'w', encoding='utf-8') as f:
            json.dump({'quadrature': {'tol': 1e-8}}, f)
        config = Config.from_file(path, {'quadrature.limit': 100})
        self.assertEqual(config.get('quadrature.tol'), 1e-8)
        self.assertEqual(config.get('quadrature.limit'), 100)

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            Config.from_file(os.path.join(self.temp_dir.name, 'missing.yaml'))

    def test_digest_changes_with_content(self):
        first = Config()
        second = Config()
        self.assertEqual(first.digest(), second.digest())
        second.set('quadrature.tol', 1e-6)
        self.assertNotEqual(first.digest(), second.digest())


if __name__ == '__main__':
    unittest.main()
