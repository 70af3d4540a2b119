import math
import unittest

import numpy as np

from src.thermal.classical import (
    closed_form_position, closed_form_trajectory, critical_times, critical_times_in, decompose,
    energy, extremal_times, force_consistency_report, hamilton_rhs, integrate_rk4,
    invariant_drift, lagrangian, lagrangian_q_solution, momentum_from_velocity,
    orthogonal_2d_trajectory, orthonormal_completion, planarity_error, planes, position_from_q,
    preset_config, sample_closed_form, trajectory_columns, x0_from_momentum,
)
from src.thermal.exceptions import (BlowUpError, ChartExitError, CriticalTimeError, DomainError,
                                    PoleError, RegimeError)


class TestDecomposition(unittest.TestCase):
    def test_regimes(self):
        expected = {'generic': 'generic', '1d': '1d', 'orthogonal2d': 'generic',
                    'exceptional': 'exceptional'}
        for name, regime in expected.items():
            self.assertEqual(decompose(preset_config(name)).regime, regime, msg=name)

    def test_invariants(self):
        inv = decompose(preset_config('generic'))
        self.assertAlmostEqual(inv.wp_perp, math.sqrt(1.04), places=14)
        self.assertAlmostEqual(inv.phi, math.atan(0.3 / math.sqrt(1.04)), places=14)
        self.assertAlmostEqual(inv.energy, 1.5 * 1.13 / 2, places=14)
        self.assertAlmostEqual(float(np.linalg.norm(inv.nu)), 1.0, places=14)

    def test_orthonormal_completion(self):
        basis = orthonormal_completion([0.6, 0.8, 0.0])
        self.assertTrue(np.allclose(basis @ basis.T, np.eye(3), rtol=0, atol=1e-14))
        with self.assertRaises(DomainError):
            orthonormal_completion([1.0, 1.0])

    def test_preset_dimension(self):
        cfg = preset_config('generic', dimension=2)
        self.assertEqual(cfg.dimension, 2)
        self.assertEqual(preset_config('1d', dimension=1).dimension, 1)
        with self.assertRaises(DomainError):
            preset_config('generic', dimension=1)
        with self.assertRaises(DomainError):
            preset_config('helix')


class TestClosedForm(unittest.TestCase):
    def test_one_dimensional_critical_time(self):
        cfg = preset_config('1d')
        t_c, period = critical_times(cfg)
        self.assertEqual(t_c, 2.0)
        self.assertEqual(period, math.inf)
        self.assertAlmostEqual(closed_form_position(cfg, t_c)[0], -cfg.ell, places=14)
        with self.assertRaises(CriticalTimeError) as ctx:
            closed_form_trajectory(cfg, t_c)
        left, right = ctx.exception.side_limits
        self.assertEqual(left.p[0], -math.inf)
        self.assertEqual(right.p[0], math.inf)
        self.assertTrue(left.at_critical_time)

    def test_generic_critical_and_extremal_planes(self):
        cfg = preset_config('generic')
        t_c, period = critical_times(cfg)
        inv = decompose(cfg)
        self.assertAlmostEqual(period, 2 * math.pi * cfg.ell * cfg.m / inv.wp_perp, places=14)
        critical, extremal = planes(cfg)
        for n in (0, 1, 2):
            self.assertTrue(critical.contains(closed_form_position(cfg, t_c + n * period)))
        self.assertTrue(extremal.contains(closed_form_position(cfg, extremal_times(cfg))))
        with self.assertRaises(CriticalTimeError):
            closed_form_trajectory(cfg, t_c)
        times = critical_times_in(cfg, t_c - 0.1, t_c + 2.5 * period)
        self.assertEqual(times.size, 3)

    def test_regime_errors(self):
        with self.assertRaises(RegimeError):
            critical_times(preset_config('exceptional'))
        with self.assertRaises(RegimeError):
            planes(preset_config('1d'))
        self.assertEqual(critical_times_in(preset_config('exceptional'), 0.0, 10.0).size, 0)
        state = closed_form_trajectory(preset_config('exceptional'), 3.0)
        self.assertTrue(np.array_equal(state.x, [0.5, 0.0, 0.0]))

    def test_satisfies_hamilton_equations(self):
        cfg = preset_config('generic')
        t, h = 1.0, 1e-5
        state = closed_form_trajectory(cfg, t)
        forward = closed_form_trajectory(cfg, t + h)
        backward = closed_form_trajectory(cfg, t - h)
        xdot, pdot = hamilton_rhs(cfg, state)
        self.assertTrue(np.allclose((forward.x - backward.x) / (2 * h), xdot, rtol=0, atol=1e-6))
        self.assertTrue(np.allclose((forward.p - backward.p) / (2 * h), pdot, rtol=0, atol=1e-6))

    def test_orthogonal_2d(self):
        cfg = preset_config('orthogonal2d')
        for t in (0.3, 0.7, 2.9):
            simple = orthogonal_2d_trajectory(cfg, t)
            general = closed_form_trajectory(cfg, t)
            self.assertTrue(np.allclose(simple.x, general.x, rtol=0, atol=1e-12))
            self.assertTrue(np.allclose(simple.p, general.p, rtol=0, atol=1e-12))
        with self.assertRaises(RegimeError):
            orthogonal_2d_trajectory(preset_config('generic', dimension=2), 0.5)

    def test_position_from_momentum(self):
        cfg = preset_config('generic')
        state = closed_form_trajectory(cfg, 0.8)
        x0 = x0_from_momentum(cfg, float(np.dot(cfg.gamma, state.p)))
        self.assertAlmostEqual(x0, float(np.dot(cfg.gamma, state.x)), places=12)


class TestNumericalIntegration(unittest.TestCase):
    def test_rk4_matches_closed_form(self):
        cfg = preset_config('generic')
        t_c, period = critical_times(cfg)
        start, end = t_c + 0.05 * period, t_c + 0.95 * period
        trajectory = integrate_rk4(cfg, closed_form_trajectory(cfg, start), end, period / 1e4)
        final = closed_form_trajectory(cfg, end)
        self.assertTrue(np.allclose(trajectory.xs[-1], final.x, rtol=0, atol=1e-5))
        self.assertTrue(np.allclose(trajectory.ps[-1], final.p, rtol=0, atol=1e-5))
        drift = invariant_drift(cfg, trajectory)
        self.assertLess(drift['energy_drift'], 1e-6)
        self.assertLess(drift['p_perp_drift'], 1e-12)
        self.assertGreater(drift['min_gamma_x'], -cfg.ell)
        self.assertLess(planarity_error(cfg, trajectory), 1e-10)

    def test_blowup_near_critical_time(self):
        cfg = preset_config('1d')
        with self.assertRaises(BlowUpError) as ctx:
            integrate_rk4(cfg, closed_form_trajectory(cfg, 0.0), 2.0, 1e-3, blowup=10.0)
        self.assertLess(ctx.exception.last_state.t, 2.0)
        with self.assertRaises(DomainError):
            integrate_rk4(cfg, closed_form_trajectory(cfg, 0.0), 1.0, 0.0)

    def test_sampled_columns(self):
        cfg = preset_config('1d')
        trajectory = sample_closed_form(cfg, [0.0, 1.0, 2.0, 3.0])
        columns = trajectory_columns(cfg, trajectory)
        self.assertEqual(list(columns), ['t', 'x0', 'x1', 'x2', 'p0', 'p1', 'p2', 'E', 'p_perp'])
        self.assertAlmostEqual(columns['x0'][2], -cfg.ell, places=14)
        self.assertAlmostEqual(columns['E'][2], decompose(cfg).energy, places=14)
        self.assertAlmostEqual(columns['E'][1], decompose(cfg).energy, places=12)


class TestLagrangian(unittest.TestCase):
    def test_q_coordinate(self):
        cfg = preset_config('1d')
        q, qdot = lagrangian_q_solution(cfg, 1.0)
        self.assertAlmostEqual(position_from_q(cfg, q), closed_form_position(cfg, 1.0)[0],
                               places=12)
        self.assertAlmostEqual(qdot, -2.0, places=14)
        with self.assertRaises(ChartExitError):
            lagrangian_q_solution(cfg, 2.0)
        with self.assertRaises(RegimeError):
            lagrangian_q_solution(preset_config('generic'), 1.0)

    def test_mass_and_momentum(self):
        cfg = preset_config('generic')
        state = closed_form_trajectory(cfg, 0.4)
        xdot, _ = hamilton_rhs(cfg, state)
        self.assertTrue(np.allclose(momentum_from_velocity(cfg, state.x, xdot), state.p,
                                    rtol=0, atol=1e-12))
        self.assertAlmostEqual(lagrangian(cfg, state.x, xdot), energy(cfg, state), places=12)
        with self.assertRaises(PoleError):
            lagrangian(cfg, [-1.0, 0.0, 0.0], [1.0, 0.0, 0.0])

    def test_force_forms(self):
        cfg = preset_config('generic')
        report = force_consistency_report(cfg, closed_form_trajectory(cfg, 0.4))
        self.assertLess(report['invariant_discrepancy'], 1e-12)
        self.assertAlmostEqual(report['direct_across'], report['invariant_across'], places=12)
        self.assertGreater(report['printed_discrepancy'], 1e-3)


if __name__ == '__main__':
    unittest.main()
