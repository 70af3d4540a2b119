import unittest

from src.thermal.acceptance import RUNTIME_LIMITS, AcceptanceRunner, run_acceptance
from src.thermal.exceptions import AccuracyError, DomainError


class TestAcceptanceRunner(unittest.TestCase):
    def setUp(self):
        self.runner = AcceptanceRunner(seed=0, quick=True)

    def test_cheap_criteria_pass(self):
        for number in (1, 5, 8, 11):
            result = self.runner.run_one(number)
            self.assertTrue(result.passed, msg=f"{number}: {result.measurements}")
            self.assertEqual(result.message, '')

    def test_classical_quick(self):
        result = self.runner.run_one(10)
        self.assertTrue(result.passed, msg=str(result.measurements))
        self.assertLess(result.measurements['one_d_wall_error'], 1e-9)
        self.assertEqual(result.measurements['runtime_limit'], RUNTIME_LIMITS[10])

    def test_same_seed_same_measurements(self):
        first = AcceptanceRunner(seed=7, quick=True).run_one(5).measurements
        second = AcceptanceRunner(seed=7, quick=True).run_one(5).measurements
        self.assertEqual(first, second)

    def test_errors_become_failures(self):
        def broken(rng):
            raise AccuracyError("積分未收斂")

        self.runner.criteria[1] = ('broken', broken)
        result = self.runner.run_one(1)
        self.assertFalse(result.passed)
        self.assertIn('積分未收斂', result.message)

    def test_report_and_callback(self):
        seen = []
        report = run_acceptance(quick=True, selected=[8, 1], on_result=seen.append)
        self.assertEqual([c.number for c in report.criteria], [1, 8])
        self.assertEqual([c.number for c in seen], [1, 8])
        self.assertTrue(report.passed)
        self.assertEqual(report.to_dict()['failing'], [])

    def test_unknown_criterion(self):
        with self.assertRaises(DomainError):
            self.runner.run([12])


if __name__ == '__main__':
    unittest.main()
