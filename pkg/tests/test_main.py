import json
import shutil
import tempfile
import unittest
from pathlib import Path

import yaml

from src.main import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, build_parser, main, resolve
from src.thermal.exporters import read_metadata, read_table
from src.utils.logger import RunLogger


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.out = Path(self.temp_dir) / 'results'

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def run_cli(self, *argv) -> int:
        return main(['--out', str(self.out), *argv])

    def write_config(self, data) -> str:
        path = Path(self.temp_dir) / 'run.yaml'
        path.write_text(yaml.safe_dump(data), encoding='utf-8')
        return str(path)

    def test_specfun(self):
        self.assertEqual(self.run_cli('specfun', '--points', '20', '--x-max', '5'), EXIT_OK)
        frame = read_table(self.out / 'specfun.csv')
        self.assertEqual(len(frame), 20)
        self.assertEqual(read_metadata(self.out / 'specfun.csv')['command'], 'specfun')
        self.assertTrue((self.out / 'logs' / 'run.log').exists())

    def test_plot_script(self):
        self.assertEqual(self.run_cli('--plot-script', 'specfun', '--points', '10'), EXIT_OK)
        self.assertTrue((self.out / 'plot_specfun.py').exists())

    def test_scatter_zero(self):
        code = self.run_cli('scatter', '--preset', 'zero', '--states', 'gaussian')
        self.assertEqual(code, EXIT_OK)
        payload = json.loads((self.out / 'scatter.json').read_text(encoding='utf-8'))
        self.assertEqual(payload['s_closed'], {'re': 1.0, 'im': 0.0})
        self.assertAlmostEqual(payload['s_numeric']['gaussian']['re'], 1.0, places=12)
        self.assertEqual(payload['g_hat'], 'zero')

    def test_classical_1d(self):
        code = self.run_cli('classical', '--preset', '1d', '--points', '5', '--t-end', '4')
        self.assertEqual(code, EXIT_OK)
        frame = read_table(self.out / 'classical.csv')
        at_wall = frame[frame['t'] == 2.0]
        self.assertEqual(len(at_wall), 1)
        self.assertAlmostEqual(at_wall['x0'].iloc[0], -1.0, places=14)
        self.assertEqual(read_metadata(self.out / 'classical.csv')['regime'], '1d')

    def test_selftest_logs_criteria(self):
        self.assertEqual(self.run_cli('selftest', '--criteria', '1', '--quick'), EXIT_OK)
        payload = json.loads((self.out / 'selftest.json').read_text(encoding='utf-8'))
        self.assertTrue(payload['passed'])
        run_logger = RunLogger(str(self.out / 'logs'))
        history = run_logger.get_criteria_history()
        run_logger.close()
        self.assertEqual(history[-1]['number'], 1)

    def test_usage_errors(self):
        self.assertEqual(self.run_cli('specfun', '--points', 'abc'), EXIT_USAGE)
        self.assertEqual(self.run_cli('specfun', '--sigma', '1'), EXIT_USAGE)
        self.assertEqual(self.run_cli('transform'), EXIT_USAGE)
        self.assertEqual(self.run_cli('--threads', '0', 'specfun'), EXIT_USAGE)

    def test_config_file_params(self):
        path = self.write_config({'params': {'sigma': 1.0}})
        self.assertEqual(self.run_cli('--config', path, 'specfun'), EXIT_USAGE)
        path = self.write_config({'run': {'colour': 'red'}})
        self.assertEqual(self.run_cli('--config', path, 'specfun'), EXIT_USAGE)

    def test_flags_override_file(self):
        path = self.write_config({'params': {'points': 50, 'x_max': 5.0}, 'run': {'seed': 3}})
        args = build_parser().parse_args(['--config', path, '--seed', '4', 'specfun',
                                          '--points', '7'])
        config, run, experiment = resolve(args)
        self.assertEqual(experiment.params, {'points': '7', 'x_max': 5.0})
        self.assertEqual(run.seed, 4)
        self.assertEqual(config.get('specfun.k0.crossover'), 12.0)

    def test_numeric_failure_exit_code(self):
        code = self.run_cli('scatter', '--preset', 'linear', '--states', 'gaussian')
        self.assertEqual(code, EXIT_FAILURE)
        self.assertTrue((self.out / 'logs' / 'error.log').exists())


if __name__ == '__main__':
    unittest.main()
