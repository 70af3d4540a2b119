import json
import math
import shutil
import tempfile
import unittest
from pathlib import Path

import numpy as np

from src.thermal.exceptions import ConfigError, ExportError, FileError
from src.thermal.exporters import (
    CSVExporter, JSONExporter, PlotScriptExporter, create_exporter, read_metadata, read_table,
    read_wavefunction, to_jsonable, write_wavefunction,
)
from src.thermal.models import ExperimentConfig, Grid
from src.thermal.templates import TemplateManager
from src.thermal.validators import parse_complex, validate_experiment
from src.thermal.wavefunction import canonical_state


class TestExporters(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.metadata = {'config_hash': 'abc123', 'tol': 1e-6, 'command': 'specfun'}

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_csv_format(self):
        exporter = CSVExporter(self.temp_dir, self.metadata)
        path = exporter.export({'x': [0.1, 1.0 / 3.0], 'y': [2.0, -1e-20]}, 'table.csv')
        lines = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'x,y')
        self.assertEqual(lines[2].split(',')[0], '0.33333333333333331')
        self.assertEqual(lines[3:], ['# command: specfun', '# config_hash: abc123',
                                     '# tol: 1e-06'])
        frame = read_table(path)
        self.assertEqual(len(frame), 2)
        self.assertAlmostEqual(frame['x'].iloc[1], 1.0 / 3.0, places=15)
        self.assertEqual(read_metadata(path)['config_hash'], 'abc123')

    def test_csv_is_deterministic(self):
        exporter = CSVExporter(self.temp_dir, self.metadata)
        first = exporter.export({'x': np.linspace(0, 1, 11)}, 'a.csv').read_bytes()
        second = exporter.export({'x': np.linspace(0, 1, 11)}, 'a.csv').read_bytes()
        self.assertEqual(first, second)

    def test_csv_needs_columns(self):
        with self.assertRaises(ExportError):
            CSVExporter(self.temp_dir).export({}, 'empty.csv')

    def test_json_format(self):
        exporter = JSONExporter(self.temp_dir, self.metadata)
        path = exporter.export({'s_closed': 1 + 0.5j, 'values': np.array([1.0, math.nan]),
                                'passed': np.bool_(True)}, 'result.json')
        payload = json.loads(path.read_text(encoding='utf-8'))
        self.assertEqual(payload['s_closed'], {'re': 1.0, 'im': 0.5})
        self.assertEqual(payload['values'], [1.0, 'nan'])
        self.assertIs(payload['passed'], True)
        self.assertEqual(payload['metadata']['command'], 'specfun')
        self.assertEqual(list(payload), sorted(payload))

    def test_to_jsonable_nested(self):
        value = to_jsonable({1: (np.int64(3), [2j]), 'inf': math.inf})
        self.assertEqual(value, {'1': [3, [{'re': 0.0, 'im': 2.0}]], 'inf': 'inf'})

    def test_wavefunction_file(self):
        psi = canonical_state('chirped', Grid.uniform(-4.0, 4.0, 41))
        path = write_wavefunction(CSVExporter(self.temp_dir), psi, 'psi.csv')
        back = read_wavefunction(path)
        self.assertTrue(np.allclose(back.values, psi.values, rtol=0, atol=1e-15))
        with self.assertRaises(FileError):
            read_table(Path(self.temp_dir) / 'missing.csv')

    def test_create_exporter(self):
        self.assertIsInstance(create_exporter('CSV', self.temp_dir), CSVExporter)
        self.assertIsInstance(create_exporter('plot', self.temp_dir), PlotScriptExporter)
        with self.assertRaises(ExportError):
            create_exporter('xlsx', self.temp_dir)


class TestPlotScript(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_render(self):
        data = {'title': 'K0 envelope', 'logy': True,
                'series': [{'csv': 'specfun_table.csv', 'x': 'x', 'y': 'k0'}]}
        path = create_exporter('plot', self.temp_dir).export(data, 'specfun_plot.py')
        text = path.read_text(encoding='utf-8')
        self.assertIn("'specfun_table.csv'", text)
        self.assertIn('set_yscale("log")', text)
        self.assertIn("'specfun_plot.png'", text)
        compile(text, str(path), 'exec')

    def test_requires_series(self):
        with self.assertRaises(ExportError):
            TemplateManager().render_plot_script({'title': 'empty'},
                                                 Path(self.temp_dir) / 'plot.py')


class TestValidators(unittest.TestCase):
    def test_defaults(self):
        params = validate_experiment(ExperimentConfig('specfun', {'points': '50'}))
        self.assertEqual(params, {'x_min': 0.1, 'x_max': 20.0, 'points': 50})
        params = validate_experiment(ExperimentConfig('scatter', {'states': 'gaussian,bump'}))
        self.assertEqual(params['states'], ('gaussian', 'bump'))
        self.assertIsNone(params['preset'])

    def test_rejections(self):
        cases = [
            ('specfun', {'sigma': 1.0}),
            ('specfun', {'points': 2.5}),
            ('specfun', {'x_min': 0.0}),
            ('kernel', {'name': 'Q'}),
            ('kernel', {'x_min': 3.0}),
            ('propagate', {'lambda': -1.0}),
            ('scatter', {'preset': 'gauss2', 'g_hat_file': 'g.csv'}),
            ('classical', {'t_start': 2.0, 't_end': 1.0}),
            ('selftest', {'criteria': '1,12'}),
        ]
        for command, params in cases:
            with self.assertRaises(ConfigError, msg=f"{command} {params}"):
                validate_experiment(ExperimentConfig(command, params))

    def test_parse_complex(self):
        self.assertEqual(parse_complex('1+2i'), 1 + 2j)
        self.assertEqual(parse_complex({'re': 0.5, 'im': -1}), 0.5 - 1j)
        self.assertEqual(parse_complex([0, 3]), 3j)
        self.assertEqual(parse_complex(2), 2 + 0j)
        with self.assertRaises(ValueError):
            parse_complex([1, 2, 3])


if __name__ == '__main__':
    unittest.main()
