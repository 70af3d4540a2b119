# src/thermal/experiments.py

"""CLI 指令執行器

每個指令讀取已驗證的參數，呼叫對應模組，並以固定檔名寫出 CSV/JSON。
"""

import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import yaml

from .acceptance import run_acceptance
from .classical import (
    closed_form_trajectory, critical_times, critical_times_in, decompose, integrate_rk4,
    preset_config, sample_closed_form, trajectory_columns,
)
from .config import Config
from .exceptions import ConfigError, FileError, RegimeError
from .exporters import create_exporter, read_wavefunction, write_wavefunction
from .kernels import KERNEL_INFO, kernel_lattice, kernel_Z, named_kernel, run_conformance
from .models import (
    ClassicalConfig, CriterionResult, ExperimentConfig, ExperimentResult, Grid, RunConfig,
    Wavefunction,
)
from .operators import propagate_HT, propagate_V
from .scattering import (
    check_decay_hypothesis, load_g_hat_csv, preset_spec, state_grid, scatter_report,
)
from .specfun import special_function_table
from .spectral import spectral_density_momentum, spectral_density_Pi
from .validators import parse_complex, validate_experiment
from .wavefunction import canonical_state, default_grid, norm

logger = logging.getLogger(__name__)

# 各指令的固定輸出檔名
OUTPUT_FILES = {
    'specfun': 'specfun.csv',
    'kernel': 'kernel_{name}.csv',
    'propagate': 'propagate.csv',
    'resolvent': ('resolvent_conformance.json', 'resolvent_Z.csv'),
    'spectrum': 'spectrum.csv',
    'scatter': 'scatter.json',
    'classical': 'classical.csv',
    'selftest': 'selftest.json',
}


class ExperimentRunner:
    """執行單一 CLI 指令"""

    def __init__(self, config: Config, run: RunConfig, plot_script: bool = False,
                 on_criterion: Optional[Callable[[CriterionResult], None]] = None):
        """
        Args:
            config: 合併後的工具箱配置
            run: 執行設定(輸出目錄、容許誤差、種子、執行緒數)
            plot_script: 是否一併產生繪圖腳本
            on_criterion: selftest 每完成一項時的回呼
        """
        run.validate()
        self.config = config
        self.run_config = run
        self.plot_script = plot_script
        self.on_criterion = on_criterion
        self.out_dir = Path(run.out_dir)
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.handlers: Dict[str, Callable[[Dict[str, Any]], ExperimentResult]] = {
            'specfun': self.run_specfun,
            'kernel': self.run_kernel,
            'propagate': self.run_propagate,
            'resolvent': self.run_resolvent,
            'spectrum': self.run_spectrum,
            'scatter': self.run_scatter,
            'classical': self.run_classical,
            'selftest': self.run_selftest,
        }

    def run(self, experiment: ExperimentConfig) -> ExperimentResult:
        """驗證參數並執行指令

        Raises:
            ConfigError: 參數不符合指令結構
            ThermalToolkitError: 數值或檔案錯誤
        """
        params = validate_experiment(experiment)
        self.command = experiment.command
        self.logger.info(f"執行指令 {experiment.command}: {params}")
        result = self.handlers[experiment.command](params)
        self.logger.info(f"指令 {experiment.command} 完成，輸出 {len(result.outputs)} 個檔案")
        return result

    # ---------- 共用 ----------

    def _metadata(self, **extra) -> Dict[str, Any]:
        metadata = {
            'command': self.command,
            'config_hash': self.config.digest(),
            'seed': self.run_config.seed,
            'tol': self.run_config.tol,
        }
        metadata.update(extra)
        return metadata

    def _csv(self, data, filename: str, **extra) -> str:
        exporter = create_exporter('csv', self.out_dir, self._metadata())
        return str(exporter.export(data, filename, extra))

    def _json(self, data: Dict[str, Any], filename: str) -> str:
        exporter = create_exporter('json', self.out_dir, self._metadata())
        return str(exporter.export(data, filename))

    def _plot(self, csv_name: str, x: str, ys: List[str], title: str,
              logy: bool = False) -> Optional[str]:
        if not self.plot_script:
            return None
        exporter = create_exporter('plot', self.out_dir)
        series = [{'csv': csv_name, 'x': x, 'y': y} for y in ys]
        path = exporter.export({'title': title, 'series': series, 'xlabel': x, 'logy': logy},
                               f"plot_{self.command}.py")
        return str(path)

    def _finish(self, outputs: List[Optional[str]], **kwargs) -> ExperimentResult:
        return ExperimentResult(self.command, [o for o in outputs if o], **kwargs)

    def _input_state(self, params: Dict[str, Any]) -> Wavefunction:
        if params.get('state_file'):
            return read_wavefunction(params['state_file'])
        grid = default_grid(self.config.get('wavefunction.span', 20.0),
                            self.config.get('wavefunction.points', 2049))
        return canonical_state(params['state'], grid)

    # ---------- 指令 ----------

    def run_specfun(self, params: Dict[str, Any]) -> ExperimentResult:
        xs = np.linspace(params['x_min'], params['x_max'], params['points'])
        table = special_function_table(xs)
        csv = self._csv(table, OUTPUT_FILES['specfun'])
        plot = self._plot(Path(csv).name, 'x', ['j0', 'k0', 'ker', 'kei'], 'Special functions')
        return self._finish([csv, plot])

    def run_kernel(self, params: Dict[str, Any]) -> ExperimentResult:
        name = params['name']
        variant = params['variant'] or self.config.get('kernels.default_variant')
        kernel = named_kernel(name, tau=params['tau'], alpha=params['alpha'],
                              zeta=params['zeta'], theta=params['theta'], variant=variant)
        xs = np.linspace(params['x_min'], params['x_max'], params['points'])
        frame = kernel_lattice(kernel, xs, xs)
        info = KERNEL_INFO[name]
        csv = self._csv(frame, OUTPUT_FILES['kernel'].format(name=name), kernel=name,
                        singular_locus=';'.join(info.singular_locus),
                        decay_class=info.decay_class)
        return self._finish([csv])

    def run_propagate(self, params: Dict[str, Any]) -> ExperimentResult:
        psi = self._input_state(params)
        grid = Grid.uniform(params['x_min'], params['x_max'], params['points'])
        backend = params['backend']
        if backend == 'V':
            out = propagate_V(params['theta'], params['t'], psi, grid)
        else:
            out = propagate_HT(params['lambda'], params['t'], psi, backend=backend, grid=grid,
                               tol=min(self.run_config.tol * 1e-3, 1e-9))
        exporter = create_exporter('csv', self.out_dir, self._metadata())
        csv = str(write_wavefunction(exporter, out, OUTPUT_FILES['propagate'], {
            'backend': backend,
            'lambda': params['lambda'],
            't': params['t'],
            'norm_in': repr(norm(psi)),
            'norm_out': repr(norm(out)),
        }))
        plot = self._plot(Path(csv).name, 'x', ['re', 'im'], f"Propagated state ({backend})")
        return self._finish([csv, plot], summary={'norm_out': norm(out)})

    def run_resolvent(self, params: Dict[str, Any]) -> ExperimentResult:
        lattice = params['lattice'] or tuple(self.config.get('kernels.conformance.lattice'))
        alphas = [parse_complex(a) for a in self.config.get('kernels.conformance.alphas')]
        tol = params['conformance_tol'] or self.config.get('kernels.conformance.tol', 1e-5)
        report = run_conformance(lattice, alphas, tol=tol, threads=self.run_config.threads)

        json_name, csv_name = OUTPUT_FILES['resolvent']
        document = self._json(report.to_dict(), json_name)
        alpha = params['alpha']
        frame = kernel_lattice(lambda x, y: kernel_Z(alpha, x, y, report.selected_variant),
                               lattice, lattice)
        csv = self._csv(frame, csv_name, alpha=repr(alpha), variant=report.selected_variant)
        failing = [] if report.passed else ['conformance']
        return self._finish([document, csv], passed=report.passed, failing=failing,
                            summary={'selected_variant': report.selected_variant})

    def run_spectrum(self, params: Dict[str, Any]) -> ExperimentResult:
        psi = self._input_state(params)
        energies = np.linspace(params['e_min'], params['e_max'], params['points'])
        if params['operator'] == 'Pi':
            density = spectral_density_Pi(params['theta'], psi, energies)
        else:
            density = spectral_density_momentum(psi, energies)
        csv = self._csv({'energy': density.energies, 'density': density.density},
                        OUTPUT_FILES['spectrum'], operator=params['operator'],
                        theta=params['theta'], total_mass=repr(density.total_mass()))
        plot = self._plot(Path(csv).name, 'energy', ['density'], 'Spectral density')
        return self._finish([csv, plot], summary={'total_mass': density.total_mass()})

    def run_scatter(self, params: Dict[str, Any]) -> ExperimentResult:
        lam = params['lambda']
        if params['g_hat_file']:
            spec = load_g_hat_csv(params['g_hat_file'], lam)
        else:
            spec = preset_spec(params['preset'] or self.config.get('scattering.preset'), lam)
        grid = state_grid()
        states = {name: canonical_state(name, grid) for name in params['states']}
        schedule = self.config.get('scattering.t_schedule')
        tol = self.config.get('scattering.tol', 1e-5)
        report = scatter_report(spec, states, schedule=schedule, tol=tol)
        report.update({
            'g_hat': spec.name,
            'lambda': lam,
            'decay_hypothesis': check_decay_hypothesis(spec),
            's_modulus_error': abs(abs(report['s_closed']) - 1.0),
        })
        document = self._json(report, OUTPUT_FILES['scatter'])
        worst = max(report['probe_residuals'].values(), default=0.0)
        return self._finish([document], summary={'max_residual': worst})

    def _classical_config(self, params: Dict[str, Any]) -> ClassicalConfig:
        if not params['system_file']:
            return preset_config(params['preset'], params['dimension'])
        path = Path(params['system_file'])
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f)
        except FileNotFoundError:
            raise FileError(f"找不到系統設定檔: {path}")
        except yaml.YAMLError as e:
            raise FileError(f"系統設定檔格式錯誤: {path}", {'error': str(e)})
        try:
            return ClassicalConfig.from_dict(data)
        except (TypeError, KeyError) as e:
            raise ConfigError(f"系統設定不完整: {path}", {'error': str(e)})

    def _time_span(self, cfg: ClassicalConfig, t_start: float) -> float:
        """未指定 t_end 時的預設終止時間"""
        try:
            t_c, period = critical_times(cfg)
        except RegimeError:
            return t_start + 1.0
        if math.isfinite(period):
            return t_start + period
        if t_c > t_start:
            return t_start + 2.0 * (t_c - t_start)
        return t_start + 4.0

    def run_classical(self, params: Dict[str, Any]) -> ExperimentResult:
        cfg = self._classical_config(params)
        inv = decompose(cfg)
        t_start = params['t_start']
        t_end = params['t_end'] if params['t_end'] is not None else self._time_span(cfg, t_start)

        if params['method'] == 'closed':
            times = np.linspace(t_start, t_end, params['points'])
            times = np.union1d(times, critical_times_in(cfg, t_start, t_end))
            trajectory = sample_closed_form(cfg, times)
        else:
            dt = params['dt']
            if dt is None:
                steps = self.config.get('classical.steps_per_period', 10000)
                period = critical_times(cfg)[1] if inv.regime == 'generic' else t_end - t_start
                dt = period / steps
            start = closed_form_trajectory(cfg, t_start)
            trajectory = integrate_rk4(cfg, start, t_end, dt,
                                       blowup=self.config.get('classical.blowup_momentum', 1e8))

        extra = {'regime': inv.regime, 'method': params['method'], 'ell': repr(cfg.ell),
                 'energy': repr(inv.energy), 'p_perp': repr(inv.wp_perp)}
        if inv.regime != 'exceptional':
            t_c, period = critical_times(cfg)
            extra.update({'t_c': repr(t_c), 'period': repr(period)})
        csv = self._csv(trajectory_columns(cfg, trajectory), OUTPUT_FILES['classical'], **extra)
        plot = self._plot(Path(csv).name, 't', ['x0', 'p0'], f"Classical trajectory ({inv.regime})")
        return self._finish([csv, plot], summary={'regime': inv.regime, 'samples': len(trajectory)})

    def run_selftest(self, params: Dict[str, Any]) -> ExperimentResult:
        report = run_acceptance(seed=self.run_config.seed, quick=params['quick'],
                                threads=self.run_config.threads, selected=params['criteria'],
                                on_result=self.on_criterion)
        document = self._json(report.to_dict(), OUTPUT_FILES['selftest'])
        return self._finish([document], passed=report.passed, failing=report.failing,
                            summary={'criteria': len(report.criteria)})


def run_experiment(experiment: ExperimentConfig, config: Optional[Config] = None,
                   run: Optional[RunConfig] = None, plot_script: bool = False) -> ExperimentResult:
    """以預設配置執行一個指令"""
    config = config or Config()
    run = run or RunConfig(out_dir=experiment.output_path, seed=experiment.seed)
    return ExperimentRunner(config, run, plot_script).run(experiment)


__all__ = ['ExperimentRunner', 'run_experiment', 'OUTPUT_FILES']
