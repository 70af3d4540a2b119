#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# src/main.py

"""熱哈密頓工具箱命令列介面

用法:
    thermal-toolkit [--config PATH] [--out DIR] [--tol FLOAT] [--seed INT]
                    [--threads INT] <command> [指令參數...]

結束碼: 0 成功；1 數值失敗或驗收項目未通過；2 參數/配置錯誤
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from src.thermal import __version__, setup_logging
from src.thermal.config import Config
from src.thermal.exceptions import ConfigError, ThermalToolkitError
from src.thermal.experiments import ExperimentRunner
from src.thermal.models import COMMANDS, ExperimentConfig, RunConfig
from src.thermal.validators import COMMAND_SCHEMAS
from src.utils.logger import RunLogger

logger = logging.getLogger('thermal.cli')

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

COMMAND_HELP = {
    'specfun': '特殊函數表 (J₀, I₀, K₀, ker, kei)',
    'kernel': '在網格上取樣積分核',
    'propagate': '以 U_T(t) 或 V_θ(t) 傳播波函數',
    'resolvent': '預解核一致性報告與 Z 核取樣',
    'spectrum': '波函數的譜密度',
    'scatter': '散射矩陣(封閉式與數值)',
    'classical': '古典軌跡 CSV',
    'selftest': '執行驗收測試組',
}


class ArgumentParser(argparse.ArgumentParser):
    """用法錯誤時以 ConfigError 取代 SystemExit"""

    def error(self, message: str):
        raise ConfigError(f"命令列參數錯誤: {message}")


def _flag(key: str) -> str:
    return '--' + key.replace('_', '-')


def build_parser() -> argparse.ArgumentParser:
    """建立命令列解析器，子指令參數由驗證結構產生"""
    parser = ArgumentParser(prog='thermal-toolkit', description='一維熱哈密頓數值工具箱')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--config', help='YAML/JSON 配置檔')
    parser.add_argument('--out', help='輸出目錄')
    parser.add_argument('--tol', type=float, help='數值容許誤差')
    parser.add_argument('--seed', type=int, help='亂數種子')
    parser.add_argument('--threads', type=int, help='內部平行數')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                        help='日誌等級')
    parser.add_argument('--plot-script', action='store_true', help='一併產生繪圖腳本')

    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True
    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=COMMAND_HELP[command])
        for key, (_, default) in COMMAND_SCHEMAS[command].items():
            if isinstance(default, bool):
                sub.add_argument(_flag(key), dest=key, action='store_const', const=True,
                                 default=None)
            else:
                sub.add_argument(_flag(key), dest=key, default=None,
                                 help=f"預設: {default}" if default is not None else None)
    return parser


def load_run_file(path: Optional[str]) -> Tuple[Dict[str, Any], Dict[str, Any], Dict[str, Any]]:
    """讀取配置檔，分出工具箱配置、指令參數與執行設定

    Returns:
        tuple: (config 區段, params 區段, run 區段)
    """
    if not path:
        return {}, {}, {}
    data = Config._load_yaml(Path(path))
    params = data.pop('params', None) or {}
    run = data.pop('run', None) or {}
    data.pop('command', None)
    if not isinstance(params, dict) or not isinstance(run, dict):
        raise ConfigError(f"配置檔的 params/run 必須為對照表: {path}")
    return data, params, run


def resolve(args: argparse.Namespace) -> Tuple[Config, RunConfig, ExperimentConfig]:
    """合併預設值、配置檔與命令列旗標(旗標優先)"""
    file_config, file_params, file_run = load_run_file(args.config)
    config = Config(file_config)

    run_values = {
        'tol': config.get('cli.tol', 1e-6),
        'seed': config.get('cli.seed', 0),
        'threads': config.get('cli.threads', 1),
        'out_dir': config.get('cli.out_dir', 'results'),
        'log_level': config.get('logging.level', 'INFO'),
    }
    run_values.update(file_run)
    flags = {'tol': args.tol, 'seed': args.seed, 'threads': args.threads,
             'out_dir': args.out, 'log_level': args.log_level}
    run_values.update({k: v for k, v in flags.items() if v is not None})
    unknown = sorted(set(run_values) - set(RunConfig.__dataclass_fields__))
    if unknown:
        raise ConfigError(f"未知的執行設定: {unknown}")
    run = RunConfig.from_dict(run_values)
    run.validate()

    params = dict(file_params)
    for key in COMMAND_SCHEMAS[args.command]:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    experiment = ExperimentConfig(args.command, params, run.out_dir, run.seed)
    experiment.validate()
    return config, run, experiment


def main(argv: Optional[List[str]] = None) -> int:
    """主程式進入點

    Returns:
        int: 結束碼
    """
    try:
        args = build_parser().parse_args(argv)
        config, run, experiment = resolve(args)
    except ConfigError as e:
        print(f"錯誤: {e}", file=sys.stderr)
        return EXIT_USAGE

    setup_logging(log_file=config.get('logging.file'), log_level=run.log_level)
    run_logger = RunLogger(str(Path(run.out_dir) / 'logs'))
    run_logger.log_run_start(experiment.command, config.digest(), experiment.params)

    exit_code = EXIT_OK
    outputs: List[str] = []
    start = time.perf_counter()
    try:
        runner = ExperimentRunner(config, run, args.plot_script,
                                  on_criterion=lambda c: run_logger.log_criterion(c.to_dict()))
        result = runner.run(experiment)
        outputs = result.outputs
        if not result.passed:
            exit_code = EXIT_FAILURE
            logger.error(f"{experiment.command} 未通過: {', '.join(map(str, result.failing))}")
            run_logger.log_error(f"{experiment.command} 未通過", {'failing': result.failing})
        else:
            logger.info(f"{experiment.command} 完成: {result.summary}")
    except ConfigError as e:
        exit_code = EXIT_USAGE
        logger.error(f"參數錯誤: {e}")
        run_logger.log_error(e.message, e.details)
    except ThermalToolkitError as e:
        exit_code = EXIT_FAILURE
        logger.error(f"執行失敗: {e}", exc_info=True)
        run_logger.log_error(e.message, e.details)
    finally:
        run_logger.log_performance(experiment.command, time.perf_counter() - start)
        run_logger.log_run_finish(experiment.command, exit_code, outputs)
        run_logger.close()

    for path in outputs:
        print(path)
    return exit_code


if __name__ == '__main__':
    sys.exit(main())
