# src/thermal/validators.py

import logging
import math
from typing import Any, Callable, Dict, Optional, Tuple

from .exceptions import ConfigError
from .models import ExperimentConfig

logger = logging.getLogger(__name__)


def parse_complex(value: Any) -> complex:
    """接受數字、'1+1j' 字串、{'re','im'} 或 [re, im]"""
    if isinstance(value, dict):
        return complex(float(value['re']), float(value['im']))
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"複數需要兩個分量: {value}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(' ', '').replace('i', 'j'))
    return complex(value)


def _float(value: Any) -> float:
    result = float(value)
    if not math.isfinite(result):
        raise ValueError("必須為有限值")
    return result


def _int(value: Any) -> int:
    if isinstance(value, bool) or float(value) != int(float(value)):
        raise ValueError("必須為整數")
    return int(float(value))


def _str(value: Any) -> str:
    return str(value)


def _float_list(value: Any) -> Tuple[float, ...]:
    if isinstance(value, str):
        value = [v for v in value.split(',') if v.strip()]
    return tuple(_float(v) for v in value)


def _int_list(value: Any) -> Tuple[int, ...]:
    if isinstance(value, str):
        value = [v for v in value.split(',') if v.strip()]
    return tuple(_int(v) for v in value)


def _bool(value: Any) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ('1', 'true', 'yes', 'on')
    return bool(value)


def _choice(*allowed: str) -> Callable[[Any], str]:
    def convert(value: Any) -> str:
        value = str(value)
        if value not in allowed:
            raise ValueError(f"必須為 {list(allowed)} 之一")
        return value
    return convert


# (轉換函數, 預設值)；預設值 None 表示可省略
Schema = Dict[str, Tuple[Callable[[Any], Any], Any]]

COMMAND_SCHEMAS: Dict[str, Schema] = {
    'specfun': {
        'x_min': (_float, 0.1),
        'x_max': (_float, 20.0),
        'points': (_int, 200),
    },
    'kernel': {
        'name': (_choice('B', 'U', 'Z', 'green_p', 'resolvent_pi'), 'Z'),
        'tau': (_float, 1.0),
        'alpha': (parse_complex, 1j),
        'zeta': (parse_complex, 1j),
        'theta': (_float, 0.0),
        'variant': (_choice('paper', 'minmax'), None),
        'x_min': (_float, -2.0),
        'x_max': (_float, 2.0),
        'points': (_int, 21),
    },
    'propagate': {
        'lambda': (_float, 1.0),
        't': (_float, 0.5),
        'backend': (_choice('conjugation', 'kernel', 'V'), 'conjugation'),
        'theta': (_float, 0.0),
        'state': (_choice('gaussian', 'hermite1', 'shifted', 'chirped', 'bump'), 'gaussian'),
        'state_file': (_str, None),
        'x_min': (_float, -6.0),
        'x_max': (_float, 6.0),
        'points': (_int, 240),
    },
    'resolvent': {
        'lattice': (_float_list, None),
        'alpha': (parse_complex, 1j),
        'conformance_tol': (_float, None),
    },
    'spectrum': {
        'operator': (_choice('Pi', 'momentum'), 'Pi'),
        'theta': (_float, 0.0),
        'state': (_choice('gaussian', 'hermite1', 'shifted', 'chirped', 'bump'), 'gaussian'),
        'state_file': (_str, None),
        'e_min': (_float, -5.0),
        'e_max': (_float, 5.0),
        'points': (_int, 201),
    },
    'scatter': {
        'preset': (_choice('zero', 'gauss2', 'gauss4', 'lorentz', 'linear'), None),
        'g_hat_file': (_str, None),
        'lambda': (_float, 1.0),
        'states': (lambda v: tuple(str(p) for p in (v.split(',') if isinstance(v, str) else v)),
                   ('gaussian', 'shifted', 'chirped')),
    },
    'classical': {
        'preset': (_choice('generic', '1d', 'orthogonal2d', 'exceptional'), 'generic'),
        'system_file': (_str, None),
        'dimension': (_int, None),
        'method': (_choice('closed', 'rk4'), 'closed'),
        't_start': (_float, 0.0),
        't_end': (_float, None),
        'points': (_int, 1001),
        'dt': (_float, None),
    },
    'selftest': {
        'criteria': (_int_list, None),
        'quick': (_bool, False),
    },
}


class ParamsValidator:
    """指令參數驗證器"""

    def __init__(self, schemas: Optional[Dict[str, Schema]] = None):
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.schemas = schemas or COMMAND_SCHEMAS

    def validate(self, experiment: ExperimentConfig) -> Dict[str, Any]:
        """驗證並補齊指令參數

        Args:
            experiment: 實驗設定

        Returns:
            dict: 轉換型別並補上預設值的參數

        Raises:
            ConfigError: 未知指令、未知參數或型別錯誤
        """
        experiment.validate()
        schema = self.schemas[experiment.command]
        unknown = sorted(set(experiment.params) - set(schema))
        if unknown:
            raise ConfigError(f"{experiment.command} 不接受參數: {unknown}",
                              {'allowed': sorted(schema)})

        params: Dict[str, Any] = {}
        for key, (convert, default) in schema.items():
            value = experiment.params.get(key)
            if value is None:
                params[key] = default
                continue
            try:
                params[key] = convert(value)
            except (TypeError, ValueError, KeyError) as e:
                raise ConfigError(f"參數 {key} 無效: {value!r}", {'error': str(e)})

        self._validate_ranges(experiment.command, params)
        self.logger.debug(f"{experiment.command} 參數驗證通過: {params}")
        return params

    def _validate_ranges(self, command: str, params: Dict[str, Any]):
        """跨欄位與數值範圍檢查"""
        if 'points' in params and params['points'] is not None and params['points'] < 2:
            raise ConfigError("points 至少為 2", {'points': params['points']})
        for lo, hi in (('x_min', 'x_max'), ('e_min', 'e_max')):
            if lo in params and not params[lo] < params[hi]:
                raise ConfigError(f"需要 {lo} < {hi}", {lo: params[lo], hi: params[hi]})
        if command == 'specfun' and params['x_min'] <= 0:
            raise ConfigError("specfun 的網格必須為正數", {'x_min': params['x_min']})
        if 'lambda' in params and not params['lambda'] > 0:
            raise ConfigError("lambda 必須為正", {'lambda': params['lambda']})
        if command == 'scatter' and params['preset'] and params['g_hat_file']:
            raise ConfigError("preset 與 g_hat_file 只能擇一")
        if command == 'classical':
            if params['dt'] is not None and not params['dt'] > 0:
                raise ConfigError("dt 必須為正", {'dt': params['dt']})
            if params['t_end'] is not None and not params['t_end'] > params['t_start']:
                raise ConfigError("需要 t_end > t_start")
        if command == 'kernel' and params['name'] == 'U' and params['tau'] == 0:
            raise ConfigError("U 核需要 tau ≠ 0")
        if command == 'selftest' and params['criteria']:
            bad = [n for n in params['criteria'] if not 1 <= n <= 11]
            if bad:
                raise ConfigError(f"未知的驗收項目: {bad}")


def validate_experiment(experiment: ExperimentConfig) -> Dict[str, Any]:
    """以預設結構驗證實驗參數"""
    return ParamsValidator().validate(experiment)


__all__ = ['parse_complex', 'COMMAND_SCHEMAS', 'ParamsValidator', 'validate_experiment']
