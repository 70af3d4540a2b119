# src/thermal/scattering.py

"""卷積位勢的散射理論(動量表象)

熱哈密頓量加上卷積位勢後，經由酉算子字典等價於動量對 (p, p_g)，
p_g = p + M，M(x) = (√(2π)/λ)·ĝ(1/x) 為有界乘法算子。

沿特徵線傳播：
    (e^{−itp_g}ψ)(x) = exp(−i∫_{x−t}^{x} M)·ψ(x − t)
因此波算子 Ω± 是純相位乘子 exp(i∫_x^{±∞} M)，S 矩陣為常數相位
exp(−i(√(2π)/λ)∫ĝ(s)/s² ds)。
"""

import logging
import math
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from .exceptions import (AccuracyError, ConvergenceError, DomainError, FileError,
                         SingularPointError, ThermalToolkitError)
from .models import Grid, ScatterSpec, Wavefunction
from .operators import fd_derivative, translate
from .quadrature import integrate_adaptive, neville_extrapolate
from .wavefunction import SQRT_2PI, evaluator, inner, norm

logger = logging.getLogger(__name__)

# 波算子的預設時間序列與容許誤差
DEFAULT_SCHEDULE = (25.0, 50.0, 100.0, 200.0)
DEFAULT_TOL = 1e-5
MAX_DOUBLINGS = 4
# 相位積分的容許誤差
PHASE_TOL = 1e-12
# 衰減假設的取樣點
DECAY_SAMPLES = np.geomspace(1e-6, 1e-1, 61)
# 無衰減常數時，|ĝ(s)|/|s|^{3/2} 在小 s 處允許的放大倍數
DECAY_GROWTH_LIMIT = 10.0
DECAY_EXPONENT = 1.5
# 散射計算用的探測網格
STATE_GRID = (-15.0, 15.0, 601)


# ---------- ĝ 預設 ----------

def _zero(s):
    return np.zeros_like(np.asarray(s, dtype=float)) + 0j


def _gauss2(s):
    s = np.asarray(s, dtype=float)
    return s ** 2 * np.exp(-s ** 2) + 0j


def _gauss4(s):
    s = np.asarray(s, dtype=float)
    return s ** 4 * np.exp(-s ** 2) + 0j


def _lorentz(s):
    s = np.asarray(s, dtype=float)
    return s ** 2 / (1.0 + s ** 2) ** 2 + 0j


def _linear(s):
    s = np.asarray(s, dtype=float)
    return np.abs(s) * np.exp(-s ** 2) + 0j


# 名稱 → (ĝ, 衰減常數 (ε₀, C), ∫ĝ(s)/s² ds 的解析值)
G_HAT_PRESETS: Dict[str, Tuple[Callable, Optional[Tuple[float, float]], Optional[float]]] = {
    'zero': (_zero, (1.0, 1.0), 0.0),
    'gauss2': (_gauss2, (1.0, 1.0), math.sqrt(math.pi)),
    'gauss4': (_gauss4, (1.0, 1.0), math.sqrt(math.pi) / 2.0),
    'lorentz': (_lorentz, (1.0, 1.0), math.pi / 2.0),
    # 違反 |ĝ(s)| ≤ C|s|^{3/2}
    'linear': (_linear, None, None),
}
ADMISSIBLE_PRESETS = ('gauss2', 'gauss4', 'lorentz')


def preset_spec(name: str, lam: float = 1.0) -> ScatterSpec:
    """建立預設 ĝ 的散射設定"""
    if name not in G_HAT_PRESETS:
        raise DomainError(f"未知的 ĝ 預設: {name}", {'allowed': sorted(G_HAT_PRESETS)})
    g_hat, constants, _ = G_HAT_PRESETS[name]
    return ScatterSpec(g_hat=g_hat, lam=lam, decay_constants=constants, name=name)


def preset_integral(name: str) -> Optional[float]:
    """預設 ĝ 的 ∫ĝ(s)/s² ds 解析值(發散時為 None)"""
    return G_HAT_PRESETS[name][2]


def load_g_hat_csv(path: str, lam: float = 1.0,
                   decay_constants: Optional[Tuple[float, float]] = None) -> ScatterSpec:
    """讀取表列 ĝ(欄位 s, re, im)，以三次樣條內插，表外取 0"""
    try:
        frame = pd.read_csv(path, comment='#')
    except FileNotFoundError:
        raise FileError(f"找不到 ĝ 表格: {path}")
    except Exception as e:
        logger.error(f"讀取 ĝ 表格失敗: {str(e)}", exc_info=True)
        raise FileError(f"讀取 ĝ 表格失敗: {path}", {'error': str(e)})

    missing = {'s', 're', 'im'} - set(frame.columns)
    if missing:
        raise FileError(f"ĝ 表格缺少欄位: {sorted(missing)}")
    frame = frame.sort_values('s')
    s = frame['s'].to_numpy(dtype=float)
    if s.size < 4 or np.any(np.diff(s) <= 0):
        raise FileError("ĝ 表格的 s 欄位至少需要 4 個相異點")
    spline_re = CubicSpline(s, frame['re'].to_numpy(dtype=float), extrapolate=False)
    spline_im = CubicSpline(s, frame['im'].to_numpy(dtype=float), extrapolate=False)

    def g_hat(points):
        points = np.asarray(points, dtype=float)
        return np.nan_to_num(spline_re(points) + 1j * spline_im(points), nan=0.0)

    logger.info(f"已載入表列 ĝ: {path} ({s.size} 點)")
    return ScatterSpec(g_hat=g_hat, lam=lam, decay_constants=decay_constants, name='table')


# ---------- 衰減假設與位勢 ----------

def check_decay_hypothesis(spec: ScatterSpec) -> bool:
    """以取樣檢查 |ĝ(s)| ≤ C|s|^{3/2}(|s| < ε₀)

    有衰減常數時直接驗證不等式；否則要求 |ĝ(s)|/|s|^{3/2} 在 s → 0 時
    不超過 [10⁻³, 10⁻¹] 上最大值的 DECAY_GROWTH_LIMIT 倍。
    """
    if spec.decay_constants is not None:
        eps0, const = spec.decay_constants
        s = eps0 * DECAY_SAMPLES / DECAY_SAMPLES[-1] * (1 - 1e-12)
        s = np.concatenate([-s, s])
        bound = const * np.abs(s) ** DECAY_EXPONENT
        return bool(np.all(np.abs(spec.g_hat(s)) <= bound * (1 + 1e-12) + 1e-300))

    s = np.concatenate([-DECAY_SAMPLES, DECAY_SAMPLES])
    ratio = np.abs(spec.g_hat(s)) / np.abs(s) ** DECAY_EXPONENT
    reference = np.max(ratio[np.abs(s) >= 1e-3])
    smallest = np.max(ratio[np.abs(s) <= 1e-5])
    return bool(smallest <= DECAY_GROWTH_LIMIT * reference + 1e-300)


def potential_M(spec: ScatterSpec, x):
    """M(x) = (√(2π)/λ)·ĝ(1/x)

    x = 0 在衰減假設成立時取極限值 0。

    Raises:
        SingularPointError: x = 0 且衰減假設不成立
    """
    points = np.asarray(x, dtype=float)
    zero = points == 0
    if np.any(zero) and not check_decay_hypothesis(spec):
        raise SingularPointError("衰減假設不成立時 M 在 x = 0 無定義", {'spec': spec.name})
    safe = np.where(zero, 1.0, points)
    values = SQRT_2PI / spec.lam * np.asarray(spec.g_hat(1.0 / safe), dtype=complex)
    values = np.where(zero, 0j, values)
    return complex(values) if values.ndim == 0 else values


def _potential_scalar(spec: ScatterSpec) -> Callable[[float], complex]:
    prefactor = SQRT_2PI / spec.lam

    def m(s: float) -> complex:
        if s == 0:
            return 0j
        return prefactor * complex(spec.g_hat(np.float64(1.0 / s)))

    return m


def phase_primitive(spec: ScatterSpec, points, tol: float = PHASE_TOL) -> np.ndarray:
    """Φ(x) = ∫_0^x M(s) ds，於排序後相鄰節點間逐段自適應積分再累加"""
    points = np.asarray(points, dtype=float)
    if not np.all(np.isfinite(points)):
        raise DomainError("相位積分端點必須為有限值")
    nodes, index = np.unique(np.append(points.ravel(), 0.0), return_inverse=True)
    index = np.asarray(index).ravel()
    m = _potential_scalar(spec)
    increments = np.zeros(nodes.size, dtype=complex)
    try:
        for i in range(1, nodes.size):
            increments[i] = integrate_adaptive(m, nodes[i - 1], nodes[i], tol).value
    except AccuracyError:
        raise
    except Exception as e:
        logger.error(f"相位積分失敗: {str(e)}", exc_info=True)
        raise AccuracyError("相位積分失敗", {'error': str(e)})
    cumulative = np.cumsum(increments)
    cumulative -= cumulative[np.searchsorted(nodes, 0.0)]
    return cumulative[index[:-1]].reshape(points.shape)


# ---------- 傳播 ----------

def evolve_pg(spec: ScatterSpec, t: float, psi: Wavefunction,
              tol: float = PHASE_TOL) -> Wavefunction:
    """(e^{−itp_g}ψ)(x) = exp(−i∫_{x−t}^{x} M)·ψ(x − t)

    Args:
        spec: 散射設定
        t: 時間
        psi: 輸入態(有 source 時精確平移，否則樣條內插)
        tol: 相位積分容許誤差

    Returns:
        Wavefunction: 同網格上的結果
    """
    if not math.isfinite(t):
        raise DomainError("時間必須為有限值", {'t': t})
    if t == 0:
        return psi
    x = psi.x
    phase = phase_primitive(spec, x, tol) - phase_primitive(spec, x - t, tol)
    shifted = evaluator(psi)(x - t)
    return psi.with_values(np.exp(-1j * phase) * shifted, evolved_t=float(t))


def generator_residual(spec: ScatterSpec, psi: Wavefunction, dt: float = 1e-3) -> float:
    """中央差分 d/dt e^{−itp_g}ψ|_{t=0} 與 −i(pψ + Mψ) 的最大差(網格內部)"""
    if psi.grid.kind != 'uniform':
        raise DomainError("產生元檢查需要等距網格")
    forward = evolve_pg(spec, dt, psi).values
    backward = evolve_pg(spec, -dt, psi).values
    derivative = (forward - backward) / (2 * dt)
    p_psi = -1j * fd_derivative(psi.values, psi.grid.spacing, 1)
    expected = -1j * (p_psi + potential_M(spec, psi.x) * psi.values)
    interior = slice(2, -2)
    return float(np.max(np.abs(derivative[interior] - expected[interior])))


# ---------- 波算子 ----------

def _schedule(schedule: Optional[Sequence[float]], t_max: Optional[float]) -> Tuple[float, ...]:
    if schedule is None:
        if t_max is None:
            return DEFAULT_SCHEDULE
        return tuple(t_max / 2 ** j for j in (3, 2, 1, 0))
    values = tuple(float(t) for t in schedule)
    if len(values) < 2 or any(t <= 0 for t in values) or list(values) != sorted(values):
        raise DomainError("時間序列必須為至少兩個遞增的正數", {'schedule': values})
    return values


def _phase_limit(spec: ScatterSpec, sign: str, x: np.ndarray, weights: Optional[np.ndarray],
                 schedule: Sequence[float], tol: float, max_doublings: int,
                 phase_tol: float) -> Tuple[np.ndarray, float, Tuple[float, ...]]:
    """∫_x^{±∞} M 的外插極限

    以 h = 1/|x ± T| 對每個 T 的 ∫_x^{x±T} M 做 Neville 外插；
    留一差距(有權重時取加權均方根，否則取最大值)作為柯西距離，
    未達容許誤差時把時間序列加倍。

    Returns:
        (相位陣列, 柯西距離, 實際使用的時間序列)
    """
    direction = 1.0 if sign == '+' else -1.0
    if schedule[0] <= np.max(np.abs(x)):
        raise DomainError("時間序列的最小值必須超過網格範圍",
                          {'t_min': schedule[0], 'span': float(np.max(np.abs(x)))})
    base = phase_primitive(spec, x, phase_tol)
    window = len(schedule)
    times = list(schedule)
    samples = [phase_primitive(spec, x + direction * t, phase_tol) - base for t in times]

    distance = math.inf
    limit = None
    for doubling in range(max_doublings + 1):
        used_times = times[-window:]
        used = np.array(samples[-window:])
        limit = np.empty(x.size, dtype=complex)
        errors = np.empty(x.size)
        for i in range(x.size):
            h = [1.0 / abs(x[i] + direction * t) for t in used_times]
            limit[i], errors[i] = neville_extrapolate(h, used[:, i])
        if weights is None:
            distance = float(np.max(errors))
        else:
            distance = math.sqrt(float(np.sum(weights * errors ** 2) / np.sum(weights)))
        logger.debug(f"Ω{sign} 相位: T_max={used_times[-1]:g}, 柯西距離={distance:.3e}")
        if distance < tol:
            return limit, distance, tuple(used_times)
        if doubling == max_doublings:
            break
        times.append(2.0 * times[-1])
        samples.append(phase_primitive(spec, x + direction * times[-1], phase_tol) - base)

    raise ConvergenceError("波算子相位未通過柯西檢驗(可能違反衰減假設)",
                           {'sign': sign, 'distance': distance, 'tol': tol,
                            'T_max': times[-1]},
                           best_estimate=limit)


def _check_sign(sign: str):
    if sign not in ('+', '-'):
        raise DomainError(f"未知的波算子符號: {sign}", {'allowed': ['+', '-']})


def wave_operator_phase(spec: ScatterSpec, sign: str, x, schedule: Optional[Sequence[float]] = None,
                        tol: float = DEFAULT_TOL, max_doublings: int = MAX_DOUBLINGS) -> np.ndarray:
    """Ω± 在 x 點的相位乘子 exp(i∫_x^{±∞} M)

    柯西距離取各點外插誤差的最大值。
    """
    _check_sign(sign)
    points = np.atleast_1d(np.asarray(x, dtype=float))
    phase, _, _ = _phase_limit(spec, sign, points, None, _schedule(schedule, None), tol,
                               max_doublings, PHASE_TOL)
    factor = np.exp(1j * phase)
    return factor if np.ndim(x) else factor[0]


def wave_operator_num(spec: ScatterSpec, sign: str, psi: Wavefunction,
                      T_max: Optional[float] = None, schedule: Optional[Sequence[float]] = None,
                      tol: float = DEFAULT_TOL, max_doublings: int = MAX_DOUBLINGS) -> Wavefunction:
    """數值波算子 Ω±ψ = lim_{T→±∞} e^{iTp_g}e^{−iTp}ψ

    沿特徵線 (e^{iTp_g}e^{−iTp}ψ)(x) = exp(i∫_x^{x+T} M)·ψ(x)，
    對 T 的序列外插並以 |ψ|² 加權的柯西距離認證。

    Args:
        spec: 散射設定
        sign: '+' 或 '-'
        psi: 探測態
        T_max: 時間序列上限(未給 schedule 時取 T_max/8, …, T_max)
        schedule: 時間序列，預設 {25, 50, 100, 200}
        tol: 柯西距離容許誤差
        max_doublings: 未收斂時最多加倍的次數

    Raises:
        ConvergenceError: 柯西檢驗失敗(訊號：違反衰減假設)
    """
    _check_sign(sign)
    times = _schedule(schedule, T_max)
    weights = psi.grid.weights * np.abs(psi.values) ** 2
    try:
        phase, distance, used = _phase_limit(spec, sign, psi.x, weights, times, tol,
                                             max_doublings, PHASE_TOL)
    except ThermalToolkitError:
        raise
    except Exception as e:
        logger.error(f"波算子計算失敗: {str(e)}", exc_info=True)
        raise AccuracyError("波算子計算失敗", {'sign': sign, 'error': str(e)})
    values = np.exp(1j * phase) * psi.values
    return psi.with_values(values, wave_operator=sign, cauchy_distance=distance,
                           schedule=list(used))


# ---------- S 矩陣 ----------

def s_matrix_closed(spec: ScatterSpec, tol: float = 1e-10) -> complex:
    """S = exp(−i(√(2π)/λ)∫ĝ(s)/s² ds)

    有衰減常數 (ε₀, C) 時 |s| < δ 的部分由 4C√δ ≤ tol/2 保證可略去；
    否則在確認衰減假設後直接以端點外插積分。

    Raises:
        DomainError: 衰減假設無法驗證
    """
    if not check_decay_hypothesis(spec):
        raise DomainError("衰減假設不成立，∫ĝ/s² 不可積", {'spec': spec.name})
    delta = 0.0
    if spec.decay_constants is not None:
        eps0, const = spec.decay_constants
        delta = min(eps0, (tol / (8.0 * const)) ** 2)

    def integrand(s: float) -> complex:
        return complex(spec.g_hat(np.float64(s))) / (s * s)

    try:
        right = integrate_adaptive(integrand, delta, math.inf, tol, points=[1.0])
        left = integrate_adaptive(lambda s: integrand(-s), delta, math.inf, tol, points=[1.0])
    except AccuracyError as e:
        raise DomainError("∫ĝ/s² 數值上不可積", {'spec': spec.name, 'error': str(e)})
    total = right.value + left.value
    return complex(np.exp(-1j * SQRT_2PI / spec.lam * total))


def s_matrix_num(spec: ScatterSpec, psi: Wavefunction, schedule: Optional[Sequence[float]] = None,
                 tol: float = DEFAULT_TOL, max_doublings: int = MAX_DOUBLINGS) -> complex:
    """⟨Ω⁺ψ, Ω⁻ψ⟩/‖ψ‖²；S 為常數相位，因此與探測態無關且模為 1"""
    length = norm(psi)
    if length == 0:
        raise DomainError("探測態不可為零")
    plus = wave_operator_num(spec, '+', psi, schedule=schedule, tol=tol,
                             max_doublings=max_doublings)
    minus = wave_operator_num(spec, '-', psi, schedule=schedule, tol=tol,
                              max_doublings=max_doublings)
    return inner(plus, minus) / length ** 2


def intertwining_residual(spec: ScatterSpec, psi: Wavefunction, t: float,
                          schedule: Optional[Sequence[float]] = None,
                          tol: float = DEFAULT_TOL) -> float:
    """‖e^{−itp_g}Ω⁻ψ − Ω⁻e^{−itp}ψ‖"""
    left = evolve_pg(spec, t, wave_operator_num(spec, '-', psi, schedule=schedule, tol=tol))
    right = wave_operator_num(spec, '-', translate(psi, t), schedule=schedule, tol=tol)
    return norm(left.with_values(left.values - right.values))


def state_grid() -> Grid:
    """散射探測態使用的等距網格"""
    return Grid.uniform(*STATE_GRID)


def scatter_report(spec: ScatterSpec, states: Dict[str, Wavefunction],
                   schedule: Optional[Sequence[float]] = None,
                   tol: float = DEFAULT_TOL) -> Dict[str, Any]:
    """scatter 指令的結果：s_closed、各探測態的 s_numeric 與殘差

    Returns:
        dict: s_closed(複數)、s_numeric(探測態 → 複數)、probe_residuals(探測態 → |Δ|)
    """
    closed = s_matrix_closed(spec)
    numeric, residuals = {}, {}
    for name, psi in states.items():
        value = s_matrix_num(spec, psi, schedule, tol)
        numeric[name] = value
        residuals[name] = abs(value - closed)
        logger.info(f"S 矩陣 [{spec.name}/{name}]: |Δ| = {residuals[name]:.3e}")
    return {'s_closed': closed, 's_numeric': numeric, 'probe_residuals': residuals}


__all__ = [
    'G_HAT_PRESETS', 'ADMISSIBLE_PRESETS', 'preset_spec', 'preset_integral', 'load_g_hat_csv',
    'check_decay_hypothesis', 'potential_M', 'phase_primitive', 'evolve_pg',
    'generator_residual', 'wave_operator_phase', 'wave_operator_num', 's_matrix_closed',
    's_matrix_num', 'intertwining_residual', 'state_grid', 'scatter_report',
]
