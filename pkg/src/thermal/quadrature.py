# src/thermal/quadrature.py

"""數值積分

所有積分都建立在 QUADPACK(scipy.integrate.quad)之上：
- 有限/無窮區間的自適應 Gauss–Kronrod(QAGS/QAGI)
- 振盪權重 e^{iωu}(QAWO 有限區間、QAWF 半無窮區間)
- 對稱主值視窗 I_{R,r} 與其極限(週期平均 + Richardson 外插)
- 拉普拉斯型積分 i∫ e^{iζt} h(t) dt
"""

import itertools
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .exceptions import AccuracyError, ConvergenceError, DomainError
from .models import PVWindow, QuadResult
from .specfun import bessel_j0, bessel_j0_envelope

logger = logging.getLogger(__name__)

Integrand = Callable[[float], complex]

DEFAULT_TOL = 1e-10
DEFAULT_LIMIT = 500
# QAWF 允許的週期數上限
DEFAULT_LIMLST = 200
# 主值極限的預設視窗序列
DEFAULT_PV_SCHEDULE = (
    PVWindow(10.0, 1e-1),
    PVWindow(20.0, 1e-2),
    PVWindow(40.0, 1e-3),
    PVWindow(80.0, 1e-4),
)
DEFAULT_MIN_PERIODS = 16
# 超過此引數後 J₀ 改以 Hankel 包絡處理
DEFAULT_BESSEL_SWITCH = 8.0
# 每段積分涵蓋的週期數
PERIODS_PER_CHUNK = 8


class _CountingIntegrand:
    """記錄求值次數的被積函數包裝"""

    def __init__(self, func: Integrand):
        self.func = func
        self.calls = 0

    def __call__(self, u: float) -> complex:
        self.calls += 1
        return complex(self.func(u))

    def real(self, u: float) -> float:
        return self(u).real

    def imag(self, u: float) -> float:
        return self(u).imag


def _quad_real(func: Callable[[float], float], a: float, b: float, tol: float,
               limit: int, **kwargs) -> Tuple[float, float, bool]:
    """呼叫 quad 並回傳 (值, 誤差, 是否收斂)"""
    out = integrate.quad(func, a, b, epsabs=tol, epsrel=tol, limit=limit,
                         full_output=1, **kwargs)
    value, err = out[0], out[1]
    converged = len(out) == 3 and math.isfinite(value)
    return value, err, converged


def _finish(result: QuadResult, raise_on_failure: bool, what: str) -> QuadResult:
    if not result.converged:
        logger.warning(f"{what} 未達到要求精度: err={result.err_estimate:.3e}")
        if raise_on_failure:
            raise AccuracyError(f"{what} 未收斂",
                                {'err_estimate': result.err_estimate,
                                 'evaluations': result.evaluations},
                                best_estimate=result)
    return result


def _segments(a: float, b: float, points: Optional[Sequence[float]]) -> List[Tuple[float, float]]:
    cuts = sorted(p for p in (points or ()) if a < p < b)
    edges = [a] + cuts + [b]
    return list(zip(edges[:-1], edges[1:]))


def integrate_adaptive(f: Integrand, a: float, b: float, tol: float = DEFAULT_TOL,
                       limit: int = DEFAULT_LIMIT,
                       points: Optional[Sequence[float]] = None,
                       raise_on_failure: bool = True) -> QuadResult:
    """自適應 Gauss–Kronrod 積分 ∫_a^b f(u) du(複數值)

    無窮端點由 QUADPACK 的 QAGI 變換處理，端點可積奇異性由 QAGS 的外插處理。

    Args:
        f: 被積函數(實數 → 複數)
        a: 下限(可為 −∞)
        b: 上限(可為 +∞)
        tol: 絕對/相對容許誤差
        limit: 每段最多細分次數
        points: 區間內需切開的奇異點
        raise_on_failure: 未收斂時是否拋出 AccuracyError

    Returns:
        QuadResult: 積分結果

    Raises:
        DomainError: a ≥ b
        AccuracyError: 未收斂(附最佳估計)
    """
    if math.isnan(a) or math.isnan(b) or not a < b:
        raise DomainError("積分區間需滿足 a < b", {'a': a, 'b': b})
    counter = _CountingIntegrand(f)
    total_re = total_im = 0.0
    total_err = 0.0
    converged = True
    for lo, hi in _segments(a, b, points):
        re, err_re, ok_re = _quad_real(counter.real, lo, hi, tol, limit)
        im, err_im, ok_im = _quad_real(counter.imag, lo, hi, tol, limit)
        total_re += re
        total_im += im
        total_err += err_re + err_im
        converged = converged and ok_re and ok_im
    result = QuadResult(complex(total_re, total_im), total_err, counter.calls, converged)
    return _finish(result, raise_on_failure, "自適應積分")


def integrate_oscillatory(f: Integrand, omega: float, a: float, b: float = math.inf,
                          tol: float = DEFAULT_TOL, limit: int = DEFAULT_LIMIT,
                          raise_on_failure: bool = True) -> QuadResult:
    """振盪積分 ∫_a^b f(u) e^{iωu} du

    有限區間使用 QAWO，半無窮區間使用 QAWF；ω = 0 時退化為自適應積分。
    下限為 −∞ 時以 u → −u 反射。
    """
    if omega == 0:
        return integrate_adaptive(f, a, b, tol, limit, raise_on_failure=raise_on_failure)
    if math.isinf(a) and math.isinf(b):
        return (integrate_oscillatory(f, omega, a, 0.0, tol, limit, raise_on_failure)
                + integrate_oscillatory(f, omega, 0.0, b, tol, limit, raise_on_failure))
    if math.isinf(a):
        return integrate_oscillatory(lambda v: f(-v), -omega, -b, math.inf, tol, limit,
                                     raise_on_failure)
    if not a < b:
        raise DomainError("積分區間需滿足 a < b", {'a': a, 'b': b})

    counter = _CountingIntegrand(f)
    wvar = abs(omega)
    sign = 1.0 if omega > 0 else -1.0
    parts = {}
    total_err = 0.0
    converged = True
    for name, func in (('re', counter.real), ('im', counter.imag)):
        for weight in ('cos', 'sin'):
            if math.isinf(b):
                out = integrate.quad(func, a, b, weight=weight, wvar=wvar, epsabs=tol,
                                     limlst=DEFAULT_LIMLST, limit=limit, full_output=1)
            else:
                out = integrate.quad(func, a, b, weight=weight, wvar=wvar, epsabs=tol,
                                     epsrel=tol, limit=limit, maxp1=200, full_output=1)
            parts[(name, weight)] = out[0]
            total_err += out[1]
            converged = converged and len(out) == 3 and math.isfinite(out[0])
    value = complex(
        parts[('re', 'cos')] - sign * parts[('im', 'sin')],
        parts[('im', 'cos')] + sign * parts[('re', 'sin')],
    )
    result = QuadResult(value, total_err, counter.calls, converged)
    return _finish(result, raise_on_failure, "振盪積分")


def integrate_fourier_line(f: Integrand, omega: float,
                           breakpoints: Sequence[float] = (),
                           tol: float = DEFAULT_TOL,
                           limit: int = DEFAULT_LIMIT,
                           raise_on_failure: bool = True) -> QuadResult:
    """全實軸振盪積分 ∫_ℝ f(u) e^{iωu} du，於 breakpoints 切開"""
    cuts = sorted(set(float(p) for p in breakpoints)) or [0.0]
    edges = [-math.inf] + cuts + [math.inf]
    result = None
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece = integrate_oscillatory(f, omega, lo, hi, tol, limit, raise_on_failure)
        result = piece if result is None else result + piece
    return result


def integrate_bessel_tail(amplitude: Integrand, scales: Sequence[float],
                          frequency: float = 0.0, a: float = 0.0,
                          tol: float = DEFAULT_TOL,
                          switch: float = DEFAULT_BESSEL_SWITCH,
                          limit: int = DEFAULT_LIMIT,
                          raise_on_failure: bool = True) -> QuadResult:
    """∫_a^∞ A(u) e^{iωu} Π_j J₀(c_j u) du

    切換點 S = max(a, switch/min c_j) 之前直接積分；之後將每個 J₀ 拆成
    Hankel 包絡 ½[E(cu)e^{icu} + conj E(cu)e^{−icu}]，對每個符號組合的
    單一頻率項做半無窮振盪積分。

    Args:
        amplitude: 慢變振幅 A(u)
        scales: 各 J₀ 的尺度 c_j ≥ 0(c_j = 0 的因子為 1)
        frequency: 額外的振盪頻率 ω
        a: 下限
        tol: 容許誤差
        switch: 包絡切換引數
    """
    scales = [float(c) for c in scales if c != 0]
    if any(c < 0 for c in scales):
        raise DomainError("Bessel 尺度必須非負", {'scales': scales})
    if not scales:
        return integrate_oscillatory(amplitude, frequency, a, math.inf, tol, limit,
                                     raise_on_failure)

    cut = max(a, switch / min(scales))

    def head_amplitude(u: float) -> complex:
        value = complex(amplitude(u))
        for c in scales:
            value *= bessel_j0(c * u)
        return value

    result = None
    if cut > a:
        result = integrate_oscillatory(head_amplitude, frequency, a, cut, tol, limit,
                                       raise_on_failure)

    for signs in itertools.product((1, -1), repeat=len(scales)):
        combined = frequency + sum(s * c for s, c in zip(signs, scales))

        def tail_amplitude(u: float, signs=signs) -> complex:
            value = complex(amplitude(u))
            for s, c in zip(signs, scales):
                envelope = bessel_j0_envelope(c * u)
                value *= 0.5 * (envelope if s > 0 else np.conj(envelope))
            return value

        if abs(combined) < 1e-14 * max(1.0, abs(frequency), max(scales)):
            combined = 0.0
        piece = integrate_oscillatory(tail_amplitude, combined, cut, math.inf, tol, limit,
                                      raise_on_failure)
        result = piece if result is None else result + piece

    result.metadata['switch'] = cut
    return result


def integrate_pv_window(f: Integrand, w: PVWindow, tol: float = DEFAULT_TOL,
                        limit: int = DEFAULT_LIMIT) -> QuadResult:
    """對稱視窗積分 ∫_{−R}^{−r} f + ∫_r^R f

    以 g(u) = f(u) + f(−u) 在 [r, R] 上積分；[r, 1] 部分以 v = 1/u 變換。
    """
    pivot = min(max(1.0, w.r), w.R)
    result = None
    if pivot > w.r:
        result = _inner_integral(f, 1.0 / pivot, 1.0 / w.r, tol, limit)
    if w.R > pivot:
        outer = _outer_integral(f, pivot, w.R, tol, limit)
        result = outer if result is None else result + outer
    return result


def _symmetric(f: Integrand) -> Integrand:
    return lambda u: complex(f(u)) + complex(f(-u))


def _inverted(f: Integrand) -> Integrand:
    """v = 1/u 變換後的被積函數 g(1/v)/v²"""
    g = _symmetric(f)
    return lambda v: g(1.0 / v) / (v * v)


def _chunked(func: Integrand, lo: float, hi: float, chunk: Optional[float],
             tol: float, limit: int) -> QuadResult:
    """分段積分，段長為 chunk(固定順序加總)"""
    if chunk is None or hi - lo <= chunk:
        return integrate_adaptive(func, lo, hi, tol, limit)
    edges = list(np.arange(lo, hi, chunk)) + [hi]
    if edges[-1] - edges[-2] < 1e-12 * chunk:
        edges.pop(-2)
    result = None
    for left, right in zip(edges[:-1], edges[1:]):
        piece = integrate_adaptive(func, left, right, tol, limit)
        result = piece if result is None else result + piece
    return result


def _outer_integral(f: Integrand, lo: float, hi: float, tol: float, limit: int,
                    chunk: Optional[float] = None) -> QuadResult:
    return _chunked(_symmetric(f), lo, hi, chunk, tol, limit)


def _inner_integral(f: Integrand, lo: float, hi: float, tol: float, limit: int,
                    chunk: Optional[float] = None) -> QuadResult:
    return _chunked(_inverted(f), lo, hi, chunk, tol, limit)


def neville_extrapolate(h: Sequence[float], values: Sequence[complex]) -> Tuple[complex, float]:
    """Neville 多項式外插至 h = 0

    Returns:
        (外插值, 與去掉最粗點後外插值的差)
    """
    h = [float(v) for v in h]
    p = [complex(v) for v in values]
    n = len(p)
    if n == 0 or len(h) != n:
        raise DomainError("外插序列長度不一致")
    if n == 1:
        return p[0], math.inf
    previous_second = p[1]
    for j in range(1, n):
        for i in range(n - j):
            p[i] = (h[i] * p[i + 1] - h[i + j] * p[i]) / (h[i] - h[i + j])
        if j == n - 2:
            previous_second = p[1]
    if n == 2:
        previous_second = complex(values[1])
    return p[0], abs(p[0] - previous_second)


def _aligned_ends(start: float, ends: Sequence[float], period: Optional[float],
                  min_periods: int) -> List[float]:
    """將視窗端點對齊整數週期，並保證第一個視窗至少 min_periods 個週期"""
    if period is None:
        return list(ends)
    scale = max(1.0, min_periods * period / (ends[0] - start))
    aligned = []
    for end in ends:
        periods = max(min_periods, int(round((end - start) * scale / period)))
        if aligned:
            periods = max(periods, int(round((aligned[-1] - start) / period)) + 1)
        aligned.append(start + periods * period)
    return aligned


def _one_sided_limit(func: Integrand, start: float, ends: Sequence[float],
                     frequency: Optional[float], min_periods: int,
                     tol: float, limit: int) -> Tuple[complex, float, List[float], List[complex]]:
    """單側振盪積分 ∫_start^∞ func 的外插極限"""
    period = 2 * math.pi / frequency if frequency else None
    ends = _aligned_ends(start, ends, period, min_periods)
    chunk = PERIODS_PER_CHUNK * period if period else None

    values = []
    running = _chunked(func, start, ends[0], chunk, tol, limit)
    partial = [running.value]
    for left, right in zip(ends[:-1], ends[1:]):
        running = running + _chunked(func, left, right, chunk, tol, limit)
        partial.append(running.value)

    for end, value in zip(ends, partial):
        if period:
            # 最後一個週期內部分積分的平均
            weighted = integrate_adaptive(lambda u, e=end: (e + period - u) * func(u),
                                          end, end + period, tol, limit)
            value = value + weighted.value / period
        values.append(value)

    limit_value, error = neville_extrapolate([1.0 / e for e in ends], values)
    return limit_value, error, ends, values


def pv_limit(f: Integrand, schedule: Optional[Sequence[PVWindow]] = None,
             tol: float = 1e-6, outer_frequency: Optional[float] = None,
             inner_frequency: Optional[float] = None,
             min_periods: int = DEFAULT_MIN_PERIODS,
             limit: int = DEFAULT_LIMIT) -> complex:
    """主值積分 P∫_ℝ f(u) du 的視窗序列外插

    外側(u → ∞)與內側(v = 1/u → ∞)分別處理：視窗端點對齊整數振盪週期，
    每個部分積分在其後一個週期內取平均，再以 Richardson/Neville 外插到
    1/R → 0 與 r → 0。

    Args:
        f: 被積函數
        schedule: 嚴格擴張的視窗序列(預設 R ∈ {10,20,40,80}, r ∈ {1e-1,…,1e-4})
        tol: 外插穩定判準
        outer_frequency: u → ∞ 的振盪頻率(None 表示不振盪)
        inner_frequency: u → 0 時以 1/u 計的振盪頻率
        min_periods: 第一個視窗最少包含的週期數

    Returns:
        外插後的主值

    Raises:
        ConvergenceError: 外插序列未穩定
    """
    schedule = list(schedule or DEFAULT_PV_SCHEDULE)
    if len(schedule) < 2:
        raise DomainError("主值極限至少需要兩個視窗")
    for prev, cur in zip(schedule[:-1], schedule[1:]):
        if not (cur.R > prev.R and cur.r < prev.r):
            raise DomainError("視窗序列必須嚴格擴張",
                              {'previous': (prev.R, prev.r), 'current': (cur.R, cur.r)})

    pivot = math.sqrt(schedule[0].R * schedule[0].r) if not (
        schedule[0].r < 1.0 < schedule[0].R) else 1.0
    outer_freq = abs(outer_frequency) if outer_frequency else None
    inner_freq = abs(inner_frequency) if inner_frequency else None

    outer, outer_err, outer_ends, _ = _one_sided_limit(
        _symmetric(f), pivot, [w.R for w in schedule], outer_freq, min_periods,
        tol * 1e-3, limit)
    inner, inner_err, inner_ends, _ = _one_sided_limit(
        _inverted(f), 1.0 / pivot, [1.0 / w.r for w in schedule], inner_freq,
        min_periods, tol * 1e-3, limit)

    value = outer + inner
    error = outer_err + inner_err
    logger.debug(f"pv_limit: value={value}, err={error:.3e}, "
                 f"R={outer_ends[-1]:.4g}, 1/r={inner_ends[-1]:.4g}")
    if not error <= tol:
        raise ConvergenceError("主值視窗序列未穩定",
                               {'err_estimate': error, 'tol': tol},
                               best_estimate=value)
    return value


def integrate_pv_symmetric(f: Integrand, tol: float = DEFAULT_TOL,
                           breakpoints: Sequence[float] = (),
                           limit: int = DEFAULT_LIMIT,
                           raise_on_failure: bool = True) -> QuadResult:
    """∫_0^∞ [f(u) + f(−u)] du(絕對收斂時等於主值視窗極限)"""
    cuts = sorted(set([1.0] + [abs(float(b)) for b in breakpoints if b != 0]))
    return integrate_adaptive(_symmetric(f), 0.0, math.inf, tol, limit, points=cuts,
                              raise_on_failure=raise_on_failure)


def laplace_truncation(zeta: complex, tol: float, h_bound: float = 1.0,
                       t_min: float = 0.0) -> float:
    """使 h_bound·e^{−Im ζ (T − t_min)}/Im ζ ≤ tol/2 的截斷時間 T"""
    damping = zeta.imag
    needed = math.log(max(2.0 * h_bound / (tol * damping), 1.0)) / damping
    return t_min + needed


def laplace_transform(h: Callable[[float], complex], zeta: complex, tol: float = 1e-8,
                      t_min: float = 0.0, h_bound: float = 1.0,
                      full_result: bool = False):
    """拉普拉斯型積分 i∫_{t_min}^∞ e^{iζt} h(t) dt

    利用 e^{−Im(ζ) t} 衰減截斷於 T，截斷餘項由 h_bound 保證不超過 tol/2。

    Args:
        h: 被積函數(t ≥ t_min 上有界，t = 0 處至多可積奇異)
        zeta: 譜參數，Im ζ > 0
        tol: 容許誤差
        t_min: 積分下限
        h_bound: sup |h| 的上界
        full_result: 為 True 時回傳 QuadResult

    Raises:
        DomainError: Im ζ ≤ 0
    """
    zeta = complex(zeta)
    if not zeta.imag > 0:
        raise DomainError("拉普拉斯積分需要 Im ζ > 0", {'zeta': zeta})
    end = laplace_truncation(zeta, tol, h_bound, t_min)
    damping = zeta.imag

    def amplitude(t: float) -> complex:
        return complex(h(t)) * math.exp(-damping * (t - t_min))

    body = integrate_oscillatory(amplitude, zeta.real, t_min, end, tol / 4)
    # 平移回 e^{−Im ζ t_min} 並乘上 i
    result = body.scaled(1j * math.exp(-damping * t_min))
    result.metadata['truncation'] = end
    result.err_estimate += h_bound * math.exp(-damping * end) / damping
    return result if full_result else result.value
