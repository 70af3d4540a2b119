# src/thermal/kernels.py

"""封閉形式的積分核與產生它們的主值恆等式

sgn(0) = 0、Θ(0) = 1/2 為全域慣例(見 models.SIGN)。
"""

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .exceptions import DomainError, PoleError, SingularPointError, ThermalToolkitError
from .models import SIGN, ConformanceReport, KernelInfo, QuadResult
from .quadrature import integrate_bessel_tail, laplace_transform, pv_limit
from .specfun import bessel_i0, bessel_j0, bessel_k0

logger = logging.getLogger(__name__)

VARIANTS = ('paper', 'minmax')
# 預設寫法；可由配置或一致性報告覆寫
DEFAULT_VARIANT = 'minmax'
CONFORMANCE_LATTICE = (-2.0, -0.5, 0.5, 1.0, 2.0)
CONFORMANCE_ALPHAS = (1j, 1 + 1j, -2j)

KERNEL_INFO = {
    'B': KernelInfo('B', ('x=0', 'y=0'), 'oscillatory'),
    'U': KernelInfo('U', ('x=0', 'y=0'), 'bounded'),
    'Z': KernelInfo('Z', ('x=0', 'y=0', 'diagonal'), 'exponential'),
    'green_p': KernelInfo('green_p', ('diagonal',), 'exponential'),
    'resolvent_pi': KernelInfo('resolvent_pi', ('x=0', 'y=0', 'diagonal'), 'exponential'),
}


def _sign(value: float) -> float:
    return 1.0 if value > 0 else (-1.0 if value < 0 else 0.0)


# ---------- 主值恆等式 ----------

def _check_branch(branch: str):
    if branch not in ('+', '-'):
        raise DomainError(f"未知的分支: {branch}")


def pv_identity_G(s: float, branch: str) -> complex:
    """P∫ G_s^± = i(1±1)π·sgn(s)·J₀(2|s|)"""
    _check_branch(branch)
    factor = 2.0 if branch == '+' else 0.0
    return 1j * factor * math.pi * _sign(s) * float(bessel_j0(2 * abs(s)))


def pv_integrand_G(s: float, branch: str) -> Callable[[float], complex]:
    """G_s^±(u) = e^{is(u ± 1/u)}/u"""
    _check_branch(branch)
    sign = 1.0 if branch == '+' else -1.0
    return lambda u: cmath.exp(1j * s * (u + sign / u)) / u


def pv_numeric_G(s: float, branch: str, tol: float = 1e-6) -> complex:
    """以視窗外插計算 P∫ G_s^±"""
    return pv_limit(pv_integrand_G(s, branch), tol=tol,
                    outer_frequency=abs(s) or None, inner_frequency=abs(s) or None)


def pv_identity_xy(x: float, y: float) -> complex:
    """P∫ e^{ixu}e^{−iy/u}/u du = 2πi·((sgn x − sgn y)/2)·J₀(2√|xy|)"""
    half_jump = (math.copysign(1.0, x) * (x != 0) - math.copysign(1.0, y) * (y != 0)) / 2
    return 2j * math.pi * half_jump * float(bessel_j0(2 * math.sqrt(abs(x * y))))


def pv_integrand_xy(x: float, y: float) -> Callable[[float], complex]:
    return lambda u: cmath.exp(1j * (x * u - y / u)) / u


def pv_numeric_xy(x: float, y: float, tol: float = 1e-6) -> complex:
    """以視窗外插計算 Corollary 型主值積分"""
    return pv_limit(pv_integrand_xy(x, y), tol=tol,
                    outer_frequency=abs(x) or None, inner_frequency=abs(y) or None)


# ---------- 核函數 ----------

def kernel_B(x, y):
    """𝔹(x,y) = i·((sgn x − sgn y)/2)·J₀(2√|xy|)，可向量化"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    value = 1j * (SIGN.sgn(x) - SIGN.sgn(y)) / 2 * bessel_j0(2 * np.sqrt(np.abs(x * y)))
    return complex(value) if np.ndim(value) == 0 else value


def kernel_U(tau: float, x, y):
    """𝕌_τ(x,y) = ((sgn x + sgn y)/(2iτ))·e^{i(x+y)/τ}·J₀((2/τ)√|xy|)

    Raises:
        DomainError: τ = 0
    """
    if tau == 0 or not math.isfinite(tau):
        raise DomainError("𝕌_τ 需要有限且非零的 τ", {'tau': tau})
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    value = ((SIGN.sgn(x) + SIGN.sgn(y)) / (2j * tau) * np.exp(1j * (x + y) / tau)
             * bessel_j0(2 / tau * np.sqrt(np.abs(x * y))))
    return complex(value) if np.ndim(value) == 0 else value


def _check_alpha(alpha: complex) -> complex:
    alpha = complex(alpha)
    if not cmath.isfinite(alpha):
        raise DomainError("α 必須為有限值", {'alpha': alpha})
    if alpha.imag == 0:
        raise DomainError("α 必須不為實數", {'alpha': alpha})
    return alpha


def kernel_F_alpha(alpha: complex, x: float, y: float, variant: Optional[str] = None) -> complex:
    """F_α(x,y)，Im α > 0

    寫法 'paper' 兩個 Bessel 因子都取 min{|x|,|y|} 且相位只用 sgn(x)；
    寫法 'minmax' 取 I₀(min)K₀(max)，相位取非零座標的符號。
    Im α < 0 時使用 F_α = conj F_ᾱ。

    Raises:
        DomainError: α 為實數或未知寫法
        PoleError: K₀ 引數為 0
    """
    alpha = _check_alpha(alpha)
    variant = variant or DEFAULT_VARIANT
    if variant not in VARIANTS:
        raise DomainError(f"未知的 F_α 寫法: {variant}", {'allowed': list(VARIANTS)})
    if alpha.imag < 0:
        return complex(np.conj(kernel_F_alpha(alpha.conjugate(), x, y, variant)))

    modulus, phi = abs(alpha), cmath.phase(alpha)
    if variant == 'paper':
        side = _sign(x)
    else:
        side = _sign(x) if x != 0 else _sign(y)
    rotation = cmath.exp(1j * (phi / 2 - math.pi / 4 * (side + 1)))
    small, large = sorted((abs(x), abs(y)))
    inner_arg = 2 * math.sqrt(modulus * small) * rotation
    outer_arg = 2 * math.sqrt(modulus * (small if variant == 'paper' else large)) * rotation
    if outer_arg == 0:
        raise PoleError("K₀ 在 0 求值", {'x': x, 'y': y, 'variant': variant})
    return complex(bessel_i0(inner_arg) * bessel_k0(outer_arg))


def kernel_Z(alpha: complex, x: float, y: float, variant: Optional[str] = None) -> complex:
    """ℤ_α(x,y) = (sgn x + sgn y)·F_α(x,y)"""
    alpha = _check_alpha(alpha)
    weight = _sign(x) + _sign(y)
    if weight == 0:
        return 0j
    return weight * kernel_F_alpha(alpha, x, y, variant)


def laplace_kernel_Z(alpha: complex, x: float, y: float, tol: float = 1e-9) -> QuadResult:
    """ℤ_α(x,y) = i∫₀^∞ e^{iατ}𝕌_τ(x,y) dτ 的求積神諭

    τ ≥ 1 以拉普拉斯積分(截斷有保證)；τ < 1 以 u = 1/τ 換成
    ∫_1^∞ ((sgn x + sgn y)/2)·e^{iα/u}/u·e^{i(x+y)u}·J₀(2√|xy|u) du。
    """
    alpha = _check_alpha(alpha)
    if alpha.imag < 0:
        mirrored = laplace_kernel_Z(alpha.conjugate(), x, y, tol)
        return QuadResult(mirrored.value.conjugate(), mirrored.err_estimate,
                          mirrored.evaluations, mirrored.converged)
    weight = _sign(x) + _sign(y)
    if weight == 0:
        return QuadResult(0j, 0.0, 1)

    long_time = laplace_transform(lambda t: kernel_U(t, x, y), alpha, tol=tol,
                                  t_min=1.0, h_bound=1.0, full_result=True)

    def amplitude(u: float) -> complex:
        return weight / 2 * cmath.exp(1j * alpha / u) / u

    short_time = integrate_bessel_tail(amplitude, (2 * math.sqrt(abs(x * y)),),
                                       frequency=x + y, a=1.0, tol=tol)
    return long_time + short_time


def kernel_green_p(zeta: complex, x, y):
    """動量算子的格林函數 𝔾⁰_{ε±iδ}(x,y) = ±i·Θ(±(x−y))·e^{iε(x−y)}·e^{−δ|x−y|}"""
    zeta = complex(zeta)
    if zeta.imag == 0 or not cmath.isfinite(zeta):
        raise DomainError("譜參數必須不為實數", {'zeta': zeta})
    sign = 1.0 if zeta.imag > 0 else -1.0
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    value = (sign * 1j * SIGN.heaviside(sign * diff) * np.exp(1j * zeta.real * diff)
             * np.exp(-abs(zeta.imag) * np.abs(diff)))
    return complex(value) if np.ndim(value) == 0 else value


def kernel_resolvent_Pi(theta: float, zeta: complex, x, y):
    """Π_θ 的預解核 e^{i(sgn x − sgn y)θ/2}·𝔾⁰_ζ(1/x, 1/y)/(xy)

    對角線值為 sgn(Im ζ)·i/(2x²)。

    Raises:
        SingularPointError: x 或 y 為 0
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x == 0) or np.any(y == 0):
        raise SingularPointError("Π_θ 的預解核在 x = 0 或 y = 0 無定義")
    phase = np.exp(1j * (SIGN.sgn(x) - SIGN.sgn(y)) * theta / 2)
    value = phase * kernel_green_p(zeta, 1.0 / x, 1.0 / y) / (x * y)
    return complex(value) if np.ndim(value) == 0 else value


def kernel_propagator_HT(lam: float, t: float, x, y):
    """U_T(t) 的積分核 𝕌_{λt}(x + 1/λ, y + 1/λ)"""
    return kernel_U(lam * t, np.asarray(x) + 1.0 / lam, np.asarray(y) + 1.0 / lam)


def kernel_resolvent_HT(lam: float, zeta: complex, x: float, y: float,
                        variant: Optional[str] = None) -> complex:
    """H_T 的預解核 λ⁻¹ℤ_{ζ/λ}(x + 1/λ, y + 1/λ)"""
    return kernel_Z(complex(zeta) / lam, x + 1.0 / lam, y + 1.0 / lam, variant) / lam


# ---------- 一致性報告與核表 ----------

def run_conformance(lattice: Sequence[float] = CONFORMANCE_LATTICE,
                    alphas: Sequence[complex] = CONFORMANCE_ALPHAS,
                    tol: float = 1e-5, threads: int = 1) -> ConformanceReport:
    """比較 F_α 兩種寫法與拉普拉斯神諭，選出預設寫法

    Args:
        lattice: (x, y) 晶格座標
        alphas: 測試的 α 值
        tol: 合格門檻
        threads: 計算神諭的執行緒數(結果順序固定)

    Returns:
        ConformanceReport: 每點誤差與選定寫法
    """
    points = [(complex(a), float(x), float(y)) for a in alphas for x in lattice for y in lattice]

    def oracle(point):
        alpha, x, y = point
        return laplace_kernel_Z(alpha, x, y, tol=min(tol * 1e-3, 1e-9)).value

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            references = list(pool.map(oracle, points))
    else:
        references = [oracle(p) for p in points]

    max_errors = {v: 0.0 for v in VARIANTS}
    entries: List[Dict] = []
    for (alpha, x, y), reference in zip(points, references):
        entry = {'alpha': {'re': alpha.real, 'im': alpha.imag}, 'x': x, 'y': y,
                 'oracle': {'re': reference.real, 'im': reference.imag}}
        for variant in VARIANTS:
            try:
                error = abs(kernel_Z(alpha, x, y, variant) - reference)
            except ThermalToolkitError as e:
                logger.debug(f"寫法 {variant} 於 ({x}, {y}) 無法求值: {e}")
                error = math.inf
            entry[f'error_{variant}'] = error if math.isfinite(error) else None
            max_errors[variant] = max(max_errors[variant], error)
        entries.append(entry)

    passing = [v for v in VARIANTS if max_errors[v] < tol]
    if DEFAULT_VARIANT in passing:
        selected = DEFAULT_VARIANT
    elif passing:
        selected = passing[0]
    else:
        selected = min(VARIANTS, key=lambda v: max_errors[v])
        logger.warning(f"沒有任何 F_α 寫法通過一致性檢驗: {max_errors}")
    logger.info(f"F_α 一致性檢驗: 選定 {selected}, 最大誤差 {max_errors}")
    return ConformanceReport(
        selected_variant=selected,
        tol=tol,
        lattice=[float(v) for v in lattice],
        alphas=[complex(a) for a in alphas],
        max_errors={k: (v if math.isfinite(v) else 1e300) for k, v in max_errors.items()},
        entries=entries,
    )


def kernel_lattice(kernel: Callable[[float, float], complex], xs: Sequence[float],
                   ys: Sequence[float]) -> pd.DataFrame:
    """在矩形晶格上計算核函數(x, y, re, im 表格)

    無法求值的點(極點/奇異點)記為 NaN。
    """
    rows = []
    for x in xs:
        for y in ys:
            try:
                value = complex(kernel(float(x), float(y)))
            except ThermalToolkitError:
                value = complex(math.nan, math.nan)
            rows.append((float(x), float(y), value.real, value.imag))
    return pd.DataFrame(rows, columns=['x', 'y', 're', 'im'])


def named_kernel(name: str, **params) -> Callable[[float, float], complex]:
    """依名稱建立二變數核函數(kernel 指令使用)"""
    if name == 'B':
        return kernel_B
    if name == 'U':
        tau = float(params.get('tau', 1.0))
        return lambda x, y: kernel_U(tau, x, y)
    if name == 'Z':
        alpha = complex(params.get('alpha', 1j))
        variant = params.get('variant')
        return lambda x, y: kernel_Z(alpha, x, y, variant)
    if name == 'green_p':
        zeta = complex(params.get('zeta', 1j))
        return lambda x, y: kernel_green_p(zeta, x, y)
    if name == 'resolvent_pi':
        zeta = complex(params.get('zeta', 1j))
        theta = float(params.get('theta', 0.0))
        return lambda x, y: kernel_resolvent_Pi(theta, zeta, x, y)
    raise DomainError(f"未知的核函數: {name}", {'allowed': sorted(KERNEL_INFO)})
