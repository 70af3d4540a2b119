# src/thermal/hankel.py

"""算子 T 的廣義本徵函數與 Hankel 型轉換

ψ_k(x) = χ(x)·J₀(2√|kx|) 滿足 xψ″ + ψ′ + kψ = 0，支撐集為 k 的同號半軸；
本徵展開 ∫ψ_k(x)ψ_k(y)/(k − α)dk 提供 ℤ_α 的第三條獨立計算途徑。

k 積分一律以 k = ±s² 換元，讓 J₀(2s√|x|) 成為 s 的等頻率振盪。
"""

import cmath
import logging
import math
from typing import Callable, Optional

import numpy as np

from .exceptions import AccuracyError, DomainError, ThermalToolkitError
from .models import EigenFunction, ExpansionResult, Grid, TWO_PI
from .operators import fd_derivative
from .quadrature import integrate_adaptive, integrate_bessel_tail
from .specfun import bessel_j0

logger = logging.getLogger(__name__)

# k_cutoff = CUTOFF_NUMERATOR / max(|x|, |y|, 1)
CUTOFF_NUMERATOR = 200.0
# 波包的 Gaussian 截斷寬度(以 width 為單位)
PACKET_SPAN = 10.0
# 每個 Gauss–Legendre 區段最多涵蓋的半週期數
PANEL_HALF_PERIODS = 1.0
BRANCHES = ('+', '-')

Evaluable = Callable[[float], complex]


def _check_branch(branch: str) -> float:
    if branch not in BRANCHES:
        raise DomainError(f"未知的分支: {branch}", {'allowed': list(BRANCHES)})
    return 1.0 if branch == '+' else -1.0


def eigenfunction_psi_k(k: float, x):
    """ψ_k(x) = χ_{support}(x)·J₀(2√|kx|)，ψ₀ ≡ 1

    Args:
        k: 廣義本徵值
        x: 位置(純量或陣列)

    Returns:
        與 x 同形狀的實數值
    """
    if not math.isfinite(k):
        raise DomainError("k 必須為有限值", {'k': k})
    eigen = EigenFunction(float(k))
    points = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(points)):
        raise DomainError("x 必須為有限值")
    inside = eigen.contains(points)
    values = np.where(inside, bessel_j0(2.0 * np.sqrt(np.abs(k * points))), 0.0)
    return float(values) if values.ndim == 0 else values


def apply_T(values: np.ndarray, grid: Grid) -> np.ndarray:
    """T = d/dx·x·d/dx 的有限差分作用 xψ″ + ψ′(等距網格)"""
    h = grid.spacing
    first = fd_derivative(values, h, order=1)
    second = fd_derivative(values, h, order=2)
    return grid.points * second + first


def bessel_ode_residual(k: float, x: float, h: float = 1e-3) -> float:
    """|xψ_k″ + ψ_k′ + kψ_k| 於 x 的五點中央差分殘差

    Raises:
        DomainError: 差分模板跨出 ψ_k 的支撐集內部
    """
    if not h > 0:
        raise DomainError("差分步長必須為正", {'h': h})
    stencil = x + h * np.arange(-2, 3)
    if k != 0 and not np.all(k * stencil > 0):
        raise DomainError("差分模板必須位於支撐集內部", {'k': k, 'x': x, 'h': h})
    f = eigenfunction_psi_k(k, stencil)
    first = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    second = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    return float(abs(x * second + first + k * f[2]))


def hankel_transform(f: Evaluable, branch: str, x: float, tol: float = 1e-10) -> complex:
    """(H±f)(x) = ∫₀^∞ J₀(2√(kx)) f(±k) dk，x ≥ 0

    以 k = s² 換成 ∫₀^∞ 2s·f(±s²)·J₀(2√x·s) ds，尾端由 Hankel 包絡處理。

    Raises:
        DomainError: x < 0 或未知分支
        AccuracyError: 積分未收斂
    """
    sign = _check_branch(branch)
    if not (math.isfinite(x) and x >= 0):
        raise DomainError("Hankel 轉換需要 x ≥ 0", {'x': x})

    def amplitude(s: float) -> complex:
        return 2.0 * s * complex(f(sign * s * s))

    try:
        result = integrate_bessel_tail(amplitude, (2.0 * math.sqrt(x),), tol=tol)
    except ThermalToolkitError:
        raise
    except Exception as e:
        logger.error(f"Hankel 轉換失敗: {str(e)}", exc_info=True)
        raise AccuracyError("Hankel 轉換失敗", {'x': x, 'error': str(e)})
    return result.value


def hankel_inverse(f: Evaluable, branch: str, x: float, tol: float = 1e-10) -> complex:
    """逆轉換；在此正規化下轉換自我互逆"""
    return hankel_transform(f, branch, x, tol)


def _panels(lo: float, hi: float, frequency: float, order: int = 8) -> Grid:
    """使每段最多涵蓋半個週期的複合 Gauss–Legendre 網格"""
    width = PANEL_HALF_PERIODS * math.pi / max(frequency, 1e-12)
    count = max(4, int(math.ceil((hi - lo) / width)))
    return Grid.gauss_legendre(np.linspace(lo, hi, count + 1), order)


def orthonormality_smoothed(k: float, k_prime: float, width: float) -> complex:
    """⟨ψ_k, ψ̄⟩ / g_w(k′)，ψ̄ = ∫ g_w(κ)ψ_κ dκ 為圍繞 k′ 的 Gaussian 波包

    g_w 為 L¹ 正規化的 Gaussian；由廣義正規化 ⟨ψ_k, ψ_κ⟩ = δ(k − κ)，
    結果趨於 g_w(k)/g_w(k′)：k = k′ 時為 1，否則隨 width → 0 趨於 0。

    兩層積分都以 s² 換元後的 Gauss–Legendre 求和，ψ̄ 只在外層節點上求值。

    Raises:
        DomainError: width ≤ 0 或 k、k′ 為 0
    """
    if not width > 0:
        raise DomainError("波包寬度必須為正", {'width': width})
    if k == 0 or k_prime == 0:
        raise DomainError("k 與 k′ 必須非零", {'k': k, 'k_prime': k_prime})
    if k * k_prime < 0:
        return 0j

    peak = 1.0 / (width * math.sqrt(TWO_PI))
    center = abs(k_prime)
    # 內層: σ² ∈ 波包範圍(截斷到正半軸)
    sigma_lo = math.sqrt(max(0.0, center - PACKET_SPAN * width))
    sigma_hi = math.sqrt(center + PACKET_SPAN * width)
    # ψ̄(s²) 在 s 方向的衰減尺度約為 1/δσ，δσ = width/(2√k′)
    spread = width / (2.0 * math.sqrt(center))
    s_max = 2.0 * PACKET_SPAN / spread + 2.0 * sigma_hi

    inner = _panels(sigma_lo, sigma_hi, 2.0 * s_max)
    outer = _panels(0.0, s_max, 2.0 * math.sqrt(abs(k)) + 2.0 * sigma_hi)

    sigma = inner.points
    packet = peak * np.exp(-0.5 * ((sigma ** 2 - center) / width) ** 2)
    inner_weights = 2.0 * sigma * packet * inner.weights

    s = outer.points
    psi_bar = np.empty_like(s)
    block = 512
    for start in range(0, s.size, block):
        chunk = s[start:start + block]
        psi_bar[start:start + block] = bessel_j0(2.0 * np.outer(chunk, sigma)) @ inner_weights
    integrand = 2.0 * s * bessel_j0(2.0 * s * math.sqrt(abs(k))) * psi_bar
    value = float(np.sum(integrand * outer.weights))
    logger.debug(f"平滑正規化 k={k}, k′={k_prime}, width={width}: {value / peak:.6g}")
    return complex(value / peak)


def _cutoff(x: float, y: float, k_cutoff: Optional[float]) -> float:
    if k_cutoff is None:
        return CUTOFF_NUMERATOR / max(abs(x), abs(y), 1.0)
    if not k_cutoff > 0:
        raise DomainError("k_cutoff 必須為正", {'k_cutoff': k_cutoff})
    return float(k_cutoff)


def expansion_detail(alpha: complex, x: float, y: float, k_cutoff: Optional[float] = None,
                     tol: float = 1e-10) -> ExpansionResult:
    """本徵展開 ∫ψ_k(x)ψ_k(y)/(k − α)dk 的頭段、尾段與尾端上界

    k = ±s² 換元後被積函數為 ±2s·J₀(2√|x|s)J₀(2√|y|s)/(s² ∓ α)。
    頭段 s ∈ [0, √K] 直接振盪積分；尾段 s > √K 以 Hankel 包絡積分，
    並由 |J₀(u)| ≤ √(2/(πu)) 給出上界 4/(π√(c₁c₂)·√K)。

    Raises:
        DomainError: α 為實數、x = y = 0(積分發散)
        AccuracyError: 尾段積分無法收斂
    """
    alpha = complex(alpha)
    if not cmath.isfinite(alpha) or alpha.imag == 0:
        raise DomainError("α 必須為非實數的有限值", {'alpha': alpha})
    if x == 0 and y == 0:
        raise DomainError("x = y = 0 時展開積分發散", {'x': x, 'y': y})
    if x * y < 0:
        return ExpansionResult(0j, 0j, 0j, 0.0)

    # ψ_k(0) = 1 屬於兩個分支；非零座標決定分支
    side = 1.0 if (x > 0 or y > 0) else -1.0
    scales = tuple(2.0 * math.sqrt(abs(v)) for v in (x, y) if v != 0)
    cutoff = _cutoff(x, y, k_cutoff)
    s_cut = math.sqrt(cutoff)

    def amplitude(s: float) -> complex:
        return side * 2.0 * s / (s * s - side * alpha)

    def head_integrand(s: float) -> complex:
        value = amplitude(s)
        for c in scales:
            value *= bessel_j0(c * s)
        return value

    poles = [math.sqrt(side * alpha.real)] if side * alpha.real > 0 else []
    poles = [p for p in poles if p < s_cut]
    head = integrate_adaptive(head_integrand, 0.0, s_cut, tol, limit=2000, points=poles)
    try:
        tail = integrate_bessel_tail(amplitude, scales, a=s_cut, tol=tol, switch=0.0)
    except AccuracyError as e:
        raise AccuracyError("本徵展開尾段無法保證精度",
                            {'alpha': alpha, 'x': x, 'y': y, 'k_cutoff': cutoff},
                            best_estimate=e.best_estimate)
    scale_product = math.prod(scales)
    if len(scales) == 2:
        bound = 4.0 / (math.pi * math.sqrt(scale_product) * s_cut)
    else:
        # 只有一個 J₀ 因子時包絡僅 ~u^{-1/2}，上界以 s^{-3/2} 積分
        bound = 2.0 * 2.0 * math.sqrt(2.0 / (math.pi * scale_product)) / math.sqrt(s_cut)
    return ExpansionResult(head.value + tail.value, head.value, tail.value, bound)


def resolvent_via_expansion(alpha: complex, x: float, y: float,
                            k_cutoff: Optional[float] = None, tol: float = 1e-10) -> complex:
    """以本徵展開計算預解核 ∫ψ_k(x)ψ_k(y)/(k − α)dk

    Returns:
        complex: 與 kernel_Z(α, x, y) 相同的量
    """
    return expansion_detail(alpha, x, y, k_cutoff, tol).value


__all__ = [
    'eigenfunction_psi_k', 'apply_T', 'bessel_ode_residual', 'hankel_transform',
    'hankel_inverse', 'orthonormality_smoothed', 'expansion_detail',
    'resolvent_via_expansion',
]
