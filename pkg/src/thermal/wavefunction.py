# src/thermal/wavefunction.py

"""網格上的波函數：內積、範數、傅立葉轉換與乘法算子

傅立葉慣例 (Fψ)(k) = (2π)^{−1/2} ∫ e^{−ikx} ψ(x) dx。
"""

import logging
import math
from typing import Callable, Dict, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from .exceptions import DomainError, ShapeError
from .models import Grid, ThermalParams, Wavefunction
from .quadrature import integrate_adaptive, integrate_fourier_line

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)
# 邊界振幅/最大振幅超過此值時標記截斷警告
TRUNCATION_THRESHOLD = 1e-6
# FFT 後端補零倍數
FFT_PADDING = 8
# 直接求和的分塊大小
SUM_BLOCK = 256


def _require_same_grid(psi: Wavefunction, phi: Wavefunction):
    if not psi.grid.same_as(phi.grid):
        raise ShapeError("兩個波函數的網格不一致",
                         {'left': psi.grid.size, 'right': phi.grid.size})


def inner(psi: Wavefunction, phi: Wavefunction) -> complex:
    """內積 ⟨ψ, φ⟩ = Σ wᵢ conj(ψᵢ) φᵢ(對第一個引數共軛線性)"""
    _require_same_grid(psi, phi)
    return complex(np.sum(psi.grid.weights * np.conj(psi.values) * phi.values))


def norm(psi: Wavefunction) -> float:
    """範數 ‖ψ‖ = √⟨ψ, ψ⟩"""
    return math.sqrt(max(inner(psi, psi).real, 0.0))


def norm_continuous(psi: Wavefunction, tol: float = 1e-10) -> float:
    """以自適應積分計算 ‖source‖(無 source 時退回網格範數)"""
    if psi.source is None:
        return norm(psi)
    source = psi.source
    result = integrate_adaptive(lambda x: abs(complex(source(np.float64(x)))) ** 2,
                                -math.inf, math.inf, tol, points=psi.singular_points)
    return math.sqrt(result.value.real)


def evaluator(psi: Wavefunction) -> Callable[[np.ndarray], np.ndarray]:
    """回傳可重複求值的函數：有 source 時直接求值，否則預建三次樣條(網格外為 0)"""
    if psi.source is not None:
        source = psi.source

        def exact(points):
            points = np.asarray(points, dtype=float)
            with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
                values = np.asarray(source(points), dtype=complex)
            return np.where(np.isfinite(values), values, 0.0)

        return exact

    spline_re = CubicSpline(psi.x, psi.values.real, extrapolate=False)
    spline_im = CubicSpline(psi.x, psi.values.imag, extrapolate=False)

    def interpolated(points):
        points = np.asarray(points, dtype=float)
        return np.nan_to_num(spline_re(points) + 1j * spline_im(points), nan=0.0)

    return interpolated


def evaluate(psi: Wavefunction, points: np.ndarray) -> np.ndarray:
    """在任意點求值：有 source 時直接求值，否則以三次樣條內插(網格外為 0)"""
    return evaluator(psi)(points)


def resample(psi: Wavefunction, grid: Grid) -> Wavefunction:
    """重新取樣到新網格"""
    return Wavefunction(grid, evaluate(psi, grid.points), source=psi.source,
                        singular_points=psi.singular_points, metadata=dict(psi.metadata))


def mass_outside(psi: Wavefunction, a: float, b: float) -> float:
    """[a, b] 之外的 |ψ|² 質量"""
    outside = (psi.x < a) | (psi.x > b)
    return float(np.sum(psi.grid.weights[outside] * np.abs(psi.values[outside]) ** 2))


def truncation_indicator(psi: Wavefunction) -> float:
    """網格端點振幅相對於最大振幅的比值"""
    peak = float(np.max(np.abs(psi.values)))
    if peak == 0:
        return 0.0
    return max(abs(psi.values[0]), abs(psi.values[-1])) / peak


def normalized(psi: Wavefunction) -> Wavefunction:
    """正規化波函數"""
    n = norm(psi)
    if n == 0:
        raise DomainError("零向量無法正規化")
    source = psi.source
    scaled = None if source is None else (lambda x: source(x) / n)
    return Wavefunction(psi.grid, psi.values / n, source=scaled,
                        singular_points=psi.singular_points, metadata=dict(psi.metadata))


def _direct_sum(psi: Wavefunction, k: np.ndarray, sign: float) -> np.ndarray:
    """梯形和 (2π)^{−1/2} Σ wⱼ e^{∓ikxⱼ} ψⱼ(任意網格)"""
    weighted = psi.grid.weights * psi.values
    out = np.empty(k.shape, dtype=complex)
    for start in range(0, k.size, SUM_BLOCK):
        block = k[start:start + SUM_BLOCK]
        phase = np.exp(sign * 1j * np.outer(block, psi.x))
        out[start:start + SUM_BLOCK] = phase @ weighted
    return out / SQRT_2PI


def _fft_transform(psi: Wavefunction, k: np.ndarray, sign: float,
                   padding: int = FFT_PADDING) -> np.ndarray:
    """等距網格的 FFT(相位修正並以樣條內插到 k)"""
    if psi.grid.kind != 'uniform':
        raise DomainError("FFT 後端需要等距網格")
    h = psi.grid.spacing
    x0 = psi.x[0]
    n = psi.grid.size
    size = 1 << int(math.ceil(math.log2(n * padding)))
    weighted = psi.grid.weights / h * psi.values
    if sign < 0:
        spectrum = np.fft.fft(weighted, size)
    else:
        spectrum = np.fft.ifft(weighted, size) * size
    freqs = 2 * math.pi * np.fft.fftfreq(size, d=h)
    order = np.argsort(freqs)
    freqs = freqs[order]
    spectrum = spectrum[order] * np.exp(sign * 1j * freqs * x0) * h / SQRT_2PI
    if np.any((k < freqs[0]) | (k > freqs[-1])):
        raise DomainError("輸出動量超出 FFT 的 Nyquist 範圍",
                          {'k_max': float(np.max(np.abs(k))), 'nyquist': float(freqs[-1])})
    spline_re = CubicSpline(freqs, spectrum.real)
    spline_im = CubicSpline(freqs, spectrum.imag)
    return spline_re(k) + 1j * spline_im(k)


def _transform(psi: Wavefunction, output_grid: Grid, sign: float,
               backend: str) -> Wavefunction:
    if backend == 'auto':
        backend = 'fft' if psi.grid.kind == 'uniform' and output_grid.size > 64 else 'quadrature'
    k = output_grid.points
    if backend == 'fft':
        values = _fft_transform(psi, k, sign)
    elif backend == 'quadrature':
        values = _direct_sum(psi, k, sign)
    else:
        raise DomainError(f"未知的傅立葉後端: {backend}")

    indicator = truncation_indicator(psi)
    metadata = {'backend': backend, 'truncation_indicator': indicator,
                'truncation_warning': indicator > TRUNCATION_THRESHOLD}
    if metadata['truncation_warning']:
        logger.warning(f"波函數在網格端點未衰減(比值 {indicator:.2e})，傅立葉轉換可能截斷")
    return Wavefunction(output_grid, values, metadata=metadata)


def fourier(psi: Wavefunction, output_grid: Grid, backend: str = 'auto') -> Wavefunction:
    """傅立葉轉換 (Fψ)(k) = (2π)^{−1/2} ∫ e^{−ikx} ψ(x) dx

    Args:
        psi: 輸入波函數(需在網格範圍內衰減)
        output_grid: 動量網格
        backend: 'quadrature'(任意網格直接求和)、'fft'(等距網格)或 'auto'

    Returns:
        Wavefunction: 動量網格上的轉換，metadata 帶有截斷警告
    """
    return _transform(psi, output_grid, -1.0, backend)


def fourier_inverse(psi: Wavefunction, output_grid: Grid, backend: str = 'auto') -> Wavefunction:
    """逆傅立葉轉換 (F⁻¹ψ)(x) = (2π)^{−1/2} ∫ e^{ikx} ψ(k) dk"""
    return _transform(psi, output_grid, 1.0, backend)


def fourier_exact(func: Callable[[float], complex], k: float,
                  singular_points: Sequence[float] = (), tol: float = 1e-10) -> complex:
    """以振盪求積直接計算單點傅立葉轉換(神諭)"""
    result = integrate_fourier_line(lambda x: complex(func(np.float64(x))), -float(k),
                                    breakpoints=singular_points, tol=tol)
    return result.value / SQRT_2PI


def fourier_interpolant(psi: Wavefunction, k_max: float, points: int = 4097,
                        backend: str = 'auto') -> Callable[[np.ndarray], np.ndarray]:
    """回傳傅立葉轉換在 [−k_max, k_max] 上的樣條內插函數"""
    grid = Grid.uniform(-k_max, k_max, points)
    transformed = fourier(psi, grid, backend)
    spline_re = CubicSpline(grid.points, transformed.values.real, extrapolate=False)
    spline_im = CubicSpline(grid.points, transformed.values.imag, extrapolate=False)

    def interpolant(k):
        k = np.asarray(k, dtype=float)
        return np.nan_to_num(spline_re(k) + 1j * spline_im(k), nan=0.0)

    return interpolant


def apply_diag(m: Callable[[np.ndarray], np.ndarray], psi: Wavefunction) -> Wavefunction:
    """乘法算子 (mψ)(x) = m(x)ψ(x)"""
    factor = np.asarray(m(psi.x), dtype=complex)
    if factor.shape != psi.values.shape:
        factor = np.broadcast_to(factor, psi.values.shape)
    if not np.all(np.isfinite(factor)):
        raise DomainError("乘法函數在網格點上非有限")
    source = psi.source
    new_source = None if source is None else (lambda x: m(x) * source(x))
    return psi.with_values(psi.values * factor, source=new_source,
                           singular_points=psi.singular_points)


def restrict(psi: Wavefunction, a: float, b: float) -> Wavefunction:
    """限制到 [a, b](乘上特徵函數)"""
    return apply_diag(lambda x: ((np.asarray(x) >= a) & (np.asarray(x) <= b)).astype(float), psi)


# ---------- 標準測試態 ----------

def gaussian_source(center: float = 0.0, width: float = 1.0, momentum: float = 0.0,
                    chirp: float = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    """正規化高斯 (πσ²)^{−1/4} e^{−(x−c)²/2σ²} e^{ik₀x} e^{iβx²}"""
    amplitude = (math.pi * width ** 2) ** -0.25

    def source(x):
        x = np.asarray(x, dtype=float)
        return (amplitude * np.exp(-((x - center) ** 2) / (2 * width ** 2))
                * np.exp(1j * (momentum * x + chirp * x ** 2)))

    return source


def hermite1_source(width: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """正規化一階 Hermite 函數 √2 (πσ²)^{−1/4} (x/σ) e^{−x²/2σ²}"""
    amplitude = math.sqrt(2.0) * (math.pi * width ** 2) ** -0.25

    def source(x):
        x = np.asarray(x, dtype=float)
        return amplitude * (x / width) * np.exp(-(x ** 2) / (2 * width ** 2)) + 0j

    return source


def bump_source(center: float = 0.0, radius: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """緊支撐平滑函數 exp(−1/(1−s²))，s = (x−c)/a，已正規化"""
    def raw(x):
        s = (np.asarray(x, dtype=float) - center) / radius
        inside = np.abs(s) < 1
        safe = np.where(inside, s, 0.0)
        return np.where(inside, np.exp(-1.0 / (1.0 - safe ** 2)), 0.0)

    mass = integrate_adaptive(lambda x: float(raw(np.float64(x))) ** 2,
                              center - radius, center + radius, 1e-13).value.real
    scale = 1.0 / math.sqrt(mass)

    def source(x):
        return scale * raw(x) + 0j

    return source


CANONICAL_STATES: Dict[str, Callable[[], Callable[[np.ndarray], np.ndarray]]] = {
    'gaussian': lambda: gaussian_source(),
    'hermite1': lambda: hermite1_source(),
    'shifted': lambda: gaussian_source(center=1.5, width=0.7),
    'chirped': lambda: gaussian_source(width=0.8, chirp=0.5),
    'bump': lambda: bump_source(center=0.5, radius=1.5),
}


def canonical_state(name: str, grid: Grid) -> Wavefunction:
    """建立標準測試態"""
    if name not in CANONICAL_STATES:
        raise DomainError(f"未知的測試態: {name}", {'allowed': sorted(CANONICAL_STATES)})
    return Wavefunction.from_function(CANONICAL_STATES[name](), grid, state=name)


def default_grid(span: float = 20.0, points: int = 2049) -> Grid:
    """以原點為中心的等距網格"""
    return Grid.uniform(-span / 2, span / 2, points)


def thermal_grid(lam: float, inner: float = 1e-4, outer: float = 40.0,
                 points: int = 400) -> Grid:
    """以臨界點 −1/λ 為中心的對數對稱網格"""
    ThermalParams(lam)
    return Grid.log_symmetric(-1.0 / lam, inner, outer, points)


def thermal_gauss_grid(lam: float, outer: float = 40.0, panels: int = 200,
                       order: int = 8, sides: str = 'both') -> Grid:
    """臨界點兩側的 Gauss 網格 x = x_c ± s²

    s 在 [0, √outer] 上做複合 Gauss–Legendre，權重含 Jacobian 2s。
    熱傳播子的核在 s 變數下為等頻振盪，且在 x_c 的跳躍落在區段端點。

    Args:
        lam: 熱梯度強度 λ
        outer: 距 x_c 的最大距離
        panels: 單側區段數
        order: 每段節點數
        sides: 'both'、'right'(x > x_c)或 'left'
    """
    ThermalParams(lam)
    if sides not in ('both', 'right', 'left'):
        raise DomainError(f"未知的網格側: {sides}")
    center = -1.0 / lam
    s_grid = Grid.gauss_legendre(np.linspace(0.0, math.sqrt(outer), int(panels) + 1), order)
    s = s_grid.points
    jacobian = 2 * s * s_grid.weights
    points, weights = [], []
    if sides in ('both', 'left'):
        points.append(center - s[::-1] ** 2)
        weights.append(jacobian[::-1])
    if sides in ('both', 'right'):
        points.append(center + s ** 2)
        weights.append(jacobian)
    return Grid(np.concatenate(points), np.concatenate(weights), kind='gauss', center=center)


# ---------- CSV 表格 ----------

def to_frame(psi: Wavefunction) -> pd.DataFrame:
    """轉為欄位 x, re, im 的表格"""
    return pd.DataFrame({'x': psi.x, 're': psi.values.real, 'im': psi.values.imag})


def from_frame(frame: pd.DataFrame) -> Wavefunction:
    """由 x, re, im 表格建立波函數"""
    missing = {'x', 're', 'im'} - set(frame.columns)
    if missing:
        raise ShapeError(f"波函數表格缺少欄位: {sorted(missing)}")
    grid = Grid.from_points(frame['x'].to_numpy(dtype=float))
    values = frame['re'].to_numpy(dtype=float) + 1j * frame['im'].to_numpy(dtype=float)
    return Wavefunction(grid, values)
