# src/thermal/spectral.py

"""譜測度與態密度

- Π_θ 的譜密度 |F(L_θ* I ψ)|²
- 區間上的積分態密度(IDOS)與主值 IDOS
- 動量與 Laplacian 的態密度公式(含局部 Fourier 基底的部分和對照)

負能量依 sgn(ε) 慣例計為負值。
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import special

from .exceptions import DomainError
from .models import SpectralDensity, Grid, TWO_PI, Wavefunction
from .quadrature import integrate_adaptive
from .wavefunction import fourier, fourier_interpolant, norm, norm_continuous

logger = logging.getLogger(__name__)

# 正規化檢查的容許誤差
NORMALIZATION_TOL = 1e-6
# ψ̂ 截斷的搜尋範圍與相對門檻
MOMENTUM_SCAN_MAX = 200.0
MOMENTUM_SCAN_POINTS = 2001
MOMENTUM_FLOOR = 1e-13
# 動量求積：原點附近的加密層數、等寬區段寬度(v = √|k|)與每段節點數
GRADING_LEVELS = 30
PANEL_WIDTH = 0.25
PANEL_ORDER = 16
ENERGY_BLOCK = 128
ZERO_AMPLITUDE = 1e-12
# 總質量的積分容許誤差
MASS_TOL = 1e-12
MASS_LIMIT = 500
# Borel 轉換的預設動量截斷
DEFAULT_K_MAX = 40.0


def _energy_grid(energies: Sequence[float]) -> Grid:
    energies = np.asarray(energies, dtype=float)
    if energies.ndim != 1 or energies.size < 2:
        raise DomainError("能量網格至少需要兩個點")
    if not np.all(np.isfinite(energies)) or np.any(np.diff(energies) <= 0):
        raise DomainError("能量必須為有限且嚴格遞增")
    return Grid.from_points(energies)


def _normalized_input(psi: Wavefunction) -> Wavefunction:
    """輸入未正規化時以警告方式正規化"""
    length = norm_continuous(psi, tol=1e-9) if psi.source is not None else norm(psi)
    if abs(length - 1.0) <= NORMALIZATION_TOL:
        return psi
    if length == 0:
        raise DomainError("零向量沒有譜測度")
    logger.warning(f"輸入態未正規化(‖ψ‖ = {length:.6g})，已自動正規化")
    source = psi.source
    scaled = None if source is None else (lambda x: source(x) / length)
    return Wavefunction(psi.grid, psi.values / length, source=scaled,
                        singular_points=psi.singular_points,
                        metadata=dict(psi.metadata, normalized_from=length))


# ---------- Π_θ 的譜密度 ----------

def _momentum_cutoff(psi: Wavefunction) -> Tuple[float, bool]:
    """|ψ̂| 低於峰值 MOMENTUM_FLOOR 倍之外的動量截斷(第二個值為是否觸及上限)"""
    cap = MOMENTUM_SCAN_MAX
    if psi.grid.kind == 'uniform':
        cap = min(cap, 0.9 * math.pi / psi.grid.spacing)
    scan = Grid.uniform(-cap, cap, MOMENTUM_SCAN_POINTS)
    magnitude = np.abs(fourier(psi, scan, backend='quadrature').values)
    significant = np.nonzero(magnitude > MOMENTUM_FLOOR * magnitude.max())[0]
    step = scan.points[1] - scan.points[0]
    edge = max(abs(scan.points[significant[0]]), abs(scan.points[significant[-1]])) + 2 * step
    return min(edge, cap), edge >= cap


def _momentum_nodes(cutoff: float, energy_scale: float) -> Tuple[np.ndarray, np.ndarray]:
    """k = ±v² 的求積節點與權重 2v·w_v

    v 在原點附近幾何加密(核在 k = 0 有對數奇異性)，之後以等寬區段覆蓋到 √cutoff；
    區段寬度隨 2√|ε| 的振盪頻率縮小。
    """
    v_max = math.sqrt(cutoff)
    inner = min(0.5, v_max / 4)
    width = min(PANEL_WIDTH, 2.0 / math.sqrt(max(1.0, energy_scale)))
    graded = inner * 0.5 ** np.arange(GRADING_LEVELS, -1, -1)
    uniform = np.linspace(inner, v_max, max(2, int(math.ceil((v_max - inner) / width)) + 1))
    nodes = Grid.gauss_legendre(np.concatenate([[0.0], graded, uniform[1:]]), PANEL_ORDER)
    v, w = nodes.points, 2.0 * nodes.points * nodes.weights
    return np.concatenate([-v[::-1] ** 2, v ** 2]), np.concatenate([w[::-1], w])


def twisted_involution_kernel(theta: float, eps: np.ndarray, k: np.ndarray) -> np.ndarray:
    """F L_θ* I F⁻¹ 的積分核 𝒦_θ(ε, k)(εk ≠ 0)

    令 s = sin(θ/2)、c = cos(θ/2)、z = 2√|εk|：

    - εk > 0：−(2i/π)·s·K₀(z)
    - ε > 0 > k：i(s·Y₀(z) − c·J₀(z))
    - ε < 0 < k：i(s·Y₀(z) + c·J₀(z))

    Returns:
        np.ndarray: 形狀 (len(eps), len(k)) 的核矩陣
    """
    eps = np.asarray(eps, dtype=float)[:, None]
    k = np.asarray(k, dtype=float)[None, :]
    product = eps * k
    if np.any(product == 0):
        raise DomainError("核在 εk = 0 處奇異")
    z = 2.0 * np.sqrt(np.abs(product))
    s, c = math.sin(theta / 2), math.cos(theta / 2)
    y0 = s * special.y0(z) if s != 0 else 0.0
    cross = 1j * np.where(eps > 0, y0 - c * special.j0(z), y0 + c * special.j0(z))
    if s == 0:
        return np.where(product > 0, 0j, cross)
    return np.where(product > 0, (-2j * s / math.pi) * special.k0(z), cross)


class _TwistedTransform:
    """(F L_θ* I ψ)(ε) = ∫ ψ̂(k) 𝒦_θ(ε, k) dk"""

    def __init__(self, theta: float, psi: Wavefunction, energy_scale: float,
                 cutoff: Optional[float] = None):
        self.theta = theta
        self.cutoff_warning = False
        if cutoff is None:
            cutoff, self.cutoff_warning = _momentum_cutoff(psi)
        self.cutoff = cutoff
        self.k, weights = _momentum_nodes(cutoff, energy_scale)
        psi_hat = fourier(psi, Grid.from_points(self.k), backend='quadrature').values
        self.weighted = weights * psi_hat

    def at_zero(self) -> complex:
        """ε = 0：θ ≢ 0 且 ψ(0) ≠ 0 時對數發散；否則取兩側極限的平均"""
        if math.sin(self.theta / 2) != 0 and abs(self.weighted.sum()) > ZERO_AMPLITUDE:
            return complex(math.inf, 0.0)
        c = math.cos(self.theta / 2)
        return 0.5j * c * (self.weighted[self.k > 0].sum() - self.weighted[self.k < 0].sum())

    def __call__(self, eps: np.ndarray) -> np.ndarray:
        eps = np.asarray(eps, dtype=float)
        out = np.empty(eps.shape, dtype=complex)
        zero = eps == 0
        out[zero] = self.at_zero()
        indices = np.nonzero(~zero)[0]
        for start in range(0, indices.size, ENERGY_BLOCK):
            block = indices[start:start + ENERGY_BLOCK]
            out[block] = twisted_involution_kernel(self.theta, eps[block], self.k) @ self.weighted
        return out


def spectral_density_Pi(theta: float, psi: Wavefunction, energies: Sequence[float],
                        momentum_cutoff: Optional[float] = None) -> SpectralDensity:
    """Π_θ 的譜密度 μ_ψ^θ(dε) = |F(L_θ* I ψ)(ε)|² dε

    不在位置空間組合 Iψ(其 ψ(0)/x 尾端無法截斷)，而在動量表象中以
    twisted_involution_kernel 對 ψ̂ 積分。θ ≢ 0 (mod 2π) 且 ψ(0) ≠ 0 時，
    密度在 ε = 0 有 log² 奇異性(該點的值為 inf)；總質量以自適應積分在 0 處切開計算。

    Args:
        theta: 延伸角
        psi: 正規化的輸入態(未正規化時自動正規化並記錄警告)
        energies: 嚴格遞增的能量點
        momentum_cutoff: ψ̂ 的截斷(預設由 |ψ̂| 的衰減決定)

    Returns:
        SpectralDensity: mass 為能量區間上的連續積分，metadata 帶有 θ 與截斷資訊
    """
    energy_grid = _energy_grid(energies)
    state = _normalized_input(psi)
    lo, hi = energy_grid.span
    transform = _TwistedTransform(theta, state, max(abs(lo), abs(hi)), momentum_cutoff)
    if transform.cutoff_warning:
        logger.warning(f"ψ̂ 在動量截斷 {transform.cutoff:.3g} 處未衰減，譜密度可能不準")

    def density_at(eps: float) -> float:
        return float(abs(transform(np.array([eps]))[0]) ** 2)

    cuts = [0.0] if lo < 0 < hi else None
    mass = integrate_adaptive(density_at, lo, hi, MASS_TOL, limit=MASS_LIMIT, points=cuts,
                              raise_on_failure=False)
    if not mass.converged:
        logger.warning(f"譜密度總質量未達到要求精度: err={mass.err_estimate:.3e}")
    metadata = {
        'theta': float(theta),
        'normalized_from': state.metadata.get('normalized_from', 1.0),
        'momentum_cutoff': transform.cutoff,
        'cutoff_warning': transform.cutoff_warning,
        'mass_error': mass.err_estimate,
    }
    return SpectralDensity(energy_grid.points, np.abs(transform(energy_grid.points)) ** 2,
                           metadata, mass=mass.value.real)


def spectral_density_momentum(psi: Wavefunction, energies: Sequence[float]) -> SpectralDensity:
    """動量算子 p 的譜密度 |ψ̂(ε)|²"""
    energy_grid = _energy_grid(energies)
    transform = fourier(psi, energy_grid)
    return SpectralDensity(energy_grid.points, np.abs(transform.values) ** 2,
                           {'operator': 'p'})


# ---------- 積分態密度 ----------

def idos_interval(theta: float, eps: float, a: float, b: float) -> float:
    """區間 Λ = [a, b](ab > 0)上的 IDOS ε/(2π·a·b)，與 θ 無關

    Raises:
        DomainError: ab ≤ 0 或 a ≥ b
    """
    if not a * b > 0:
        raise DomainError("IDOS 區間需滿足 ab > 0", {'a': a, 'b': b})
    if not a < b:
        raise DomainError("IDOS 區間需滿足 a < b", {'a': a, 'b': b})
    return eps / (TWO_PI * a * b)


def idos_interval_via_momentum(eps: float, a: float, b: float) -> float:
    """以 I 將 [a, b] 映到 [1/b, 1/a]，再以 p 的局部態密度計算

    (a⁻¹ − b⁻¹)/(b − a)·𝒩^p(ε)
    """
    if not (a * b > 0 and a < b):
        raise DomainError("IDOS 區間需滿足 ab > 0 且 a < b", {'a': a, 'b': b})
    return (1.0 / a - 1.0 / b) / (b - a) * idos_momentum(eps)


def local_idos(eps: float, x: float, ell: float) -> float:
    """Λ_{x,ℓ} 上的 IDOS ε/(2π(x² + |x|ℓ))

    Λ_{x,ℓ} = [x, x+ℓ](x > 0)或 [x−ℓ, x](x < 0)。
    """
    if x == 0 or not ell > 0:
        raise DomainError("局部 IDOS 需要 x ≠ 0 且 ℓ > 0", {'x': x, 'ell': ell})
    if x > 0:
        return idos_interval(0.0, eps, x, x + ell)
    return idos_interval(0.0, eps, x - ell, x)


def pv_idos(theta: float, eps: float) -> float:
    """主值 IDOS ε/(2π)(與 θ 無關)"""
    return eps / TWO_PI


def pv_idos_window(eps: float, L: float, tol: float = 1e-12) -> float:
    """視窗 Q'_L = Q_{[−L,L]} − Q_{[−1/L,1/L]} 上的跡乘以 L/(2(L²−1))

    跡由局部態密度 |ε|/(2πx²) 在 1/L < |x| < L 上積分得到，結果對每個 L > 1
    都等於 ε/(2π)。
    """
    if not L > 1:
        raise DomainError("視窗需要 L > 1", {'L': L})
    if eps == 0:
        return 0.0
    density = abs(eps) / TWO_PI
    half = integrate_adaptive(lambda x: density / x ** 2, 1.0 / L, L, tol).value.real
    trace = 2.0 * half
    return math.copysign(1.0, eps) * L / (2.0 * (L * L - 1.0)) * trace


def idos_momentum(eps: float) -> float:
    """動量算子的 IDOS 𝒩^p(ε) = ε/(2π)"""
    return eps / TWO_PI


def idos_momentum_sum(eps: float, L: float, n_max: int) -> float:
    """局部 Fourier 基底的部分和

    g_L(ε) ≈ (1/2π) Σ_{|n| ≤ n_max} [sin(εL − πn)/(εL − πn)]²，極限為 1/(2π)。
    """
    if not L > 0 or n_max < 1:
        raise DomainError("需要 L > 0 且 n_max ≥ 1", {'L': L, 'n_max': n_max})
    n = np.arange(-int(n_max), int(n_max) + 1)
    return float(np.sum(np.sinc(eps * L / math.pi - n) ** 2) / TWO_PI)


def momentum_sum_tail_bound(eps: float, L: float, n_max: int) -> float:
    """部分和截斷誤差上界 (1/2π)(1/π²)·2/(N − |a|)，a = εL/π"""
    a = abs(eps * L / math.pi)
    if n_max <= a:
        return math.inf
    return 2.0 / (math.pi ** 2 * (n_max - a)) / TWO_PI


def idos_momentum_window(eps: float, L: float, n_max: int, tol: float = 1e-10) -> float:
    """∫_0^ε g_L(ε')dε'(部分和版本)，應等於 ε/(2π)"""
    if eps == 0:
        return 0.0
    lo, hi = sorted((0.0, float(eps)))
    value = integrate_adaptive(lambda e: idos_momentum_sum(e, L, n_max), lo, hi, tol).value.real
    return math.copysign(value, eps)


def dos_laplacian(eps: float) -> float:
    """Laplacian 的態密度 1/(2π√ε)

    Raises:
        DomainError: ε ≤ 0
    """
    if not eps > 0:
        raise DomainError("Laplacian 態密度需要 ε > 0", {'eps': eps})
    return 1.0 / (TWO_PI * math.sqrt(eps))


def idos_laplacian(eps: float) -> float:
    """Laplacian 的 IDOS 𝒩^{p²}(ε) = √ε/π = 2𝒩^p(√ε)(ε ≤ 0 時為 0)"""
    if eps <= 0:
        return 0.0
    return 2.0 * idos_momentum(math.sqrt(eps))


# ---------- Borel 轉換 ----------

def borel_transform(psi: Wavefunction, zeta: complex, k_max: Optional[float] = None,
                    tol: float = 1e-9) -> complex:
    """F(ζ) = ∫ |ψ̂(k)|²/(k − ζ) dk，Im ζ ≠ 0"""
    zeta = complex(zeta)
    if zeta.imag == 0:
        raise DomainError("Borel 轉換需要 Im ζ ≠ 0", {'zeta': zeta})
    if k_max is None:
        k_max = DEFAULT_K_MAX
        if psi.grid.kind == 'uniform':
            k_max = min(k_max, 0.9 * math.pi / psi.grid.spacing)
    psi_hat = fourier_interpolant(psi, k_max)
    cuts = [zeta.real] if -k_max < zeta.real < k_max else []
    result = integrate_adaptive(
        lambda k: abs(complex(psi_hat(np.float64(k)))) ** 2 / (k - zeta),
        -k_max, k_max, tol, limit=2000, points=cuts, raise_on_failure=False)
    if not result.converged:
        logger.warning(f"Borel 轉換未達到要求精度: err={result.err_estimate:.3e}")
    return result.value


def density_from_borel(psi: Wavefunction, eps: float, delta: float = 1e-3,
                       k_max: Optional[float] = None) -> float:
    """Stieltjes 反演 Im F(ε + iδ)/π，δ → 0 時趨於 |ψ̂(ε)|²"""
    if not delta > 0:
        raise DomainError("δ 必須為正", {'delta': delta})
    return borel_transform(psi, complex(eps, delta), k_max).imag / math.pi


__all__ = [
    'spectral_density_Pi', 'twisted_involution_kernel', 'spectral_density_momentum',
    'idos_interval',
    'idos_interval_via_momentum', 'local_idos', 'pv_idos', 'pv_idos_window',
    'idos_momentum', 'idos_momentum_sum', 'momentum_sum_tail_bound',
    'idos_momentum_window', 'dos_laplacian', 'idos_laplacian', 'borel_transform',
    'density_from_borel',
]
