# src/thermal/operators.py

"""酉算子字典、Möbius 流與熱傳播子

- I、L_θ、S_λ、N_θ 與 Hilbert 轉換
- Möbius 流 f_t 與其 C₀ 群 V_θ(t)
- 熱傳播子 U_T(t)：動量共軛路徑與核積分路徑
- 核心函數 κ₀、κ₁ 與 H_T、Π 在核心上的形式作用
- 虧指標向量與邊界資料

有 source 的波函數經過重新取樣型算子時直接組合 source，不做網格內插。
"""

import cmath
import logging
import math
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from .exceptions import AccuracyError, DomainError, PoleError, ThermalToolkitError
from .kernels import kernel_U
from .models import SIGN, FlowParams, Grid, QuadResult, ThermalParams, Wavefunction
from .quadrature import (integrate_adaptive, integrate_bessel_tail, integrate_oscillatory,
                         integrate_pv_symmetric)
from .specfun import kelvin_kei, kelvin_ker
from .wavefunction import (SQRT_2PI, apply_diag, evaluator, fourier_interpolant, norm,
                           thermal_gauss_grid)

logger = logging.getLogger(__name__)

Evaluable = Callable[[np.ndarray], np.ndarray]

# √(8/π)，κ₀ 與 κ₁ 的前置係數
KAPPA_PREFACTOR = math.sqrt(8.0 / math.pi)
# κ₀ 在 x_c 的跳躍高度 2·√(8/π)·π/4
KAPPA0_JUMP = 2.0 * KAPPA_PREFACTOR * math.pi / 4.0
# 範數差超過此值時記錄重新取樣警告
NORM_WARNING = 1e-6
# 有限差分解析度的相對門檻
FD_RESOLUTION_TOL = 1e-4
# 核積分的分塊列數
KERNEL_BLOCK = 256
# 核積分的最少區段數
MIN_KERNEL_PANELS = 200
# 動量內插的預設上限與節點數
DEFAULT_K_MAX = 40.0
FOURIER_POINTS = 4097
# 波函數支撐的相對門檻
SUPPORT_CUTOFF = 1e-15


# ---------- 重新取樣 ----------

def _compose(psi: Wavefunction, mapping: Callable[[np.ndarray], np.ndarray],
             factor: Callable[[np.ndarray], np.ndarray],
             singular_points: Sequence[float] = (),
             grid: Optional[Grid] = None, **metadata) -> Wavefunction:
    """(Tψ)(x) = factor(x)·ψ(mapping(x))，映射到無窮或非有限的點取 0"""
    base = evaluator(psi)

    def source(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            y = np.asarray(mapping(x), dtype=float)
            finite = np.isfinite(y)
            inner = np.where(finite, base(np.where(finite, y, 0.0)), 0.0)
            values = np.asarray(factor(x), dtype=complex) * inner
        return np.where(np.isfinite(values), values, 0.0)

    grid = grid or psi.grid
    merged = dict(psi.metadata)
    merged.update(metadata)
    if psi.source is None:
        merged['interpolated'] = True
    points = sorted(set(float(p) for p in singular_points if math.isfinite(p)))
    return Wavefunction(grid, source(grid.points), source=source,
                        singular_points=tuple(points), metadata=merged)


def _check_norm(before: float, after: Wavefunction, what: str) -> Dict[str, float]:
    loss = before - norm(after)
    report = {'norm_in': before, 'norm_out': before - loss, 'norm_change': loss}
    if abs(loss) > NORM_WARNING:
        logger.warning(f"{what}: 網格範數變化 {loss:.3e}，網格可能不足以解析輸出")
        report['accuracy_warning'] = True
    return report


def involution_I(psi: Wavefunction, grid: Optional[Grid] = None,
                 check_norm: bool = True) -> Wavefunction:
    """酉對合 (Iψ)(x) = ψ(1/x)/x

    Args:
        psi: 輸入波函數
        grid: 輸出網格(預設沿用輸入網格)
        check_norm: 是否比較輸入與輸出的網格範數

    Returns:
        Wavefunction: metadata 帶有網格範數的變化量與解析度警告
    """
    out = _involution(psi, grid)
    if not check_norm:
        return out
    report = _check_norm(norm(psi), out, "involution_I")
    return out.with_values(out.values, source=out.source,
                           singular_points=out.singular_points, **report)


def _involution(psi: Wavefunction, grid: Optional[Grid] = None) -> Wavefunction:
    singular = [0.0] + [1.0 / p for p in psi.singular_points if p != 0]
    return _compose(psi, lambda x: 1.0 / x, lambda x: 1.0 / x, singular, grid)


def phase_L(theta: float, psi: Wavefunction) -> Wavefunction:
    """(L_θψ)(x) = e^{i sgn(x)θ/2}ψ(x)，L_θ* = L_{−θ}"""
    return apply_diag(lambda x: np.exp(0.5j * theta * SIGN.sgn(x)), psi)


def translate(psi: Wavefunction, shift: float, grid: Optional[Grid] = None) -> Wavefunction:
    """平移 ψ(x) ↦ ψ(x − shift)，即 e^{−i·shift·p}"""
    singular = [p + shift for p in psi.singular_points]
    return _compose(psi, lambda x: x - shift, lambda x: np.ones_like(x), singular, grid)


def translate_S(lam: float, psi: Wavefunction, grid: Optional[Grid] = None) -> Wavefunction:
    """(S_λψ)(x) = ψ(x − 1/λ)"""
    return translate(psi, 1.0 / ThermalParams(lam).lam, grid)


def translate_S_adjoint(lam: float, psi: Wavefunction,
                        grid: Optional[Grid] = None) -> Wavefunction:
    """(S_λ*ψ)(x) = ψ(x + 1/λ)"""
    return translate(psi, -1.0 / ThermalParams(lam).lam, grid)


# ---------- Möbius 流 ----------

def flow_f(t: float, x: float) -> float:
    """Möbius 流 f_t(x) = x/(1 − tx)

    ∞(±inf 視為同一點)的慣例：f_t(1/t) = ∞，f_t(∞) = −1/t(t ≠ 0)，f_0 = Id。
    """
    if math.isinf(x):
        return math.inf if t == 0 else -1.0 / t
    denominator = 1.0 - t * x
    if denominator == 0:
        return math.inf
    return x / denominator


def flow_points(t: float, x: np.ndarray) -> np.ndarray:
    """flow_f 的陣列版本(極點映到 inf)"""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        values = x / (1.0 - t * x)
    return np.where(1.0 - t * x == 0, np.inf, values)


def propagate_V(theta: float, t: float, psi: Wavefunction,
                grid: Optional[Grid] = None) -> Wavefunction:
    """Π_θ 產生的酉群 (V_θ(t)ψ)(x) = e^{i(θ/2)(1−sgn(1−tx))sgn x}·ψ(x/(1−tx))/(1−tx)

    以封閉形式直接組合，網格跨過極點 x = 1/t 時 metadata 記錄質量損失。
    """
    params = FlowParams(theta, t)
    theta, t = params.theta, params.t
    if t == 0:
        return _compose(psi, lambda x: x, lambda x: np.ones_like(x), psi.singular_points,
                        grid, theta=theta, t=0.0)

    def factor(x):
        gap = 1.0 - t * x
        return np.exp(0.5j * theta * (1.0 - SIGN.sgn(gap)) * SIGN.sgn(x)) / gap

    pole = 1.0 / t
    singular = [pole] + [p / (1.0 + t * p) for p in psi.singular_points if 1.0 + t * p != 0]
    out = _compose(psi, lambda x: x / (1.0 - t * x), factor, singular, grid,
                   theta=theta, t=t, pole=pole)
    lo, hi = out.grid.span
    report = _check_norm(norm(psi), out, "propagate_V")
    report['straddles_pole'] = bool(lo < pole < hi)
    report['mass_loss'] = report['norm_in'] ** 2 - report['norm_out'] ** 2
    if report['straddles_pole']:
        logger.debug(f"propagate_V: 輸出網格跨過極點 x = {pole:.6g}，"
                     f"質量損失 {report['mass_loss']:.3e}")
    return out.with_values(out.values, source=out.source,
                           singular_points=out.singular_points, **report)


def propagate_V_conjugated(theta: float, t: float, psi: Wavefunction,
                           grid: Optional[Grid] = None) -> Wavefunction:
    """V_θ(t) = L_θ·I·e^{−itp}·I·L_θ*(逐步組合，用於驗證封閉形式)"""
    params = FlowParams(theta, t)
    step = phase_L(-params.theta, psi)
    step = _involution(step)
    step = translate(step, params.t)
    step = _involution(step)
    out = phase_L(params.theta, step)
    if grid is not None:
        out = _compose(out, lambda x: x, lambda x: np.ones_like(x), out.singular_points, grid)
    return out.with_values(out.values, source=out.source,
                           singular_points=out.singular_points, route='conjugated')


# ---------- 熱傳播子 ----------

def _support(psi: Wavefunction) -> Tuple[float, float]:
    """|ψ| 超過相對門檻的網格範圍(含一格餘裕)"""
    magnitude = np.abs(psi.values)
    peak = float(np.max(magnitude))
    if peak == 0:
        return psi.grid.span
    idx = np.nonzero(magnitude > SUPPORT_CUTOFF * peak)[0]
    first = max(int(idx[0]) - 1, 0)
    last = min(int(idx[-1]) + 1, psi.grid.size - 1)
    return float(psi.x[first]), float(psi.x[last])


def _kernel_nodes(lam: float, tau: float, psi: Wavefunction, X: np.ndarray,
                  panels: Optional[int]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """核積分的節點、權重與 ψ 值

    有 source 時在 y = x_c ± s² 上取 Gauss 節點(跳躍點 y = x_c 為區段端點)，
    否則直接使用輸入網格的權重。
    """
    if psi.source is None:
        return psi.x, psi.grid.weights, psi.values
    center = -1.0 / lam
    lo, hi = _support(psi)
    reach = max(abs(lo - center), abs(hi - center))
    s_max = math.sqrt(reach)
    frequency = (2.0 * math.sqrt(float(np.max(np.abs(X)))) + 2.0 * s_max) / abs(tau)
    if panels is None:
        panels = max(MIN_KERNEL_PANELS, int(math.ceil(s_max * frequency)))
    if lo > center:
        sides = 'right'
    elif hi < center:
        sides = 'left'
    else:
        sides = 'both'
    nodes = thermal_gauss_grid(lam, reach, panels, sides=sides)
    return nodes.points, nodes.weights, evaluator(psi)(nodes.points)


def _propagate_kernel(lam: float, t: float, psi: Wavefunction, grid: Grid,
                      panels: Optional[int]) -> Tuple[np.ndarray, Dict]:
    tau = lam * t
    center = -1.0 / lam
    X = grid.points - center
    y, weights, values = _kernel_nodes(lam, tau, psi, X, panels)
    Y = y - center
    weighted = weights * values
    out = np.empty(grid.size, dtype=complex)
    for start in range(0, grid.size, KERNEL_BLOCK):
        block = X[start:start + KERNEL_BLOCK]
        out[start:start + KERNEL_BLOCK] = kernel_U(tau, block[:, None], Y[None, :]) @ weighted
    return out, {'nodes': int(y.size)}


def _conjugation_point(big_phi: Evaluable, X: float, a: float, k_max: float,
                       tol: float) -> QuadResult:
    """(2π)^{−1/2}∫ Φ(q) e^{iXq/(1+aq)} dq/(1+aq)，以 u = 1 + aq 分段

    |u| ≥ 1 直接積分；|u| < 1 以 v = 1/|u| 轉為 [1, ∞) 上的振盪積分，
    u → 0 處的常數部分以正弦積分 Si 的封閉形式處理。
    """
    kappa = X / a
    phase = cmath.exp(1j * kappa)

    def F(u: float) -> complex:
        return complex(big_phi(np.float64((u - 1.0) / a))) * phase

    def outer(u: float) -> complex:
        return F(u) * cmath.exp(-1j * kappa / u) / u

    total = QuadResult(0j, 0.0, 0)
    reach = abs(a) * k_max
    if reach > 0:
        total = total + integrate_adaptive(outer, 1.0, 1.0 + reach, tol,
                                           raise_on_failure=False)
    if 1.0 - reach < -1.0:
        total = total + integrate_adaptive(outer, 1.0 - reach, -1.0, tol,
                                           raise_on_failure=False)

    f0 = F(0.0)
    plus = integrate_oscillatory(lambda v: (F(1.0 / v) - f0) / v, -kappa, 1.0, math.inf,
                                 tol, raise_on_failure=False)
    minus = integrate_oscillatory(lambda v: (F(-1.0 / v) - f0) / v, kappa, 1.0, math.inf,
                                  tol, raise_on_failure=False)
    total = total + plus + minus.scaled(-1.0)
    if kappa != 0:
        si, _ = special.sici(abs(kappa))
        closed = -2j * f0 * math.copysign(1.0, kappa) * (math.pi / 2 - si)
        total = total + QuadResult(closed, 0.0, 0)
    return total.scaled(1.0 / (SQRT_2PI * abs(a)))


def _propagate_conjugation(lam: float, t: float, psi: Wavefunction, grid: Grid,
                           tol: float, k_max: Optional[float]) -> Tuple[np.ndarray, Dict]:
    a = lam * t
    if k_max is None:
        k_max = DEFAULT_K_MAX
        if psi.grid.kind == 'uniform':
            k_max = min(k_max, 0.9 * math.pi / psi.grid.spacing)
    psi_hat = fourier_interpolant(psi, k_max, FOURIER_POINTS)

    def big_phi(q):
        # S_λ 在動量空間為相位 e^{−iq/λ}
        return psi_hat(q) * np.exp(-1j * np.asarray(q) / lam)

    out = np.empty(grid.size, dtype=complex)
    converged = True
    worst = 0.0
    for i, x in enumerate(grid.points):
        result = _conjugation_point(big_phi, float(x) + 1.0 / lam, a, k_max, tol)
        out[i] = result.value
        converged = converged and result.converged
        worst = max(worst, result.err_estimate)
    if not converged:
        logger.warning(f"propagate_HT(共軛路徑): 部分積分未收斂，最大誤差估計 {worst:.3e}")
    return out, {'k_max': k_max, 'converged': converged, 'err_estimate': worst}


def propagate_HT(lam: float, t: float, psi: Wavefunction, backend: str = 'conjugation',
                 grid: Optional[Grid] = None, tol: float = 1e-9,
                 k_max: Optional[float] = None,
                 panels: Optional[int] = None) -> Wavefunction:
    """熱傳播子 U_T(t) = S_λ*(B e^{iλtx} B)S_λ

    Args:
        lam: 熱梯度強度 λ
        t: 時間
        psi: 輸入波函數
        backend: 'conjugation'(動量空間的 Möbius 流，逐點振盪積分)或
            'kernel'(對 𝕌_{λt}(x+1/λ, y+1/λ) 積分)
        grid: 輸出網格(預設沿用輸入網格)
        tol: 共軛路徑的積分容許誤差
        k_max: 共軛路徑的動量截斷
        panels: 核路徑的 Gauss 區段數(預設依振盪頻率決定)

    Returns:
        Wavefunction: 輸出網格上的 U_T(t)ψ

    Raises:
        DomainError: 未知後端，或核路徑的 t = 0
    """
    lam = ThermalParams(lam).lam
    grid = grid or psi.grid
    if backend not in ('conjugation', 'kernel'):
        raise DomainError(f"未知的傳播子後端: {backend}",
                          {'allowed': ['conjugation', 'kernel']})
    if backend == 'kernel' and t == 0:
        raise DomainError("核路徑需要 t ≠ 0")
    metadata = {'backend': backend, 'lambda': lam, 't': t}
    if t == 0:
        values = evaluator(psi)(grid.points)
        return Wavefunction(grid, values, metadata=metadata)

    try:
        if backend == 'kernel':
            values, extra = _propagate_kernel(lam, t, psi, grid, panels)
        else:
            values, extra = _propagate_conjugation(lam, t, psi, grid, tol, k_max)
    except ThermalToolkitError:
        raise
    except Exception as e:
        logger.error(f"propagate_HT 失敗: {e}", exc_info=True)
        raise AccuracyError(f"熱傳播子計算失敗: {e}", metadata)
    metadata.update(extra)
    return Wavefunction(grid, values, metadata=metadata)


# ---------- 核心函數 κ₀、κ₁ ----------

def kappa_functions(lam: float) -> Tuple[Evaluable, Evaluable]:
    """核心函數

    κ₀(x) = −√(8/π)·sgn(x+1/λ)·kei(2√|x+1/λ|)
    κ₁(x) = √(8/π)·ker(2√|x+1/λ|)

    κ₀ 在 x_c = −1/λ 跳躍 2·√(8/π)·π/4(sgn(0) = 0 故 κ₀(x_c) = 0)，
    κ₁ 在 x_c 對數發散。

    Raises:
        DomainError: λ ≤ 0
    """
    x_c = ThermalParams(lam).x_c

    def kappa0(x):
        d = np.asarray(x, dtype=float) - x_c
        value = -KAPPA_PREFACTOR * SIGN.sgn(d) * kelvin_kei(2.0 * np.sqrt(np.abs(d)))
        return float(value) if np.ndim(value) == 0 else value

    def kappa1(x):
        d = np.asarray(x, dtype=float) - x_c
        if np.any(d == 0):
            raise PoleError("κ₁ 在臨界點 x_c 對數發散", {'x_c': x_c})
        value = KAPPA_PREFACTOR * kelvin_ker(2.0 * np.sqrt(np.abs(d)))
        return float(value) if np.ndim(value) == 0 else value

    return kappa0, kappa1


def apply_B(f: Callable[[float], complex], x: float, tol: float = 1e-10) -> complex:
    """(Bf)(x) = ∫𝔹(x,y)f(y)dy，以 y = ∓s² 化為半線 Bessel 積分

    x > 0：i∫_0^∞ J₀(2s√x) f(−s²) 2s ds
    x < 0：−i∫_0^∞ J₀(2s√|x|) f(s²) 2s ds
    x = 0：−(i/2)∫ sgn(y) f(y) dy
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("apply_B 需要有限的 x", {'x': x})
    if x == 0:
        right = integrate_adaptive(lambda y: complex(f(y)), 0.0, math.inf, tol).value
        left = integrate_adaptive(lambda y: complex(f(y)), -math.inf, 0.0, tol).value
        return -0.5j * (right - left)
    side = 1.0 if x > 0 else -1.0
    result = integrate_bessel_tail(lambda s: 2.0 * s * complex(f(-side * s * s)),
                                   [2.0 * math.sqrt(abs(x))], 0.0, 0.0, tol)
    return side * 1j * result.value


def apply_B_lambda(lam: float, f: Callable[[float], complex], x: float,
                   tol: float = 1e-10) -> complex:
    """(B_λf)(x) = (Bf)(x + 1/λ)，即 S_λ*B"""
    return apply_B(f, x + 1.0 / ThermalParams(lam).lam, tol)


# ---------- 有限差分 ----------

def fd_derivative(values: np.ndarray, h: float, order: int = 1) -> np.ndarray:
    """四階中心差分(邊界兩點用四階單側差分)

    Args:
        values: 等距網格上的函數值(至少 6 點)
        h: 網格間距
        order: 1 或 2 階導數
    """
    f = np.asarray(values, dtype=complex)
    if f.size < 6:
        raise DomainError("四階差分至少需要 6 個網格點", {'size': int(f.size)})
    out = np.empty_like(f)
    if order == 1:
        out[2:-2] = (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * h)
        out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
        out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
        out[-1] = -(-25 * f[-1] + 48 * f[-2] - 36 * f[-3] + 16 * f[-4] - 3 * f[-5]) / (12 * h)
        out[-2] = -(-3 * f[-1] - 10 * f[-2] + 18 * f[-3] - 6 * f[-4] + f[-5]) / (12 * h)
    elif order == 2:
        out[2:-2] = (-f[4:] + 16 * f[3:-1] - 30 * f[2:-2] + 16 * f[1:-3] - f[:-4]) / (12 * h * h)
        out[0] = (45 * f[0] - 154 * f[1] + 214 * f[2] - 156 * f[3] + 61 * f[4]
                  - 10 * f[5]) / (12 * h * h)
        out[1] = (10 * f[0] - 15 * f[1] - 4 * f[2] + 14 * f[3] - 6 * f[4] + f[5]) / (12 * h * h)
        out[-1] = (45 * f[-1] - 154 * f[-2] + 214 * f[-3] - 156 * f[-4] + 61 * f[-5]
                   - 10 * f[-6]) / (12 * h * h)
        out[-2] = (10 * f[-1] - 15 * f[-2] - 4 * f[-3] + 14 * f[-4] - 6 * f[-5]
                   + f[-6]) / (12 * h * h)
    else:
        raise DomainError(f"不支援的導數階數: {order}")
    return out


def _resolution_error(values: np.ndarray, h: float) -> float:
    """以 h 與 2h 的二階導數差估計差分誤差(相對值)"""
    fine = fd_derivative(values, h, 2)[::2]
    coarse = fd_derivative(values[::2], 2 * h, 2)
    if coarse.size < 12:
        return 0.0
    diff = np.max(np.abs(fine[4:-4] - coarse[4:-4])) / 15.0
    scale = max(float(np.max(np.abs(fine[4:-4]))), 1e-300)
    return float(diff / scale)


def _uniform_spacing(psi: Wavefunction, what: str) -> float:
    if psi.grid.kind != 'uniform':
        raise DomainError(f"{what} 需要等距網格")
    return psi.grid.spacing


def apply_HT_core(lam: float, psi: Wavefunction, c: complex = 0j,
                  check_resolution: bool = True) -> Wavefunction:
    """H_T 在核心上的作用 −(1+λx)ψ″ − λψ′ + c·κ₁

    Args:
        lam: 熱梯度強度 λ
        psi: 等距網格上的平滑波函數
        c: κ₁ 分量的係數
        check_resolution: 是否以 h/2h 比較檢查網格解析度

    Raises:
        AccuracyError: 網格太粗無法解析 ψ″
        PoleError: c ≠ 0 且網格含 x_c
    """
    lam = ThermalParams(lam).lam
    h = _uniform_spacing(psi, "apply_HT_core")
    x = psi.x
    values = np.zeros(psi.grid.size, dtype=complex)
    if np.any(psi.values != 0):
        if check_resolution:
            error = _resolution_error(psi.values, h)
            if error > FD_RESOLUTION_TOL:
                raise AccuracyError("網格太粗，無法解析 ψ″",
                                    {'relative_error': error, 'spacing': h})
        d1 = fd_derivative(psi.values, h, 1)
        d2 = fd_derivative(psi.values, h, 2)
        values = -(1.0 + lam * x) * d2 - lam * d1
    if c != 0:
        _, kappa1 = kappa_functions(lam)
        values = values + complex(c) * kappa1(x)
    return psi.with_values(values, operator='H_T', c=complex(c))


def apply_Pi(psi: Wavefunction) -> Wavefunction:
    """Π 的形式作用 Πψ = i(x²ψ′ + xψ) = I p I ψ"""
    h = _uniform_spacing(psi, "apply_Pi")
    x = psi.x
    values = 1j * (x ** 2 * fd_derivative(psi.values, h, 1) + x * psi.values)
    return psi.with_values(values, operator='Pi')


def apply_Pi_theta(theta: float, psi: Wavefunction, c: complex = 0j) -> Wavefunction:
    """Π_θ(ψ + cζ_θ) = Πψ + cζ_{θ+π}"""
    out = apply_Pi(psi)
    if c == 0:
        return out
    _, zeta = deficiency_vectors(theta + math.pi)
    values = out.values + complex(c) * zeta(psi.x)
    return psi.with_values(values, operator='Pi_theta', theta=theta, c=complex(c))


# ---------- 虧指標向量與邊界資料 ----------

def deficiency_vectors(theta: float) -> Tuple[Evaluable, Evaluable]:
    """(η_θ, ζ_θ)

    η_θ(x) = e^{−|x|}e^{i sgn(x)θ/2}
    ζ_θ(x) = (1/x)e^{−1/|x|}e^{i sgn(x)θ/2} = (Iη_θ)(x)，ζ_θ(0) = 0
    """
    def eta(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-np.abs(x)) * np.exp(0.5j * theta * SIGN.sgn(x))

    def zeta(x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x == 0, 1.0, x)
        value = np.exp(-1.0 / np.abs(safe)) / safe * np.exp(0.5j * theta * SIGN.sgn(x))
        return np.where(x == 0, 0.0, value)

    return eta, zeta


def deficiency_solutions() -> Tuple[Evaluable, Evaluable]:
    """正規化的弱解 φ₊ = √2e^{−x}(x > 0)與 φ₋ = √2e^{x}(x < 0)，φ′_± = ∓φ_±"""
    def phi_plus(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, math.sqrt(2.0) * np.exp(-np.abs(x)), 0.0) + 0j

    def phi_minus(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, math.sqrt(2.0) * np.exp(-np.abs(x)), 0.0) + 0j

    return phi_plus, phi_minus


def boundary_values(theta: float, psi: Wavefunction, X: float) -> Dict[str, complex]:
    """(xψ)(±X) 與邊界殘差 e^{−iθ/2}(xψ)(+X) − e^{iθ/2}(xψ)(−X)"""
    f = evaluator(psi)
    plus = complex(X * f(np.float64(X)))
    minus = complex(-X * f(np.float64(-X)))
    residual = cmath.exp(-0.5j * theta) * plus - cmath.exp(0.5j * theta) * minus
    return {'plus': plus, 'minus': minus, 'residual': residual}


def domain_decay_diagnostic(psi: Wavefunction, tail_fraction: float = 0.05,
                            threshold: float = 1e-6) -> Dict[str, float]:
    """檢查網格尾端 |xψ(x)| 是否趨於 0(𝒟₀ 的成員條件)"""
    count = max(int(psi.grid.size * tail_fraction), 1)
    weighted = np.abs(psi.x * psi.values)
    left = float(np.max(weighted[:count]))
    right = float(np.max(weighted[-count:]))
    return {'tail_left': left, 'tail_right': right,
            'member': bool(max(left, right) <= threshold)}


def _one_sided(psi: Wavefunction, side: float) -> complex:
    if psi.source is not None:
        return complex(evaluator(psi)(np.float64(side * 1e-14)))
    x = psi.x
    mask = x * side > 0
    if np.count_nonzero(mask) < 2:
        raise DomainError("網格在原點單側的點不足")
    xs, vs = x[mask], psi.values[mask]
    order = np.argsort(np.abs(xs))[:2]
    (x1, x2), (v1, v2) = xs[order], vs[order]
    return complex(v1 + (v2 - v1) * (0.0 - x1) / (x2 - x1))


def boundary_triplet(psi: Wavefunction) -> Tuple[complex, complex]:
    """(Γ₀ψ, Γ₁ψ) = ((ψ(0⁺)−ψ(0⁻))/(i√2), (ψ(0⁺)+ψ(0⁻))/√2)"""
    right = _one_sided(psi, 1.0)
    left = _one_sided(psi, -1.0)
    root2 = math.sqrt(2.0)
    return (right - left) / (1j * root2), (right + left) / root2


def extension_angle(gamma: float) -> float:
    """延伸參數 γ 對應的角度 arctan(1/γ)(γ = 0 時為 π/2)"""
    if gamma == 0:
        return math.pi / 2
    return math.atan(1.0 / gamma)


# ---------- Hilbert 轉換與 N_θ ----------

def hilbert_transform(psi: Wavefunction, grid: Optional[Grid] = None,
                      tol: float = 1e-9, limit: int = 2000) -> Wavefunction:
    """(Hψ)(x) = (1/π) PV∫ ψ(y)/(x − y) dy = (1/π)∫_0^∞ [ψ(x−u) − ψ(x+u)]/u du

    每個輸出點做一次對稱主值積分。輸出帶有 source：網格內為樣條，
    網格外為漸近尾端 A/x + B/x²，A = (1/π)∫ψ，B = (1/π)∫yψ。
    """
    grid = grid or psi.grid
    f = evaluator(psi)
    lo, hi = psi.grid.span
    out = np.empty(grid.size, dtype=complex)
    worst = 0.0
    converged = True
    for i, x in enumerate(grid.points):
        cuts = [x - lo, hi - x] + [x - p for p in psi.singular_points]
        result = integrate_pv_symmetric(lambda u, x=x: complex(f(np.float64(x - u))) / u,
                                        tol, cuts, limit, raise_on_failure=False)
        out[i] = result.value / math.pi
        worst = max(worst, result.err_estimate)
        converged = converged and result.converged
    if not converged:
        logger.warning(f"hilbert_transform: 部分積分未收斂，最大誤差估計 {worst:.3e}")

    weights = psi.grid.weights
    moment0 = complex(np.sum(weights * psi.values)) / math.pi
    moment1 = complex(np.sum(weights * psi.x * psi.values)) / math.pi
    inside = Wavefunction(grid, out)
    spline = evaluator(inside)
    g_lo, g_hi = grid.span

    def source(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            tail = moment0 / x + moment1 / x ** 2
        return np.where((x >= g_lo) & (x <= g_hi), spline(x), tail)

    metadata = {'operator': 'hilbert', 'err_estimate': worst, 'converged': converged}
    return Wavefunction(grid, out, source=source, singular_points=(g_lo, g_hi),
                        metadata=metadata)


def intertwiner_N(theta: float, psi: Wavefunction, grid: Optional[Grid] = None,
                  tol: float = 1e-9) -> Wavefunction:
    """N_θψ = cos(θ/2)ψ − sin(θ/2)·Hψ"""
    grid = grid or psi.grid
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    base = evaluator(psi)
    if s == 0:
        return Wavefunction(grid, c * base(grid.points), source=lambda x: c * base(x),
                            singular_points=psi.singular_points, metadata={'theta': theta})
    h_psi = hilbert_transform(psi, grid, tol)
    h_source = h_psi.source

    def source(x):
        return c * base(x) - s * h_source(x)

    points = tuple(psi.singular_points) + tuple(h_psi.singular_points)
    return Wavefunction(grid, c * base(grid.points) - s * h_psi.values, source=source,
                        singular_points=points, metadata={'theta': theta})
