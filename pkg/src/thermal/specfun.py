# src/thermal/specfun.py

"""特殊函數求值

主要求值路徑使用 scipy.special(J₀、I₀、K₀、ker、kei 與 Hankel 包絡)。
OracleEvaluator 以 mpmath 延伸精度的冪級數/漸近展開/積分表示式提供
獨立的對照值，用於測試與自我驗收。
"""

import logging
import math
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
from scipy import special

from .exceptions import AccuracyError, DomainError, PoleError
from .models import EvalDomain

logger = logging.getLogger(__name__)

ArrayLike = Union[float, complex, np.ndarray]

# J₀ 第一個零點
J0_FIRST_ZERO = 2.404825557695773

# 預設求值區域
DEFAULT_DOMAINS = {
    'j0': EvalDomain(crossover=20.0, series_terms=80, target_rel_tol=1e-12),
    'i0': EvalDomain(crossover=20.0, series_terms=120, target_rel_tol=1e-10),
    'k0': EvalDomain(crossover=12.0, series_terms=80, target_rel_tol=1e-9),
}


def _check_finite(z, name: str):
    if not np.all(np.isfinite(z)):
        raise DomainError(f"{name}: 輸入必須為有限值", {'input': np.asarray(z).tolist()})


def _unwrap(values: np.ndarray, scalar: bool):
    return values.item() if scalar else values


def bessel_j0(x: ArrayLike) -> ArrayLike:
    """第一類零階 Bessel 函數 J₀(x)

    Args:
        x: 實數或實數陣列

    Returns:
        J₀(x)，與輸入同形狀

    Raises:
        DomainError: 輸入非有限
    """
    arr = np.asarray(x, dtype=float)
    _check_finite(arr, 'bessel_j0')
    return _unwrap(special.j0(arr), arr.ndim == 0)


def bessel_i0(z: ArrayLike) -> ArrayLike:
    """第一類修正零階 Bessel 函數 I₀(z)，接受複數引數"""
    arr = np.asarray(z, dtype=complex)
    _check_finite(arr, 'bessel_i0')
    return _unwrap(special.iv(0, arr), arr.ndim == 0)


def bessel_k0(z: ArrayLike) -> ArrayLike:
    """第二類修正零階 Bessel 函數 K₀(z)(主分支)

    實數輸入回傳實數。

    Raises:
        PoleError: z = 0
        DomainError: 非有限輸入或位於負實軸(分支切割)
    """
    real_input = np.isrealobj(z)
    arr = np.asarray(z, dtype=complex)
    _check_finite(arr, 'bessel_k0')
    if np.any(arr == 0):
        raise PoleError("K₀ 在 z = 0 有對數極點")
    if np.any((arr.imag == 0) & (arr.real < 0)):
        raise DomainError("K₀ 的引數位於分支切割(負實軸)上",
                          {'input': np.asarray(z).tolist()})
    if real_input:
        return _unwrap(special.k0(arr.real), arr.ndim == 0)
    return _unwrap(special.kv(0, arr), arr.ndim == 0)


def kelvin_ker(x: ArrayLike) -> ArrayLike:
    """不規則 Kelvin 函數 ker(x)，x > 0"""
    arr = np.asarray(x, dtype=float)
    _check_finite(arr, 'kelvin_ker')
    if np.any(arr < 0):
        raise DomainError("ker 僅定義於 x ≥ 0")
    if np.any(arr == 0):
        raise PoleError("ker 在原點對數發散")
    return _unwrap(special.ker(arr), arr.ndim == 0)


def kelvin_kei(x: ArrayLike) -> ArrayLike:
    """不規則 Kelvin 函數 kei(x)，x ≥ 0，kei(0) = −π/4"""
    arr = np.asarray(x, dtype=float)
    _check_finite(arr, 'kelvin_kei')
    if np.any(arr < 0):
        raise DomainError("kei 僅定義於 x ≥ 0")
    values = np.where(arr == 0, -math.pi / 4, special.kei(arr))
    return _unwrap(values, arr.ndim == 0)


def bessel_j0_envelope(z: ArrayLike) -> ArrayLike:
    """J₀ 的慢變包絡 H₀⁽¹⁾(z)·e^{−iz}，z > 0

    對實數 z 有 J₀(z) = Re[包絡·e^{iz}]。
    """
    arr = np.asarray(z, dtype=float)
    _check_finite(arr, 'bessel_j0_envelope')
    if np.any(arr <= 0):
        raise DomainError("Hankel 包絡僅定義於 z > 0")
    return _unwrap(special.hankel1(0, arr) * np.exp(-1j * arr), arr.ndim == 0)


def relative_error(value: complex, reference: complex) -> float:
    """相對誤差(參考值為 0 時改用絕對誤差)"""
    scale = abs(reference)
    diff = abs(complex(value) - complex(reference))
    return diff / scale if scale > 0 else diff


class OracleEvaluator:
    """延伸精度的獨立特殊函數神諭

    J₀ 與 I₀ 以冪級數(|z| ≤ crossover)及漸近展開求值，K₀ 以積分表示式
    ∫₀^∞ e^{−z cosh t} dt 與漸近展開求值；Kelvin 函數經由 K₀(x e^{iπ/4})。
    """

    def __init__(self, domains: Optional[Dict[str, EvalDomain]] = None,
                 digits: int = 40):
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.domains = dict(DEFAULT_DOMAINS)
        self.domains.update(domains or {})
        for domain in self.domains.values():
            domain.validate()
        self.digits = int(digits)

    # ---------- J₀ ----------

    def _j0_series_mp(self, x, terms: int):
        q = -(mpmath.mpf(x) ** 2) / 4
        total = mpmath.mpf(0)
        term = mpmath.mpf(1)
        for k in range(terms):
            if k > 0:
                term *= q / (k * k)
            total += term
            if abs(term) < mpmath.mpf(10) ** (-self.digits) * max(abs(total), 1):
                return total
        if abs(term) > mpmath.mpf(10) ** (-15):
            raise AccuracyError("J₀ 冪級數在項數上限內未收斂",
                                {'x': float(x), 'terms': terms},
                                best_estimate=float(total))
        return total

    def j0_series(self, x: float, terms: Optional[int] = None) -> float:
        """J₀ 的冪級數 Σ (−x²/4)^k/(k!)²"""
        terms = terms or self.domains['j0'].series_terms
        with mpmath.workdps(self.digits):
            return float(self._j0_series_mp(x, terms))

    def _asymptotic_pq(self, x):
        """Hankel 漸近展開的 P、Q(最佳截斷)"""
        p = mpmath.mpf(1)
        q = mpmath.mpf(0)
        a_k = mpmath.mpf(1)
        previous = mpmath.inf
        tiny = mpmath.mpf(10) ** (-self.digits)
        for k in range(1, 200):
            a_k *= mpmath.mpf(2 * k - 1) ** 2 / (8 * k)
            term = a_k / mpmath.mpf(x) ** k
            if term > previous or term < tiny:
                break
            previous = term
            j = k // 2
            if k % 2 == 0:
                p += (-1) ** j * term
            else:
                q += (-1) ** (j + 1) * term
        return p, q

    def j0_asymptotic(self, x: float) -> float:
        """J₀ 的大引數漸近展開"""
        x = abs(float(x))
        if x == 0:
            raise DomainError("漸近展開不適用於 x = 0")
        with mpmath.workdps(self.digits):
            xm = mpmath.mpf(x)
            p, q = self._asymptotic_pq(xm)
            chi = xm - mpmath.pi / 4
            value = mpmath.sqrt(2 / (mpmath.pi * xm)) * (p * mpmath.cos(chi) - q * mpmath.sin(chi))
            return float(value)

    def j0(self, x: float) -> float:
        _check_finite(x, 'oracle.j0')
        if abs(x) <= self.domains['j0'].crossover:
            return self.j0_series(x)
        return self.j0_asymptotic(x)

    def j0_first_zero(self, guess: float = 2.4) -> float:
        """以冪級數神諭求 J₀ 第一個零點"""
        with mpmath.workdps(self.digits):
            root = mpmath.findroot(lambda t: self._j0_series_mp(t, 40), mpmath.mpf(guess))
            return float(root)

    # ---------- I₀ ----------

    def i0_series(self, z: complex) -> complex:
        """I₀ 的冪級數 Σ (z²/4)^k/(k!)²"""
        domain = self.domains['i0']
        with mpmath.workdps(self.digits):
            q = mpmath.mpc(z) ** 2 / 4
            total = mpmath.mpc(0)
            term = mpmath.mpc(1)
            for k in range(domain.series_terms):
                if k > 0:
                    term *= q / (k * k)
                total += term
                if abs(term) < mpmath.mpf(10) ** (-self.digits) * max(abs(total), 1):
                    break
            else:
                raise AccuracyError("I₀ 冪級數在項數上限內未收斂",
                                    {'z': complex(z)}, best_estimate=complex(total))
            return complex(total)

    def i0(self, z: complex) -> complex:
        _check_finite(z, 'oracle.i0')
        return self.i0_series(z)

    def i0_integral(self, x: float) -> float:
        """I₀(x) = (1/π)∫₀^π e^{x cos t} dt"""
        with mpmath.workdps(self.digits):
            value = mpmath.quad(lambda t: mpmath.exp(x * mpmath.cos(t)), [0, mpmath.pi])
            return float(value / mpmath.pi)

    # ---------- K₀ ----------

    def k0_integral(self, z: complex) -> complex:
        """K₀(z) = ∫₀^∞ e^{−z cosh t} dt，需 Re z > 0"""
        z = complex(z)
        if z.real <= 0:
            raise DomainError("積分表示式需要 Re z > 0", {'z': z})
        with mpmath.workdps(self.digits):
            zm = mpmath.mpc(z)
            value = mpmath.quad(lambda t: mpmath.exp(-zm * mpmath.cosh(t)),
                                [0, 1, 2, 4, mpmath.inf])
            return complex(value)

    def k0_series(self, z: complex) -> complex:
        """K₀(z) = −(log(z/2)+γ)I₀(z) + Σ H_k (z²/4)^k/(k!)²，適用任意主分支引數"""
        with mpmath.workdps(self.digits):
            zm = mpmath.mpc(z)
            q = zm ** 2 / 4
            total = mpmath.mpc(0)
            term = mpmath.mpc(1)
            harmonic = mpmath.mpf(0)
            for k in range(1, self.domains['k0'].series_terms * 2):
                term *= q / (k * k)
                harmonic += mpmath.mpf(1) / k
                total += term * harmonic
                if abs(term) < mpmath.mpf(10) ** (-self.digits):
                    break
            i0 = mpmath.besseli(0, zm)
            return complex(-(mpmath.log(zm / 2) + mpmath.euler) * i0 + total)

    def k0_asymptotic(self, z: complex) -> complex:
        """K₀ 的大引數漸近展開 √(π/2z)e^{−z} Σ (−1)^k a_k / z^k"""
        with mpmath.workdps(self.digits):
            zm = mpmath.mpc(z)
            total = mpmath.mpc(1)
            a_k = mpmath.mpf(1)
            previous = mpmath.inf
            for k in range(1, 200):
                a_k *= mpmath.mpf(2 * k - 1) ** 2 / (8 * k)
                term = (-1) ** k * a_k / zm ** k
                if abs(term) > previous or abs(term) < mpmath.mpf(10) ** (-self.digits):
                    break
                previous = abs(term)
                total += term
            return complex(mpmath.sqrt(mpmath.pi / (2 * zm)) * mpmath.exp(-zm) * total)

    def k0(self, z: complex) -> complex:
        z = complex(z)
        _check_finite(z, 'oracle.k0')
        if z == 0:
            raise PoleError("K₀ 在 z = 0 有對數極點")
        if z.imag == 0 and z.real < 0:
            raise DomainError("K₀ 的引數位於分支切割上", {'z': z})
        if abs(z) >= self.domains['k0'].crossover:
            return self.k0_asymptotic(z)
        if z.real > 0:
            return self.k0_integral(z)
        return self.k0_series(z)

    def kelvin(self, x: float) -> Tuple[float, float]:
        """(ker x, kei x) = (Re, Im) K₀(x e^{iπ/4})"""
        if x < 0:
            raise DomainError("Kelvin 函數僅定義於 x ≥ 0")
        if x == 0:
            raise PoleError("ker 在原點對數發散")
        value = self.k0(x * complex(math.cos(math.pi / 4), math.sin(math.pi / 4)))
        return value.real, value.imag

    # ---------- 切換點校準 ----------

    def overlap_disagreement(self, band: Optional[Tuple[float, float]] = None,
                             samples: int = 25) -> float:
        """J₀ 級數與漸近展開在重疊區間內的最大差異"""
        band = band or self.domains['j0'].overlap_band
        points = np.linspace(band[0], band[1], samples)
        diffs = [abs(self.j0_series(x) - self.j0_asymptotic(x)) for x in points]
        return float(max(diffs))

    def calibrate_crossover(self, candidates: Sequence[float],
                            samples: int = 9) -> Tuple[float, Dict[float, float]]:
        """從候選切換點中選出重疊區間差異最小者

        Returns:
            (最佳切換點, 各候選點的最大差異)
        """
        scores = {}
        for candidate in candidates:
            scores[float(candidate)] = self.overlap_disagreement(
                (0.8 * candidate, 1.2 * candidate), samples)
        best = min(scores, key=scores.get)
        self.logger.debug(f"J₀ 切換點校準: {scores} -> {best}")
        return best, scores


def special_function_table(xs: Sequence[float]) -> Dict[str, np.ndarray]:
    """在正實數網格上計算 J₀、I₀、K₀、ker、kei(供 specfun 指令輸出)"""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= 0):
        raise DomainError("函數表網格必須為正數")
    return {
        'x': xs,
        'j0': bessel_j0(xs),
        'i0': np.real(bessel_i0(xs)),
        'k0': bessel_k0(xs),
        'ker': kelvin_ker(xs),
        'kei': kelvin_kei(xs),
    }
