# src/thermal/classical.py

"""古典熱哈密頓系統 H = (1 + λγ·x)·p²/(2m)

沿 γ 的座標 x₀ = γ·x 與正交平面分開處理：正交動量 ℘_⊥ν 守恆，
p₀ 滿足 Riccati 方程式 ṗ₀ = −λ(p₀² + ℘_⊥²)/(2m)。三個區間：
    generic      ℘_⊥ ≠ 0，p₀ = ℘_⊥ tan(φ − ωt)，週期性通過臨界平面
    1d           ℘_⊥ = 0、℘₀ ≠ 0，單次通過臨界時間 t_c = −2mℓ/℘₀
    exceptional  ℘ = 0，靜止解
"""

import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .exceptions import (BlowUpError, ChartExitError, CriticalTimeError, DomainError,
                         PoleError, RegimeError)
from .models import ClassicalConfig, ClassicalInvariants, ClassicalState, Hyperplane, Trajectory

logger = logging.getLogger(__name__)

# 動量發散判定門檻
BLOWUP_MOMENTUM = 1e8
# ℘_⊥/|℘| 低於此值視為一維區間
REGIME_TOL = 1e-14
# |cos(φ − ωt)| 或 1 + ℘t/(2mℓ) 低於此值視為臨界時間
CRITICAL_TOL = 1e-12
# 臨界平面判定
PLANE_TOL = 1e-15


# ---------- 座標分解 ----------

def orthonormal_completion(gamma: Sequence[float]) -> np.ndarray:
    """以 γ 為第一列的正交矩陣(由標準基底依序做 Gram–Schmidt，結果確定)"""
    gamma = np.asarray(gamma, dtype=float)
    if abs(np.linalg.norm(gamma) - 1.0) > 1e-12:
        raise DomainError("γ 必須為單位向量")
    basis = [gamma]
    for e in np.eye(gamma.size):
        v = e - sum(np.dot(e, b) * b for b in basis)
        length = np.linalg.norm(v)
        if length > 1e-8:
            basis.append(v / length)
        if len(basis) == gamma.size:
            break
    return np.array(basis)


def decompose(cfg: ClassicalConfig) -> ClassicalInvariants:
    """ϱ₀、℘₀、℘_⊥、ν、φ、E₀、A 與所屬區間"""
    rho0 = float(np.dot(cfg.gamma, cfg.rho0))
    wp0 = float(np.dot(cfg.gamma, cfg.wp0))
    perp = cfg.wp0 - wp0 * cfg.gamma
    wp_perp = float(np.linalg.norm(perp))
    speed = float(np.linalg.norm(cfg.wp0))
    energy = (1.0 + cfg.lam * rho0) * speed ** 2 / (2.0 * cfg.m)

    if speed == 0:
        regime = 'exceptional'
    elif wp_perp <= REGIME_TOL * speed:
        regime = '1d'
    else:
        regime = 'generic'

    if regime == 'generic':
        nu = perp / wp_perp
        phi = math.atan(wp0 / wp_perp)
        amplitude = (cfg.ell + rho0) / math.cos(phi) ** 2
    else:
        nu, wp_perp = None, 0.0
        phi = math.copysign(math.pi / 2, wp0) if wp0 else 0.0
        amplitude = math.nan
    return ClassicalInvariants(rho0, wp0, wp_perp, nu, phi, energy, amplitude, regime)


def _omega(cfg: ClassicalConfig, inv: ClassicalInvariants) -> float:
    return cfg.lam * inv.wp_perp / (2.0 * cfg.m)


# ---------- 守恆量與運動方程式 ----------

def energy(cfg: ClassicalConfig, state: ClassicalState) -> float:
    """E = (1 + λγ·x)·p²/(2m)"""
    return float((1.0 + cfg.lam * np.dot(cfg.gamma, state.x)) * np.dot(state.p, state.p)
                 / (2.0 * cfg.m))


def transverse_momentum(cfg: ClassicalConfig, state: ClassicalState) -> float:
    """℘_⊥ = |p − (γ·p)γ|"""
    p = np.asarray(state.p, dtype=float)
    return float(np.linalg.norm(p - np.dot(cfg.gamma, p) * cfg.gamma))


def hamilton_rhs(cfg: ClassicalConfig, state: ClassicalState) -> Tuple[np.ndarray, np.ndarray]:
    """ẋ = (1 + λγ·x)p/m，ṗ = −λ(p²/2m)γ"""
    factor = 1.0 + cfg.lam * np.dot(cfg.gamma, state.x)
    xdot = factor * state.p / cfg.m
    pdot = -cfg.lam * np.dot(state.p, state.p) / (2.0 * cfg.m) * cfg.gamma
    return xdot, pdot


def position_dependent_mass(cfg: ClassicalConfig, x) -> float:
    """m_T(x) = m/(1 + λγ·x)

    Raises:
        PoleError: x 位於臨界平面
    """
    factor = 1.0 + cfg.lam * float(np.dot(cfg.gamma, np.asarray(x, dtype=float)))
    if abs(factor) <= PLANE_TOL:
        raise PoleError("m_T 在臨界平面上發散", {'gamma_x': float(np.dot(cfg.gamma, x))})
    return cfg.m / factor


def momentum_from_velocity(cfg: ClassicalConfig, x, xdot) -> np.ndarray:
    """p = m_T(x)·ẋ"""
    return position_dependent_mass(cfg, x) * np.asarray(xdot, dtype=float)


def lagrangian(cfg: ClassicalConfig, x, xdot) -> float:
    """L = m_T(x)·ẋ²/2"""
    xdot = np.asarray(xdot, dtype=float)
    return 0.5 * position_dependent_mass(cfg, x) * float(np.dot(xdot, xdot))


def thermal_force(cfg: ClassicalConfig, x, xdot) -> np.ndarray:
    """F_T = m_T(x)[(γ·ẋ)ẋ − (ẋ²/2)γ]"""
    xdot = np.asarray(xdot, dtype=float)
    m_t = position_dependent_mass(cfg, x)
    return m_t * (np.dot(cfg.gamma, xdot) * xdot - 0.5 * np.dot(xdot, xdot) * cfg.gamma)


def newton_acceleration(cfg: ClassicalConfig, x, xdot) -> np.ndarray:
    """m ẍ = λF_T"""
    return cfg.lam * thermal_force(cfg, x, xdot) / cfg.m


def force_decomposition(cfg: ClassicalConfig, x, p) -> Tuple[np.ndarray, np.ndarray]:
    """F_T = −∇T + R_T

    Returns:
        (梯度項 −(1 + λγ·x)(p²/2m)γ, 反作用項 (γ·ẋ)p)
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    factor = 1.0 + cfg.lam * np.dot(cfg.gamma, x)
    gradient = -factor * np.dot(p, p) / (2.0 * cfg.m) * cfg.gamma
    xdot = factor * p / cfg.m
    reacting = np.dot(cfg.gamma, xdot) * p
    return gradient, reacting


def force_components(cfg: ClassicalConfig, state: ClassicalState) -> Tuple[float, float]:
    """以守恆量表示的 (F_{T,0}, F_{T,⊥})

    F_{T,0} = E₀ − (1 + λx₀)℘_⊥²/m，F_{T,⊥} = (1 + λx₀)p₀℘_⊥/m。
    """
    inv = decompose(cfg)
    factor = 1.0 + cfg.lam * float(np.dot(cfg.gamma, state.x))
    p0 = float(np.dot(cfg.gamma, state.p))
    along = inv.energy - factor * inv.wp_perp ** 2 / cfg.m
    across = factor * p0 * inv.wp_perp / cfg.m
    return along, across


def force_consistency_report(cfg: ClassicalConfig, state: ClassicalState) -> Dict[str, float]:
    """比較 F_T 的直接計算、守恆量寫法與 E₀/2 寫法

    直接計算的 F_T 為定義；E₀/2 寫法僅在 ℘_⊥ 與 p₀ 特殊組合時才一致。
    """
    xdot, _ = hamilton_rhs(cfg, state)
    direct = thermal_force(cfg, state.x, xdot)
    inv = decompose(cfg)
    factor = 1.0 + cfg.lam * float(np.dot(cfg.gamma, state.x))
    along, across = force_components(cfg, state)
    printed = inv.energy / 2.0 - factor * inv.wp_perp ** 2 / cfg.m
    direct_along = float(np.dot(cfg.gamma, direct))
    direct_across = float(np.linalg.norm(direct - direct_along * cfg.gamma))
    report = {
        'direct_along': direct_along,
        'direct_across': direct_across,
        'invariant_along': along,
        'invariant_across': abs(across),
        'printed_along': printed,
        'invariant_discrepancy': abs(direct_along - along),
        'printed_discrepancy': abs(direct_along - printed),
    }
    if report['printed_discrepancy'] > 1e-10 * max(1.0, abs(direct_along)):
        logger.warning(f"F_T,0 的 E₀/2 寫法與定義不一致: Δ = {report['printed_discrepancy']:.3e}")
    return report


# ---------- 封閉解 ----------

def _assemble(cfg: ClassicalConfig, inv: ClassicalInvariants, t: float, x0: float,
              shift_perp: float, p0: float, at_critical: bool = False) -> ClassicalState:
    x = cfg.rho0 + (x0 - inv.rho0) * cfg.gamma
    p = cfg.wp0 - inv.wp0 * cfg.gamma
    if inv.nu is not None:
        x = x + shift_perp * inv.nu
    if math.isinf(p0):
        along = np.zeros_like(p)
        mask = cfg.gamma != 0
        along[mask] = np.copysign(np.inf, p0 * cfg.gamma[mask])
        p = p + along
    else:
        p = p + p0 * cfg.gamma
    return ClassicalState(float(t), x, p, at_critical_time=at_critical)


def _generic_position(cfg: ClassicalConfig, inv: ClassicalInvariants, t: float):
    omega = _omega(cfg, inv)
    u = inv.phi - omega * t
    x0 = inv.rho0 + inv.amplitude * (math.cos(u) ** 2 - math.cos(inv.phi) ** 2)
    shift = (cfg.lam * inv.wp_perp * inv.amplitude * t / (2.0 * cfg.m)
             - 0.5 * inv.amplitude * (math.sin(2 * u) - math.sin(2 * inv.phi)))
    return u, x0, shift


def closed_form_position(cfg: ClassicalConfig, t: float) -> np.ndarray:
    """封閉解的位置(臨界時間上亦有限)"""
    inv = decompose(cfg)
    if inv.regime == 'generic':
        _, x0, shift = _generic_position(cfg, inv, t)
        return _assemble(cfg, inv, t, x0, shift, 0.0).x
    if inv.regime == '1d':
        ell = cfg.ell
        x0 = (ell + inv.rho0) / ell ** 2 * (inv.wp0 * t / (2.0 * cfg.m) + ell) ** 2 - ell
        return _assemble(cfg, inv, t, x0, 0.0, 0.0).x
    return cfg.rho0.copy()


def closed_form_trajectory(cfg: ClassicalConfig, t: float) -> ClassicalState:
    """三個區間的封閉解

    Raises:
        CriticalTimeError: t 為動量的極點；side_limits 帶有左右單側極限狀態
    """
    if not math.isfinite(t):
        raise DomainError("時間必須為有限值", {'t': t})
    inv = decompose(cfg)

    if inv.regime == 'exceptional':
        return ClassicalState(float(t), cfg.rho0.copy(), cfg.wp0.copy())

    if inv.regime == '1d':
        ell = cfg.ell
        scale = 1.0 + inv.wp0 * t / (2.0 * cfg.m * ell)
        x0 = (ell + inv.rho0) * scale ** 2 - ell
        if abs(scale) <= CRITICAL_TOL:
            # ṗ₀ ≤ 0：由左側趨於 −∞，自右側由 +∞ 回來
            limits = (_assemble(cfg, inv, t, x0, 0.0, -math.inf, True),
                      _assemble(cfg, inv, t, x0, 0.0, math.inf, True))
            raise CriticalTimeError("一維解在臨界時間求動量", {'t': t, 't_c': critical_times(cfg)[0]},
                                    side_limits=limits)
        return _assemble(cfg, inv, t, x0, 0.0, inv.wp0 / scale)

    u, x0, shift = _generic_position(cfg, inv, t)
    if abs(math.cos(u)) <= CRITICAL_TOL:
        limits = (_assemble(cfg, inv, t, x0, shift, -math.inf, True),
                  _assemble(cfg, inv, t, x0, shift, math.inf, True))
        raise CriticalTimeError("在臨界時間求動量", {'t': t}, side_limits=limits)
    return _assemble(cfg, inv, t, x0, shift, inv.wp_perp * math.tan(u))


def orthogonal_2d_trajectory(cfg: ClassicalConfig, t: float) -> ClassicalState:
    """二維且 ℘₀ = 0(初始動量與 γ 正交)的簡化解

    x₀ = ϱ₀ − (ℓ + ϱ₀)sin²(ωt)，x₁ = ϱ₁ + λ℘_⊥(ℓ + ϱ₀)t/(2m) + ((ℓ + ϱ₀)/2)sin(2ωt)，
    p₀ = −℘_⊥ tan(ωt)，沿 ν 座標量測。
    """
    if cfg.dimension != 2:
        raise DomainError("僅適用於二維設定", {'dimension': cfg.dimension})
    inv = decompose(cfg)
    if inv.regime != 'generic' or inv.wp0 != 0:
        raise RegimeError("需要 ℘₀ = 0 且 ℘_⊥ ≠ 0", {'wp0': inv.wp0, 'wp_perp': inv.wp_perp})
    omega = _omega(cfg, inv)
    reach = cfg.ell + inv.rho0
    x0 = inv.rho0 - reach * math.sin(omega * t) ** 2
    shift = cfg.lam * inv.wp_perp * reach * t / (2.0 * cfg.m) + 0.5 * reach * math.sin(2 * omega * t)
    if abs(math.cos(omega * t)) <= CRITICAL_TOL:
        raise CriticalTimeError("在臨界時間求動量", {'t': t})
    return _assemble(cfg, inv, t, x0, shift, -inv.wp_perp * math.tan(omega * t))


def x0_from_momentum(cfg: ClassicalConfig, p0: float) -> float:
    """由能量守恆以 p₀ 求 γ·x：((℘₀² + ℘_⊥²)/(p₀² + ℘_⊥²))(ℓ + ϱ₀) − ℓ"""
    inv = decompose(cfg)
    denominator = p0 ** 2 + inv.wp_perp ** 2
    if denominator == 0:
        raise RegimeError("p₀ = ℘_⊥ = 0 時位置無法由動量決定")
    return (inv.wp0 ** 2 + inv.wp_perp ** 2) / denominator * (cfg.ell + inv.rho0) - cfg.ell


# ---------- 臨界與極值平面 ----------

def critical_plane(cfg: ClassicalConfig) -> Hyperplane:
    """Ξ_c: γ·x = −ℓ"""
    return Hyperplane(cfg.gamma.copy(), -cfg.ell, 'critical')


def planes(cfg: ClassicalConfig) -> Tuple[Hyperplane, Hyperplane]:
    """(Ξ_c, Ξ_e)，Ξ_e: γ·x = ϱ₀ + (℘₀/℘_⊥)²(ℓ + ϱ₀)

    Raises:
        RegimeError: ℘_⊥ = 0
    """
    inv = decompose(cfg)
    if inv.regime != 'generic':
        raise RegimeError("℘_⊥ = 0 時沒有極值平面", {'regime': inv.regime})
    offset = inv.rho0 + (inv.wp0 / inv.wp_perp) ** 2 * (cfg.ell + inv.rho0)
    return critical_plane(cfg), Hyperplane(cfg.gamma.copy(), offset, 'extremal')


def critical_times(cfg: ClassicalConfig) -> Tuple[float, float]:
    """(t_c, T)

    generic: t_c = (2φ − π)ℓm/℘_⊥，T = 2πℓm/℘_⊥；
    1d: t_c = −2mℓ/℘₀，T = ∞(只通過一次)。

    Raises:
        RegimeError: 靜止解沒有臨界時間
    """
    inv = decompose(cfg)
    if inv.regime == 'exceptional':
        raise RegimeError("靜止解沒有臨界時間")
    if inv.regime == '1d':
        return -2.0 * cfg.m * cfg.ell / inv.wp0, math.inf
    scale = cfg.ell * cfg.m / inv.wp_perp
    return (2.0 * inv.phi - math.pi) * scale, 2.0 * math.pi * scale


def extremal_times(cfg: ClassicalConfig) -> float:
    """t_e = 2φℓm/℘_⊥

    Raises:
        RegimeError: ℘_⊥ = 0
    """
    inv = decompose(cfg)
    if inv.regime != 'generic':
        raise RegimeError("℘_⊥ = 0 時沒有極值時間", {'regime': inv.regime})
    return 2.0 * inv.phi * cfg.ell * cfg.m / inv.wp_perp


def critical_times_in(cfg: ClassicalConfig, start: float, end: float) -> np.ndarray:
    """[start, end] 內的全部臨界時間"""
    try:
        t_c, period = critical_times(cfg)
    except RegimeError:
        return np.empty(0)
    if math.isinf(period):
        return np.array([t_c]) if start <= t_c <= end else np.empty(0)
    first = math.ceil((start - t_c) / period)
    last = math.floor((end - t_c) / period)
    return t_c + period * np.arange(first, last + 1)


# ---------- 拉格朗日座標 ----------

def lagrangian_q_solution(cfg: ClassicalConfig, t: float) -> Tuple[float, float]:
    """一維區間的拉格朗日座標 q，x = e^{λq} − ℓ

    q(t) = q₀ + (2/λ)log(1 + q̇₀λt/2)，q̇(t) = q̇₀/(1 + q̇₀λt/2)，
    q₀ = log(ϱ₀ + ℓ)/λ，q̇₀ = ℘₀/m。

    Raises:
        RegimeError: 非一維區間
        ChartExitError: ϱ₀ ≤ −ℓ 或 log 的引數 ≤ 0
    """
    inv = decompose(cfg)
    if inv.regime == 'generic':
        raise RegimeError("拉格朗日座標解僅適用於 ℘_⊥ = 0", {'wp_perp': inv.wp_perp})
    if not inv.rho0 + cfg.ell > 0:
        raise ChartExitError("初始位置不在座標圖 x > −ℓ 內", {'rho0': inv.rho0})
    q0 = math.log(inv.rho0 + cfg.ell) / cfg.lam
    qdot0 = inv.wp0 / cfg.m
    argument = 1.0 + qdot0 * cfg.lam * t / 2.0
    if not argument > 0:
        raise ChartExitError("軌跡離開拉格朗日座標圖", {'t': t, 'argument': argument})
    return q0 + 2.0 / cfg.lam * math.log(argument), qdot0 / argument


def position_from_q(cfg: ClassicalConfig, q: float) -> float:
    """x(q) = e^{λq} − ℓ"""
    return math.exp(cfg.lam * q) - cfg.ell


# ---------- 數值積分 ----------

def integrate_rk4(cfg: ClassicalConfig, state0: ClassicalState, t_end: float, dt: float,
                  blowup: float = BLOWUP_MOMENTUM) -> Trajectory:
    """固定步長四階 Runge–Kutta

    Args:
        cfg: 系統設定
        state0: 初始狀態(時間 state0.t)
        t_end: 終止時間
        dt: 步長(> 0，最後一步縮短以落在 t_end)
        blowup: 動量發散門檻

    Raises:
        BlowUpError: |p| 超過門檻或出現非有限值，附最後有效狀態
    """
    if not dt > 0:
        raise DomainError("步長必須為正", {'dt': dt})
    span = t_end - state0.t
    steps = max(1, int(math.ceil(abs(span) / dt - 1e-9)))
    h = span / steps

    def rhs(y: np.ndarray) -> np.ndarray:
        d = y.size // 2
        x, p = y[:d], y[d:]
        factor = 1.0 + cfg.lam * np.dot(cfg.gamma, x)
        return np.concatenate([factor * p / cfg.m,
                               -cfg.lam * np.dot(p, p) / (2.0 * cfg.m) * cfg.gamma])

    d = cfg.dimension
    times = state0.t + h * np.arange(steps + 1)
    ys = np.empty((steps + 1, 2 * d))
    ys[0] = np.concatenate([state0.x, state0.p])
    for n in range(steps):
        y = ys[n]
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        ys[n + 1] = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(ys[n + 1])) or np.linalg.norm(ys[n + 1][d:]) > blowup:
            last = ClassicalState(float(times[n]), ys[n][:d].copy(), ys[n][d:].copy())
            logger.warning(f"RK4 軌跡在 t = {times[n]:.6g} 發散")
            raise BlowUpError("軌跡接近臨界時間而發散", {'t': float(times[n]), 'step': n},
                              last_state=last)
    return Trajectory(times, ys[:, :d].copy(), ys[:, d:].copy())


def sample_closed_form(cfg: ClassicalConfig, times: Sequence[float]) -> Trajectory:
    """在給定時間上取樣封閉解；臨界時間取左側極限並以能量 E₀ 代表"""
    times = np.asarray(times, dtype=float)
    xs = np.empty((times.size, cfg.dimension))
    ps = np.empty((times.size, cfg.dimension))
    for i, t in enumerate(times):
        try:
            state = closed_form_trajectory(cfg, float(t))
        except CriticalTimeError as e:
            state = e.side_limits[0]
        xs[i] = state.x
        ps[i] = state.p
    return Trajectory(times, xs, ps)


def trajectory_columns(cfg: ClassicalConfig, trajectory: Trajectory) -> Dict[str, np.ndarray]:
    """軌跡 CSV 欄位 t, x0..x{d−1}, p0..p{d−1}, E, p_perp"""
    inv = decompose(cfg)
    columns: Dict[str, np.ndarray] = {'t': trajectory.times}
    for j in range(cfg.dimension):
        columns[f'x{j}'] = trajectory.xs[:, j]
    for j in range(cfg.dimension):
        columns[f'p{j}'] = trajectory.ps[:, j]
    energies, transverse = [], []
    for i in range(len(trajectory)):
        state = trajectory.state(i)
        if np.all(np.isfinite(state.p)):
            energies.append(energy(cfg, state))
            transverse.append(transverse_momentum(cfg, state))
        else:
            energies.append(inv.energy)
            transverse.append(inv.wp_perp)
    columns['E'] = np.array(energies)
    columns['p_perp'] = np.array(transverse)
    return columns


def invariant_drift(cfg: ClassicalConfig, trajectory: Trajectory) -> Dict[str, float]:
    """沿軌跡的 |E − E₀|/|E₀|、℘_⊥ 漂移與最小 γ·x"""
    inv = decompose(cfg)
    energies = np.array([energy(cfg, trajectory.state(i)) for i in range(len(trajectory))])
    transverse = np.array([transverse_momentum(cfg, trajectory.state(i))
                           for i in range(len(trajectory))])
    scale = abs(inv.energy) if inv.energy != 0 else 1.0
    return {
        'energy_drift': float(np.max(np.abs(energies - inv.energy)) / scale),
        'p_perp_drift': float(np.max(np.abs(transverse - inv.wp_perp))),
        'min_gamma_x': float(np.min(trajectory.xs @ cfg.gamma)),
    }


def planarity_error(cfg: ClassicalConfig, trajectory: Trajectory) -> float:
    """軌跡偏離 ϱ + span{γ, ν} 的最大距離"""
    inv = decompose(cfg)
    offsets = trajectory.xs - cfg.rho0
    residual = offsets - np.outer(offsets @ cfg.gamma, cfg.gamma)
    if inv.nu is not None:
        residual = residual - np.outer(residual @ inv.nu, inv.nu)
    return float(np.max(np.linalg.norm(residual, axis=1)))


# ---------- 預設情境 ----------

PRESETS: Dict[str, Dict[str, list]] = {
    'generic': {'m': 1.0, 'lambda': 1.0, 'gamma': [1.0, 0.0, 0.0],
                'rho0': [0.5, 0.2, 0.0], 'wp0': [0.3, 1.0, 0.2]},
    '1d': {'m': 1.0, 'lambda': 1.0, 'gamma': [1.0, 0.0, 0.0],
           'rho0': [0.5, 0.0, 0.0], 'wp0': [-1.0, 0.0, 0.0]},
    'orthogonal2d': {'m': 1.0, 'lambda': 1.0, 'gamma': [1.0, 0.0],
                     'rho0': [0.5, 0.0], 'wp0': [0.0, 1.0]},
    'exceptional': {'m': 1.0, 'lambda': 1.0, 'gamma': [1.0, 0.0, 0.0],
                    'rho0': [0.5, 0.0, 0.0], 'wp0': [0.0, 0.0, 0.0]},
}


def preset_config(name: str, dimension: Optional[int] = None) -> ClassicalConfig:
    """預設情境設定(可選擇截斷或補零到指定維度)"""
    if name not in PRESETS:
        raise DomainError(f"未知的古典預設: {name}", {'allowed': sorted(PRESETS)})
    data = dict(PRESETS[name])
    if dimension is not None and dimension != len(data['gamma']):
        if dimension < 2 and name != '1d':
            raise DomainError("此預設至少需要二維", {'preset': name})
        for key in ('gamma', 'rho0', 'wp0'):
            values = list(data[key])[:dimension]
            data[key] = values + [0.0] * (dimension - len(values))
    return ClassicalConfig.from_dict(data)


__all__ = [
    'orthonormal_completion', 'decompose', 'energy', 'transverse_momentum', 'hamilton_rhs',
    'position_dependent_mass', 'momentum_from_velocity', 'lagrangian', 'thermal_force',
    'newton_acceleration', 'force_decomposition', 'force_components',
    'force_consistency_report', 'closed_form_position', 'closed_form_trajectory',
    'orthogonal_2d_trajectory', 'x0_from_momentum', 'critical_plane', 'planes',
    'critical_times', 'extremal_times', 'critical_times_in', 'lagrangian_q_solution',
    'position_from_q', 'integrate_rk4', 'sample_closed_form', 'trajectory_columns',
    'invariant_drift', 'planarity_error', 'PRESETS', 'preset_config',
]
