# src/thermal/models.py

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import json
import math

import numpy as np
from scipy.integrate import trapezoid

from .exceptions import ConfigError, DomainError, ShapeError

TWO_PI = 2.0 * math.pi

# 合法的 CLI 指令
COMMANDS = (
    'specfun', 'kernel', 'propagate', 'resolvent',
    'spectrum', 'scatter', 'classical', 'selftest',
)


def complex_to_dict(z: complex) -> Dict[str, float]:
    """將複數轉為 JSON 友善格式"""
    z = complex(z)
    return {'re': float(z.real), 'im': float(z.imag)}


def complex_from_dict(data: Dict[str, float]) -> complex:
    """從 {'re', 'im'} 還原複數"""
    return complex(data['re'], data['im'])


@dataclass(frozen=True)
class EvalDomain:
    """特殊函數求值區域(級數/漸近展開切換設定)"""
    crossover: float = 20.0        # 級數/漸近展開切換點
    series_terms: int = 80         # 冪級數最大項數
    target_rel_tol: float = 1e-12  # 目標相對誤差

    def validate(self):
        """驗證設定有效性"""
        if not self.crossover > 0:
            raise DomainError(f"無效的crossover: {self.crossover}")
        if self.series_terms < 1:
            raise DomainError(f"無效的series_terms: {self.series_terms}")
        if not 0 < self.target_rel_tol <= 1e-6:
            raise DomainError(f"無效的target_rel_tol: {self.target_rel_tol}")

    @property
    def overlap_band(self) -> Tuple[float, float]:
        """級數與漸近展開需一致的重疊區間"""
        return 0.8 * self.crossover, 1.2 * self.crossover

    def to_dict(self) -> Dict[str, Any]:
        return {
            'crossover': self.crossover,
            'series_terms': self.series_terms,
            'target_rel_tol': self.target_rel_tol,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EvalDomain':
        domain = cls(**data)
        domain.validate()
        return domain


@dataclass(frozen=True)
class PVWindow:
    """對稱主值視窗 I_{R,r} = [−R,−r] ∪ [r,R]"""
    R: float  # 外半徑
    r: float  # 內半徑

    def __post_init__(self):
        if not (math.isfinite(self.R) and math.isfinite(self.r)):
            raise DomainError("視窗端點必須為有限值", {'R': self.R, 'r': self.r})
        if not self.R > self.r > 0:
            raise DomainError("視窗需滿足 R > r > 0", {'R': self.R, 'r': self.r})


@dataclass
class QuadResult:
    """數值積分結果"""
    value: complex          # 積分值
    err_estimate: float     # 誤差估計
    evaluations: int        # 被積函數求值次數
    converged: bool = True  # 是否達到要求精度
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.value = complex(self.value)
        self.err_estimate = float(abs(self.err_estimate))
        self.evaluations = max(int(self.evaluations), 1)

    def __add__(self, other: 'QuadResult') -> 'QuadResult':
        return QuadResult(
            value=self.value + other.value,
            err_estimate=self.err_estimate + other.err_estimate,
            evaluations=self.evaluations + other.evaluations,
            converged=self.converged and other.converged,
        )

    def scaled(self, factor: complex) -> 'QuadResult':
        """乘上常數因子"""
        return QuadResult(
            value=self.value * factor,
            err_estimate=self.err_estimate * abs(factor),
            evaluations=self.evaluations,
            converged=self.converged,
            metadata=dict(self.metadata),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value': complex_to_dict(self.value),
            'err_estimate': self.err_estimate,
            'evaluations': self.evaluations,
            'converged': self.converged,
        }


@dataclass(frozen=True, eq=False)
class Grid:
    """實數網格與梯形積分權重"""
    points: np.ndarray                 # 嚴格遞增的網格點
    weights: np.ndarray                # 積分權重
    kind: str = 'uniform'              # uniform / log-symmetric / gauss
    center: Optional[float] = None     # log-symmetric 的聚集中心

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'weights', weights)
        self.validate()

    def validate(self):
        if self.points.ndim != 1 or self.points.size < 2:
            raise ShapeError("網格至少需要兩個點", {'size': int(self.points.size)})
        if self.weights.shape != self.points.shape:
            raise ShapeError("權重與網格點長度不一致")
        if not np.all(np.isfinite(self.points)):
            raise DomainError("網格點必須為有限值")
        if not np.all(np.diff(self.points) > 0):
            raise DomainError("網格點必須嚴格遞增")
        if not np.all(self.weights > 0):
            raise DomainError("積分權重必須為正")
        if self.kind not in ('uniform', 'log-symmetric', 'gauss'):
            raise DomainError(f"未知的網格種類: {self.kind}")

    @staticmethod
    def trapezoid_weights(points: np.ndarray) -> np.ndarray:
        """梯形法權重"""
        points = np.asarray(points, dtype=float)
        gaps = np.diff(points)
        weights = np.empty_like(points)
        weights[0] = gaps[0] / 2
        weights[-1] = gaps[-1] / 2
        weights[1:-1] = (gaps[:-1] + gaps[1:]) / 2
        return weights

    @classmethod
    def uniform(cls, a: float, b: float, n: int) -> 'Grid':
        """等距網格 [a, b]，共 n 點"""
        points = np.linspace(a, b, int(n))
        return cls(points, cls.trapezoid_weights(points), kind='uniform')

    @classmethod
    def log_symmetric(cls, center: float, inner: float, outer: float,
                      n: int) -> 'Grid':
        """以 center 為中心、距離呈幾何分布的對稱網格

        center 本身不在網格上(最內層距離為 inner)。

        Args:
            center: 聚集中心(如 x_c = −1/λ)
            inner: 最小距離
            outer: 最大距離
            n: 單側點數
        """
        if not 0 < inner < outer:
            raise DomainError("需滿足 0 < inner < outer",
                              {'inner': inner, 'outer': outer})
        distances = np.geomspace(inner, outer, int(n))
        points = np.concatenate([center - distances[::-1], center + distances])
        return cls(points, cls.trapezoid_weights(points),
                   kind='log-symmetric', center=float(center))

    @classmethod
    def gauss_legendre(cls, edges: Sequence[float], order: int = 8) -> 'Grid':
        """複合 Gauss–Legendre 節點(每個區段 [edges[i], edges[i+1]] 一組)

        節點不含區段端點，適合在跳躍點兩側分段積分。
        """
        edges = np.asarray(edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or not np.all(np.diff(edges) > 0):
            raise DomainError("區段端點必須嚴格遞增")
        nodes, weights = np.polynomial.legendre.leggauss(int(order))
        half = np.diff(edges) / 2
        mid = (edges[:-1] + edges[1:]) / 2
        points = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        return cls(points, (half[:, None] * weights[None, :]).ravel(), kind='gauss')

    @classmethod
    def from_points(cls, points: Sequence[float]) -> 'Grid':
        """由任意遞增點列建立網格(等距判斷容許捨入誤差)"""
        points = np.asarray(points, dtype=float)
        gaps = np.diff(points)
        uniform = gaps.size > 0 and np.allclose(gaps, gaps[0], rtol=1e-9, atol=0.0)
        return cls(points, cls.trapezoid_weights(points),
                   kind='uniform' if uniform else 'log-symmetric')

    @property
    def size(self) -> int:
        return int(self.points.size)

    @property
    def span(self) -> Tuple[float, float]:
        return float(self.points[0]), float(self.points[-1])

    @property
    def spacing(self) -> float:
        """等距網格間距"""
        if self.kind != 'uniform':
            raise DomainError("非等距網格沒有固定間距")
        return float(self.points[1] - self.points[0])

    def same_as(self, other: 'Grid') -> bool:
        return (self.points.shape == other.points.shape
                and np.array_equal(self.points, other.points))


@dataclass(frozen=True, eq=False)
class Wavefunction:
    """網格上的複數波函數

    source 為可精確求值的函數(若有)，重新取樣時直接求值而非內插。
    """
    grid: Grid
    values: np.ndarray
    source: Optional[Callable[[np.ndarray], np.ndarray]] = None
    singular_points: Tuple[float, ...] = ()
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'singular_points',
                           tuple(float(p) for p in self.singular_points))
        if values.shape != self.grid.points.shape:
            raise ShapeError("波函數長度與網格不一致",
                             {'values': values.shape, 'grid': self.grid.points.shape})
        if not np.all(np.isfinite(values)):
            raise DomainError("波函數包含非有限值")

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], grid: Grid,
                      singular_points: Sequence[float] = (),
                      **metadata) -> 'Wavefunction':
        """以函數在網格上取樣"""
        values = np.asarray(func(grid.points), dtype=complex)
        return cls(grid, values, source=func,
                   singular_points=tuple(singular_points), metadata=dict(metadata))

    @property
    def x(self) -> np.ndarray:
        return self.grid.points

    def with_values(self, values: np.ndarray,
                    source: Optional[Callable] = None,
                    singular_points: Sequence[float] = (),
                    **metadata) -> 'Wavefunction':
        """同網格的新波函數"""
        merged = dict(self.metadata)
        merged.update(metadata)
        return Wavefunction(self.grid, values, source=source,
                            singular_points=tuple(singular_points), metadata=merged)


@dataclass(frozen=True)
class SignConvention:
    """符號函數與 Heaviside 函數在 0 的取值"""
    sgn0: float = 0.0    # sgn(0)
    theta0: float = 0.5  # Θ(0)

    def sgn(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, 1.0, np.where(x < 0, -1.0, self.sgn0))
        return float(out) if out.ndim == 0 else out

    def heaviside(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, 1.0, np.where(x < 0, 0.0, self.theta0))
        return float(out) if out.ndim == 0 else out


# 全域慣例 sgn(0)=0, Θ(0)=1/2
SIGN = SignConvention()


@dataclass(frozen=True)
class FlowParams:
    """延伸角 θ 與時間 t"""
    theta: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.t)):
            raise DomainError("θ 與 t 必須為有限值")
        object.__setattr__(self, 'theta', math.fmod(self.theta, TWO_PI) % TWO_PI)


@dataclass(frozen=True)
class ThermalParams:
    """熱梯度強度 λ"""
    lam: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError(f"λ 必須為正: {self.lam}")

    @property
    def x_c(self) -> float:
        """臨界點 −1/λ"""
        return -1.0 / self.lam


@dataclass(frozen=True)
class KernelInfo:
    """核函數描述(奇異位置與衰減類別)"""
    name: str
    singular_locus: Tuple[str, ...]  # 例如 ('x=0', 'y=0', 'diagonal')
    decay_class: str                  # bounded / oscillatory / exponential

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'singular_locus': list(self.singular_locus),
            'decay_class': self.decay_class,
        }


@dataclass
class ConformanceReport:
    """F_α 兩種寫法與拉普拉斯積分對照報告"""
    selected_variant: str
    tol: float
    lattice: List[float]
    alphas: List[complex]
    max_errors: Dict[str, float]        # 各寫法的最大誤差
    entries: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_errors.get(self.selected_variant, math.inf) < self.tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            'selected_variant': self.selected_variant,
            'tol': self.tol,
            'passed': self.passed,
            'lattice': list(self.lattice),
            'alphas': [complex_to_dict(a) for a in self.alphas],
            'max_errors': dict(self.max_errors),
            'entries': list(self.entries),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


@dataclass
class SpectralDensity:
    """能量網格上的譜密度

    mass 為密度在 [energies[0], energies[-1]] 上的連續積分(有連續表示時提供)；
    密度在網格點上可能有可積的對數奇異性，此時梯形和不可靠。
    """
    energies: np.ndarray
    density: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)
    mass: Optional[float] = None

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        self.density = np.asarray(self.density, dtype=float)
        self.validate()

    def validate(self):
        if self.energies.shape != self.density.shape:
            raise ShapeError("能量與密度長度不一致")
        if np.any(np.diff(self.energies) <= 0):
            raise DomainError("能量必須嚴格遞增")
        if np.any(self.density < 0):
            raise DomainError("譜密度必須非負")

    def total_mass(self) -> float:
        """總質量(優先使用連續積分，否則梯形法)"""
        if self.mass is not None:
            return float(self.mass)
        return float(trapezoid(self.density, self.energies))


@dataclass
class ScatterSpec:
    """卷積位勢散射設定"""
    g_hat: Callable[[np.ndarray], np.ndarray]  # 核函數 g 的傅立葉轉換
    lam: float = 1.0                           # λ
    decay_constants: Optional[Tuple[float, float]] = None  # (ε₀, C)
    name: str = 'custom'

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError(f"λ 必須為正: {self.lam}")
        if self.decay_constants is not None:
            eps0, const = self.decay_constants
            if eps0 <= 0 or const <= 0:
                raise DomainError("衰減常數必須為正", {'decay_constants': self.decay_constants})


@dataclass
class ClassicalConfig:
    """古典熱哈密頓系統設定"""
    m: float                # 質量
    lam: float              # λ = 1/ℓ
    gamma: np.ndarray       # 場方向(單位向量)
    rho0: np.ndarray        # 初始位置 ϱ
    wp0: np.ndarray         # 初始動量 ℘

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=float)
        self.rho0 = np.asarray(self.rho0, dtype=float)
        self.wp0 = np.asarray(self.wp0, dtype=float)
        self.validate()

    def validate(self):
        if not self.m > 0:
            raise DomainError(f"質量必須為正: {self.m}")
        if not self.lam > 0:
            raise DomainError(f"λ 必須為正: {self.lam}")
        if not (self.gamma.shape == self.rho0.shape == self.wp0.shape):
            raise ShapeError("γ、ϱ、℘ 維度不一致")
        if abs(np.linalg.norm(self.gamma) - 1.0) > 1e-12:
            raise DomainError("γ 必須為單位向量", {'norm': float(np.linalg.norm(self.gamma))})

    @property
    def ell(self) -> float:
        """ℓ = 1/λ"""
        return 1.0 / self.lam

    @property
    def dimension(self) -> int:
        return int(self.gamma.size)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'm': self.m,
            'lambda': self.lam,
            'gamma': self.gamma.tolist(),
            'rho0': self.rho0.tolist(),
            'wp0': self.wp0.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ClassicalConfig':
        return cls(m=float(data['m']), lam=float(data.get('lambda', data.get('lam', 1.0))),
                   gamma=data['gamma'], rho0=data['rho0'], wp0=data['wp0'])


@dataclass
class ClassicalState:
    """相空間狀態"""
    t: float
    x: np.ndarray
    p: np.ndarray
    # 臨界時間求值時的單側旗標
    at_critical_time: bool = False

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.p = np.asarray(self.p, dtype=float)


@dataclass(frozen=True)
class ClassicalInvariants:
    """由初始資料導出的守恆量與座標分解"""
    rho0: float             # γ·ϱ
    wp0: float              # γ·℘
    wp_perp: float          # ℘_⊥ = |℘ − (γ·℘)γ|
    nu: Optional[np.ndarray]  # 正交動量方向(℘_⊥ = 0 時為 None)
    phi: float              # arctan(℘₀/℘_⊥)
    energy: float           # E₀
    amplitude: float        # A = (ℓ + ϱ₀)/cos²φ
    regime: str             # generic / 1d / exceptional

    def to_dict(self) -> Dict[str, Any]:
        return {
            'rho0': self.rho0,
            'wp0': self.wp0,
            'wp_perp': self.wp_perp,
            'nu': None if self.nu is None else self.nu.tolist(),
            'phi': self.phi,
            'energy': self.energy,
            'amplitude': self.amplitude,
            'regime': self.regime,
        }


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """超平面 {x : n·x = offset}"""
    normal: np.ndarray
    offset: float
    name: str = ''

    def distance(self, x) -> float:
        return float(np.dot(self.normal, np.asarray(x, dtype=float)) - self.offset)

    def contains(self, x, tol: float = 1e-9) -> bool:
        return abs(self.distance(x)) <= tol


@dataclass
class Trajectory:
    """離散軌跡"""
    times: np.ndarray
    xs: np.ndarray  # shape (n, d)
    ps: np.ndarray  # shape (n, d)

    def state(self, i: int) -> ClassicalState:
        return ClassicalState(float(self.times[i]), self.xs[i].copy(), self.ps[i].copy())

    def __len__(self) -> int:
        return int(self.times.size)


@dataclass(frozen=True)
class EigenFunction:
    """T 的廣義本徵函數 ψ_k 描述"""
    k: float
    support: str = ''  # 'x >= 0' / 'x <= 0' / 'all'

    def __post_init__(self):
        expected = 'x >= 0' if self.k > 0 else ('x <= 0' if self.k < 0 else 'all')
        if not self.support:
            object.__setattr__(self, 'support', expected)
        elif self.support != expected:
            raise DomainError("支撐集與 k 的符號不符", {'k': self.k, 'support': self.support})

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.support == 'x >= 0':
            return x >= 0
        if self.support == 'x <= 0':
            return x <= 0
        return np.ones_like(x, dtype=bool)


@dataclass
class ExpansionResult:
    """本徵展開結果"""
    value: complex
    head: complex
    tail: complex
    tail_bound: float  # 尾端截斷的保證上界

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value': complex_to_dict(self.value),
            'head': complex_to_dict(self.head),
            'tail': complex_to_dict(self.tail),
            'tail_bound': self.tail_bound,
        }


@dataclass
class RunConfig:
    """執行設定"""
    tol: float = 1e-6          # 數值容許誤差
    seed: int = 0              # 亂數種子
    threads: int = 1           # 內部平行數
    out_dir: str = 'results'   # 輸出目錄
    log_level: str = 'INFO'    # 日誌等級

    def to_dict(self) -> Dict[str, Any]:
        return {
            'tol': self.tol,
            'seed': self.seed,
            'threads': self.threads,
            'out_dir': self.out_dir,
            'log_level': self.log_level,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        return cls(**data)

    def validate(self):
        """驗證配置有效性"""
        if not (isinstance(self.tol, (int, float)) and 0 < self.tol < 1):
            raise ConfigError(f"無效的tol: {self.tol}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"無效的seed: {self.seed}")
        if not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigError(f"無效的threads: {self.threads}")
        if self.log_level not in {'DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'}:
            raise ConfigError(f"無效的log_level: {self.log_level}")


@dataclass
class ExperimentConfig:
    """一次 CLI 實驗的設定"""
    command: str                                   # 指令
    params: Dict[str, Any] = field(default_factory=dict)  # 指令參數
    output_path: str = 'results'                   # 輸出目錄
    seed: int = 0                                  # 亂數種子

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"未知的指令: {self.command}", {'allowed': list(COMMANDS)})
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"無效的seed: {self.seed}")
        if not isinstance(self.params, dict):
            raise ConfigError("params 必須為鍵值對")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'params': dict(self.params),
            'output_path': self.output_path,
            'seed': self.seed,
        }


@dataclass
class CriterionResult:
    """單一驗收項目結果"""
    number: int
    name: str
    passed: bool
    measurements: Dict[str, Any] = field(default_factory=dict)
    runtime: float = 0.0
    message: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return {
            'number': self.number,
            'name': self.name,
            'passed': self.passed,
            'measurements': self.measurements,
            'message': self.message,
        }


@dataclass
class AcceptanceReport:
    """自我測試報告"""
    criteria: List[CriterionResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    @property
    def failing(self) -> List[str]:
        return [f"{c.number}:{c.name}" for c in self.criteria if not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'passed': self.passed,
            'failing': self.failing,
            'criteria': [c.to_dict() for c in self.criteria],
        }


@dataclass
class ExperimentResult:
    """指令執行結果"""
    command: str
    outputs: List[str] = field(default_factory=list)  # 寫出的檔案
    passed: bool = True                                # 數值判定是否通過
    failing: List[str] = field(default_factory=list)  # 未通過的項目
    summary: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'outputs': list(self.outputs),
            'passed': self.passed,
            'failing': list(self.failing),
            'summary': dict(self.summary),
        }
