# src/thermal/__init__.py

"""一維熱哈密頓(Luttinger)數值工具箱

此套件提供熱哈密頓 H_T 與其共軛模型 Π_θ 的數值驗證功能，
包括特殊函數、振盪積分、傳播子與預解核、譜密度、散射與古典動力學。

主要模組：
- specfun: J₀、I₀、K₀ 與 Kelvin 函數
- quadrature: 自適應、振盪與主值積分
- wavefunction: 網格、波函數與傅立葉轉換
- kernels: 積分核與主值恆等式
- operators: 酉算子、傳播子與有限差分作用
- spectral: 譜密度與 IDOS
- scattering: 波算子與 S 矩陣
- classical: 古典軌跡與守恆量
- hankel: 廣義本徵函數與本徵展開
- experiments / acceptance: CLI 指令與自我測試
"""

import logging
from typing import Optional

from .config import Config
from .exceptions import (
    AccuracyError,
    BlowUpError,
    ConfigError,
    ConvergenceError,
    CriticalTimeError,
    DomainError,
    ExportError,
    FileError,
    PoleError,
    RegimeError,
    SingularPointError,
    ThermalToolkitError,
)
from .models import (
    ClassicalConfig,
    ExperimentConfig,
    Grid,
    RunConfig,
    ScatterSpec,
    Wavefunction,
)

# 版本資訊
__version__ = "1.0.0"
__license__ = "MIT"
__description__ = "一維熱哈密頓數值工具箱"

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(log_file: Optional[str] = None,
                  log_level: str = 'INFO'):
    """設定日誌系統

    Args:
        log_file: 日誌檔案路徑(可選)
        log_level: 日誌等級(DEBUG/INFO/WARNING/ERROR/CRITICAL)
    """
    formatter = logging.Formatter(LOG_FORMAT)

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, log_level.upper()))

    # 重複呼叫時不累積 handler
    for handler in list(root_logger.handlers):
        if getattr(handler, '_thermal_handler', False):
            root_logger.removeHandler(handler)
            handler.close()

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler._thermal_handler = True
    root_logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        file_handler._thermal_handler = True
        root_logger.addHandler(file_handler)

    logger.info(f"日誌系統已初始化: level={log_level}, file={log_file}")


__all__ = [
    'Config',
    'ClassicalConfig',
    'ExperimentConfig',
    'Grid',
    'RunConfig',
    'ScatterSpec',
    'Wavefunction',
    'ThermalToolkitError',
    'DomainError',
    'PoleError',
    'SingularPointError',
    'AccuracyError',
    'ConvergenceError',
    'CriticalTimeError',
    'BlowUpError',
    'RegimeError',
    'ConfigError',
    'FileError',
    'ExportError',
    'setup_logging',
]
