# src/thermal/exceptions.py

from typing import Any, Optional


class ThermalToolkitError(Exception):
    """熱哈密頓工具箱異常基礎類別"""

    def __init__(self, message: str = None, details: dict = None):
        self.message = message or "熱哈密頓工具箱錯誤"
        self.details = details or {}
        super().__init__(self.message)

    def __str__(self):
        if self.details:
            return f"{self.message} - 詳細資訊: {self.details}"
        return self.message


class DomainError(ThermalToolkitError):
    """定義域錯誤(非有限輸入、分支切割、實數譜參數、無效區間)"""

    def __init__(self, message: str = None, details: dict = None):
        super().__init__(message or "輸入超出定義域", details)


class PoleError(ThermalToolkitError):
    """極點錯誤(ker(0)、K₀(0)、臨界點上的 κ₁ 等)"""

    def __init__(self, message: str = None, details: dict = None):
        super().__init__(message or "在極點上求值", details)


class SingularPointError(ThermalToolkitError):
    """奇異點錯誤(核函數在 x=0 或 y=0 上不可求值)"""

    def __init__(self, message: str = None, details: dict = None):
        super().__init__(message or "在奇異點上求值", details)


class ShapeError(ThermalToolkitError):
    """網格不一致錯誤"""

    def __init__(self, message: str = None, details: dict = None):
        super().__init__(message or "網格不一致", details)


class AccuracyError(ThermalToolkitError):
    """數值精度錯誤

    Attributes:
        best_estimate: 失敗前的最佳估計值
    """

    def __init__(self, message: str = None, details: dict = None,
                 best_estimate: Any = None):
        super().__init__(message or "數值積分未達到要求精度", details)
        self.best_estimate = best_estimate


class ConvergenceError(AccuracyError):
    """極限序列未穩定"""

    def __init__(self, message: str = None, details: dict = None,
                 best_estimate: Any = None):
        super().__init__(message or "極限序列未收斂", details, best_estimate)


class CriticalTimeError(ThermalToolkitError):
    """在臨界時間上求動量(tan 的極點)"""

    def __init__(self, message: str = None, details: dict = None,
                 side_limits: Optional[tuple] = None):
        super().__init__(message or "求值時間為臨界時間", details)
        # 左右單側極限 (t→t_c⁻, t→t_c⁺)
        self.side_limits = side_limits


class BlowUpError(ThermalToolkitError):
    """數值積分發散(接近臨界時間)"""

    def __init__(self, message: str = None, details: dict = None,
                 last_state: Any = None):
        super().__init__(message or "軌跡發散", details)
        self.last_state = last_state


class RegimeError(ThermalToolkitError):
    """一維區間(℘_⊥ = 0)下不存在的量"""

    def __init__(self, message: str = None, details: dict = None):
        super().__init__(message or "一維區間下無定義", details)


class ChartExitError(ThermalToolkitError):
    """拉格朗日座標離開有效範圍"""

    def __init__(self, message: str = None, details: dict = None):
        super().__init__(message or "離開座標圖", details)


class ConfigError(ThermalToolkitError):
    """配置錯誤"""

    def __init__(self, message: str = None, details: dict = None):
        super().__init__(message or "配置錯誤", details)


class FileError(ThermalToolkitError):
    """檔案操作錯誤"""

    def __init__(self, message: str = None, details: dict = None):
        super().__init__(message or "檔案操作失敗", details)


class ExportError(ThermalToolkitError):
    """匯出錯誤"""

    def __init__(self, message: str = None, details: dict = None):
        super().__init__(message or "匯出失敗", details)


# 異常代碼定義
ERROR_CODES = {
    # 輸入/定義域錯誤 (1000-1999)
    1001: "非有限輸入",
    1002: "參數位於分支切割上",
    1003: "譜參數為實數",
    1004: "無效的積分區間",
    1005: "在極點上求值",
    1006: "在奇異點上求值",
    1007: "網格不一致",

    # 數值精度錯誤 (2000-2999)
    2001: "自適應積分未收斂",
    2002: "主值極限未穩定",
    2003: "尾端誤差無法保證",
    2004: "波算子未通過柯西檢驗",
    2005: "網格解析度不足",

    # 動力學錯誤 (3000-3999)
    3001: "臨界時間求值",
    3002: "軌跡發散",
    3003: "一維區間下無定義",
    3004: "離開拉格朗日座標圖",

    # 檔案錯誤 (4000-4999)
    4001: "檔案不存在",
    4002: "檔案讀取失敗",
    4003: "檔案寫入失敗",
    4004: "檔案格式錯誤",

    # 配置/系統錯誤 (5000-5999)
    5001: "配置驗證失敗",
    5002: "未知的指令",
    5003: "未知的預設組",
}


def get_error_message(code: int) -> str:
    """取得錯誤代碼對應的訊息"""
    return ERROR_CODES.get(code, "未知錯誤")


def create_error(code: int, **kwargs) -> ThermalToolkitError:
    """建立對應的異常物件

    Args:
        code: 錯誤代碼
        **kwargs: 額外的錯誤資訊

    Returns:
        ThermalToolkitError: 異常物件
    """
    message = get_error_message(code)

    if code == 1005:
        return PoleError(message, kwargs)
    elif code == 1006:
        return SingularPointError(message, kwargs)
    elif code == 1007:
        return ShapeError(message, kwargs)
    elif 1000 <= code < 2000:
        return DomainError(message, kwargs)
    elif code in (2002, 2004):
        return ConvergenceError(message, kwargs)
    elif 2000 <= code < 3000:
        return AccuracyError(message, kwargs)
    elif code == 3001:
        return CriticalTimeError(message, kwargs)
    elif code == 3002:
        return BlowUpError(message, kwargs)
    elif code == 3003:
        return RegimeError(message, kwargs)
    elif code == 3004:
        return ChartExitError(message, kwargs)
    elif 4000 <= code < 5000:
        return FileError(message, kwargs)
    elif 5000 <= code < 6000:
        return ConfigError(message, kwargs)
    else:
        return ThermalToolkitError(message, kwargs)
