# src/thermal/exporters.py

"""結果檔案匯出

CSV 以 17 位有效數字寫出，表尾附 # 開頭的中繼資料區塊；JSON 以排序鍵與
兩格縮排寫出，複數轉成 {"re", "im"}。檔名固定且不含時間戳記，相同設定與
種子產生位元組相同的檔案。
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from .exceptions import ExportError, FileError
from .models import Wavefunction, complex_to_dict
from .wavefunction import from_frame, to_frame

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def to_jsonable(value: Any) -> Any:
    """轉成 json 可序列化的結構(複數 → {re, im}，numpy → 內建型別)"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return complex_to_dict(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return value
    if hasattr(value, 'to_dict'):
        return to_jsonable(value.to_dict())
    return value


class BaseExporter:
    """匯出器基礎類別"""

    def __init__(self, output_dir: Union[str, Path], metadata: Optional[Dict[str, Any]] = None):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.metadata = dict(metadata or {})
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def export(self, data: Any, filename: str) -> Path:
        """匯出結果"""
        raise NotImplementedError


class CSVExporter(BaseExporter):
    """CSV 匯出器"""

    def export(self, data: Union[pd.DataFrame, Dict[str, Any]], filename: str,
               metadata: Optional[Dict[str, Any]] = None) -> Path:
        """匯出 CSV(表頭、資料列，再接中繼資料區塊)

        Args:
            data: DataFrame 或欄名 → 陣列
            filename: 檔名
            metadata: 額外的中繼資料(覆寫建構時給定的同名鍵)

        Returns:
            Path: 匯出檔案路徑
        """
        try:
            frame = data if isinstance(data, pd.DataFrame) else pd.DataFrame(data)
            if frame.columns.size == 0:
                raise ExportError("CSV 至少需要一個欄位")
            filepath = self.output_dir / filename
            merged = dict(self.metadata)
            merged.update(metadata or {})
            body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
            trailer = ''.join(f"# {key}: {merged[key]}\n" for key in sorted(merged))
            filepath.write_text(body + trailer, encoding='utf-8')
            self.logger.info(f"CSV 已匯出至: {filepath}")
            return filepath
        except ExportError:
            raise
        except Exception as e:
            self.logger.error(f"匯出 CSV 失敗: {e}", exc_info=True)
            raise ExportError(f"匯出 CSV 失敗: {e}")


class JSONExporter(BaseExporter):
    """JSON 匯出器"""

    def export(self, data: Dict[str, Any], filename: str) -> Path:
        """匯出 JSON；建構時的中繼資料放在 "metadata" 鍵下"""
        try:
            payload = dict(data)
            if self.metadata:
                payload.setdefault('metadata', {}).update(self.metadata)
            filepath = self.output_dir / filename
            with filepath.open('w', encoding='utf-8') as f:
                json.dump(to_jsonable(payload), f, ensure_ascii=False, sort_keys=True, indent=2)
                f.write('\n')
            self.logger.info(f"JSON 已匯出至: {filepath}")
            return filepath
        except Exception as e:
            self.logger.error(f"匯出 JSON 失敗: {e}", exc_info=True)
            raise ExportError(f"匯出 JSON 失敗: {e}")


class PlotScriptExporter(BaseExporter):
    """繪圖腳本匯出器(jinja2 範本，腳本本身使用 matplotlib)"""

    def export(self, data: Dict[str, Any], filename: str = 'plot.py') -> Path:
        from .templates import TemplateManager

        filepath = self.output_dir / filename
        TemplateManager().render_plot_script(data, filepath)
        return filepath


def create_exporter(format_type: str, output_dir: Union[str, Path],
                    metadata: Optional[Dict[str, Any]] = None) -> BaseExporter:
    """建立匯出器實例

    Args:
        format_type: 匯出格式('csv'/'json'/'plot')
        output_dir: 輸出目錄
        metadata: 中繼資料(設定雜湊、容許誤差、指令)

    Returns:
        BaseExporter: 匯出器實例
    """
    exporters = {
        'csv': CSVExporter,
        'json': JSONExporter,
        'plot': PlotScriptExporter,
    }

    exporter_class = exporters.get(format_type.lower())
    if not exporter_class:
        raise ExportError(f"不支援的匯出格式: {format_type}", {'allowed': sorted(exporters)})

    return exporter_class(output_dir, metadata)


# ---------- 讀取 ----------

def read_table(path: Union[str, Path]) -> pd.DataFrame:
    """讀取本工具箱寫出的 CSV(忽略 # 中繼資料)"""
    try:
        return pd.read_csv(path, comment='#')
    except FileNotFoundError:
        raise FileError(f"檔案不存在: {path}")
    except Exception as e:
        logger.error(f"讀取 CSV 失敗: {e}", exc_info=True)
        raise FileError(f"讀取 CSV 失敗: {path}", {'error': str(e)})


def read_metadata(path: Union[str, Path]) -> Dict[str, str]:
    """讀取 CSV 表尾的中繼資料區塊"""
    metadata = {}
    try:
        with open(path, 'r', encoding='utf-8') as f:
            for line in f:
                if line.startswith('# ') and ':' in line:
                    key, _, value = line[2:].partition(':')
                    metadata[key.strip()] = value.strip()
    except FileNotFoundError:
        raise FileError(f"檔案不存在: {path}")
    return metadata


def read_wavefunction(path: Union[str, Path]) -> Wavefunction:
    """讀取欄位 x, re, im 的波函數 CSV"""
    return from_frame(read_table(path))


def write_wavefunction(exporter: CSVExporter, psi: Wavefunction, filename: str,
                       metadata: Optional[Dict[str, Any]] = None) -> Path:
    """寫出波函數 CSV(欄位 x, re, im)"""
    return exporter.export(to_frame(psi), filename, metadata)


__all__ = [
    'to_jsonable', 'BaseExporter', 'CSVExporter', 'JSONExporter', 'PlotScriptExporter',
    'create_exporter', 'read_table', 'read_metadata', 'read_wavefunction',
    'write_wavefunction',
]
