# src/thermal/config/__init__.py

"""配置管理

預設值來自 default_config.yaml，使用者檔案(YAML 或 JSON)與命令列旗標依序覆寫。
"""

import copy
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from ..exceptions import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent / 'default_config.yaml'


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """遞迴合併字典(override 優先)"""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class Config:
    """工具箱配置"""

    def __init__(self, data: Optional[Dict[str, Any]] = None):
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self._data = self._load_yaml(DEFAULT_CONFIG_PATH)
        if data:
            self._data = deep_merge(self._data, data)

    @staticmethod
    def _load_yaml(path: Path) -> Dict[str, Any]:
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f) or {}
        except FileNotFoundError:
            raise ConfigError(f"找不到配置檔: {path}")
        except yaml.YAMLError as e:
            raise ConfigError(f"配置檔格式錯誤: {path}", {'error': str(e)})
        if not isinstance(data, dict):
            raise ConfigError(f"配置檔頂層必須為對照表: {path}")
        return data

    @classmethod
    def from_file(cls, path: Optional[str] = None,
                  overrides: Optional[Dict[str, Any]] = None) -> 'Config':
        """載入使用者配置檔並套用覆寫值

        Args:
            path: YAML 或 JSON 檔案路徑(可選)
            overrides: 以點號鍵表示的覆寫值，例如 {'quadrature.tol': 1e-8}

        Returns:
            Config: 合併後的配置
        """
        config = cls()
        if path:
            config.merge(cls._load_yaml(Path(path)))
            config.logger.info(f"已載入配置檔: {path}")
        for key, value in (overrides or {}).items():
            if value is not None:
                config.set(key, value)
        return config

    def merge(self, data: Dict[str, Any]):
        self._data = deep_merge(self._data, data)

    def get(self, key: str, default: Any = None) -> Any:
        """以點號鍵讀取設定值"""
        node: Any = self._data
        for part in key.split('.'):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return copy.deepcopy(node)

    def require(self, key: str) -> Any:
        value = self.get(key)
        if value is None:
            raise ConfigError(f"缺少必要設定: {key}")
        return value

    def set(self, key: str, value: Any):
        """以點號鍵寫入設定值"""
        parts = key.split('.')
        node = self._data
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"設定鍵衝突: {key}")
            node = child
        node[parts[-1]] = value

    def as_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self._data)

    def digest(self) -> str:
        """合併後配置的 SHA-256(正規化 JSON)"""
        canonical = json.dumps(self._data, sort_keys=True, separators=(',', ':'),
                               default=str)
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


__all__ = ['Config', 'DEFAULT_CONFIG_PATH', 'deep_merge']
