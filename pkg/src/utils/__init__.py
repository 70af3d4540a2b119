# src/utils/__init__.py
"""執行期共用工具"""

from .logger import RunLogger

__all__ = ["RunLogger"]
