# src/thermal/templates.py

import logging
from pathlib import Path
from typing import Any, Dict, Optional

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from .exceptions import ExportError

logger = logging.getLogger(__name__)

PLOT_TEMPLATE = 'plot_script.py.j2'


class TemplateManager:
    """範本管理器"""

    def __init__(self, template_dir: Optional[Path] = None):
        """初始化範本管理器

        Args:
            template_dir: 範本目錄路徑(可選)
        """
        self.template_dir = template_dir or Path(__file__).parent / 'resources' / 'templates'
        self._setup_environment()

    def _setup_environment(self):
        """設定 Jinja2 環境"""
        try:
            self.env = Environment(
                loader=FileSystemLoader(str(self.template_dir)),
                undefined=StrictUndefined,
                trim_blocks=True,
                lstrip_blocks=True,
                keep_trailing_newline=True,
            )
            self.env.filters.update({
                'py_repr': repr,
            })
            logger.debug(f"範本環境已初始化: {self.template_dir}")
        except Exception as e:
            logger.error(f"範本環境初始化失敗: {e}", exc_info=True)
            raise ExportError(f"範本環境初始化失敗: {e}")

    def render_plot_script(self, data: Dict[str, Any], output_path: Path) -> None:
        """渲染繪圖腳本

        Args:
            data: title、series(每項含 csv、x、y 與選用的 label)、
                  可選 xlabel/ylabel/logy
            output_path: 輸出檔案路徑
        """
        try:
            context = {
                'title': data.get('title', ''),
                'series': list(data.get('series', [])),
                'xlabel': data.get('xlabel', ''),
                'ylabel': data.get('ylabel', ''),
                'logy': bool(data.get('logy', False)),
                'image': data.get('image', Path(output_path).with_suffix('.png').name),
            }
            if not context['series']:
                raise ExportError("繪圖腳本至少需要一條曲線")
            for item in context['series']:
                item.setdefault('label', item['y'])

            content = self.env.get_template(PLOT_TEMPLATE).render(**context)

            output_path = Path(output_path)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            output_path.write_text(content, encoding='utf-8')
            logger.info(f"繪圖腳本已生成: {output_path}")
        except ExportError:
            raise
        except Exception as e:
            logger.error(f"繪圖腳本生成失敗: {e}", exc_info=True)
            raise ExportError(f"繪圖腳本生成失敗: {e}")
