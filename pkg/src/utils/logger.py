# src/utils/logger.py

import json
import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, List, Optional


class RunLogger:
    """單次執行的日誌管理器

    於輸出目錄的 logs/ 下維護 run.log、criteria.log 與 error.log。
    """

    CHANNELS = ('run', 'criteria', 'error')

    def __init__(self, log_dir: str = "logs", console: bool = False):
        # 建立日誌目錄
        self.log_dir = Path(log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)

        self.formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )

        self.run_logger = self._setup_logger("run", console)
        self.criteria_logger = self._setup_logger("criteria", console)
        self.error_logger = self._setup_logger("error", console)

    def _setup_logger(self, name: str, console: bool) -> logging.Logger:
        """設置日誌記錄器(每個輸出目錄各自一組 handler)"""
        logger = logging.getLogger(f"thermal.run.{name}.{self.log_dir.resolve()}")
        logger.setLevel(logging.DEBUG)
        logger.propagate = False
        for handler in list(logger.handlers):
            handler.close()
            logger.removeHandler(handler)

        file_handler = RotatingFileHandler(
            self.log_dir / f"{name}.log",
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setFormatter(self.formatter)
        logger.addHandler(file_handler)

        if console:
            console_handler = logging.StreamHandler()
            console_handler.setFormatter(self.formatter)
            logger.addHandler(console_handler)

        return logger

    @staticmethod
    def _dumps(payload: Dict[str, Any]) -> str:
        return json.dumps(payload, ensure_ascii=False, sort_keys=True, default=str)

    def log_run_start(self, command: str, config_hash: str, params: Optional[Dict] = None):
        """記錄執行開始"""
        self.run_logger.info(f"開始執行 - {self._dumps({'command': command, 'config_hash': config_hash, 'params': params or {}})}")

    def log_run_finish(self, command: str, exit_code: int, outputs: Optional[List[str]] = None):
        """記錄執行結束"""
        self.run_logger.info(f"執行結束 - {self._dumps({'command': command, 'exit_code': exit_code, 'outputs': outputs or []})}")

    def log_criterion(self, result: Dict[str, Any]):
        """記錄單一驗收項目(JSON)"""
        self.criteria_logger.info(self._dumps(result))

    def log_error(self, error: str, details: Optional[Dict] = None):
        """記錄錯誤"""
        if details:
            self.error_logger.error(f"{error} - {self._dumps(details)}")
        else:
            self.error_logger.error(error)

    def log_performance(self, operation: str, duration: float):
        """記錄效能資訊"""
        self.run_logger.info(f"效能紀錄 - {self._dumps({'operation': operation, 'duration': duration})}")

    def get_criteria_history(self, limit: int = 50) -> List[Dict[str, Any]]:
        """取得最近的驗收項目記錄"""
        history = []
        log_file = self.log_dir / "criteria.log"
        if not log_file.exists():
            return history

        with open(log_file, 'r', encoding='utf-8') as f:
            for line in f.readlines()[-limit:]:
                parts = line.split(" - ", 3)
                if len(parts) < 4:
                    continue
                try:
                    history.append({'timestamp': parts[0], **json.loads(parts[3])})
                except json.JSONDecodeError:
                    continue
        return history

    def close(self):
        """關閉所有檔案 handler"""
        for logger in (self.run_logger, self.criteria_logger, self.error_logger):
            for handler in list(logger.handlers):
                handler.close()
                logger.removeHandler(handler)
