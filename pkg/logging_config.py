"""
tritur 로깅 설정

라이브러리 코드는 print() 대신 tritur.<모듈> 로거만 씁니다.
stdout 은 명령 결과 전용이라 로그는 항상 stderr(또는 회전 파일)로 갑니다.

사용법:
    from logging_config import setup_logging, get_logger
    setup_logging(level="INFO", log_format="json", command="analyze")
    get_logger("boosters").info("부스터 %d개", count, extra={"graph": "g.tri"})
"""

import json
import logging
import logging.handlers
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional


ROOT_LOGGER = "tritur"

# extra= 로 넘기면 JSON 출력에 그대로 실리는 문맥 키
CONTEXT_KEYS = ("graph", "pattern", "t", "tau", "stage")

_OWNED = "_tritur_owned"


def _level_number(level: str) -> int:
    value = logging.getLevelName(str(level).upper())
    return value if isinstance(value, int) else logging.WARNING


class CommandContextFilter(logging.Filter):
    """레코드에 실행 중인 명령 이름(command)을 붙임"""

    def __init__(self, command: str = "-"):
        super().__init__()
        self.command = command

    def filter(self, record: logging.LogRecord) -> bool:
        record.command = self.command
        return True


class JSONFormatter(logging.Formatter):
    """한 레코드 = 한 줄 JSON"""

    def format(self, record: logging.LogRecord) -> str:
        entry = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "module": record.name,
            "command": getattr(record, "command", "-"),
            "message": record.getMessage(),
        }
        entry.update({k: getattr(record, k) for k in CONTEXT_KEYS if hasattr(record, k)})
        if record.exc_info and record.exc_info[0]:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, ensure_ascii=False, default=str)


class TextFormatter(logging.Formatter):
    """사람이 읽는 한 줄 포맷"""

    FORMAT = "[%(asctime)s] [%(levelname)s] [%(name)s] [%(command)s] %(message)s"

    def __init__(self):
        super().__init__(fmt=self.FORMAT, datefmt="%Y-%m-%d %H:%M:%S")

    def format(self, record: logging.LogRecord) -> str:
        record.__dict__.setdefault("command", "-")
        return super().format(record)


def _make_handlers(log_file: Optional[str], max_bytes: int, backup_count: int) -> list[logging.Handler]:
    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.handlers.RotatingFileHandler(
            path, maxBytes=max_bytes, backupCount=backup_count, encoding="utf-8",
        ))
    return handlers


def setup_logging(
    level: str = "WARNING",
    log_format: str = "text",
    log_file: Optional[str] = None,
    max_bytes: int = 10_485_760,
    backup_count: int = 5,
    command: str = "-",
) -> None:
    """tritur 루트 로거 구성. 이미 구성돼 있으면 아무것도 하지 않음.

    Args:
        level: DEBUG / INFO / WARNING / ERROR (모르는 이름은 WARNING)
        log_format: "text" 또는 "json"
        log_file: 회전 로그 파일 경로 (None 이면 stderr 만)
        max_bytes, backup_count: 회전 파일 한계
        command: 모든 레코드에 찍을 CLI 명령 이름
    """
    root = logging.getLogger(ROOT_LOGGER)
    if any(getattr(h, _OWNED, False) for h in root.handlers):
        return

    root.setLevel(_level_number(level))
    formatter = JSONFormatter() if log_format == "json" else TextFormatter()
    context = CommandContextFilter(command)
    for handler in _make_handlers(log_file, max_bytes, backup_count):
        setattr(handler, _OWNED, True)
        handler.setFormatter(formatter)
        handler.addFilter(context)
        root.addHandler(handler)


def get_logger(name: str) -> logging.Logger:
    """tritur.<name> 로거 (예: "patterns", "cli")"""
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def reset_logging() -> None:
    """핸들러를 닫고 떼어냄 (테스트용)"""
    root = logging.getLogger(ROOT_LOGGER)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()
    root.setLevel(logging.WARNING)
