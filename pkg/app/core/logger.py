import logging
import os
import sys

from app.core.config import settings

COLORS = {
    "DEBUG": "\033[36m",  # Cyan
    "INFO": "\033[32m",  # Green
    "WARNING": "\033[33m",  # Yellow
    "ERROR": "\033[31m",  # Red
    "CRITICAL": "\033[41m",  # Red background
    "RESET": "\033[0m",  # Reset
}


class ColorFormatter(logging.Formatter):
    def __init__(self, fmt: str, use_color: bool = True) -> None:
        super().__init__(fmt)
        self.use_color = use_color
        self.max_length = max(len(name) for name in COLORS.keys() if name != "RESET")

    def format(self, record: logging.LogRecord) -> str:
        level_name = record.levelname
        padding = " " * (self.max_length - len(level_name))
        if self.use_color:
            color = COLORS.get(level_name, COLORS["RESET"])
            record.levelname = f"{color}{level_name}{COLORS['RESET']}"
        self._style._fmt = f"%(levelname)s:{padding} %(message)s"
        try:
            return super().format(record)
        finally:
            record.levelname = level_name


def setup_logger() -> logging.Logger:
    logger = logging.getLogger("ecasync")
    logger.setLevel(settings.LOG_LEVEL.upper())
    logger.propagate = False

    handler = logging.StreamHandler(sys.stderr)
    use_color = sys.stderr.isatty() and "NO_COLOR" not in os.environ
    handler.setFormatter(ColorFormatter("%(levelname)s: %(message)s", use_color))
    logger.addHandler(handler)
    return logger


def set_verbose(verbose: bool) -> None:
    logger.setLevel(logging.DEBUG if verbose else settings.LOG_LEVEL.upper())


logger = setup_logger()
