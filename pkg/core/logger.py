"""Logging configuration for QUARK."""
import logging
import sys
from pathlib import Path
from typing import Optional, Union

from core.config import Config

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def _resolve_level(level: Union[int, str, None]) -> int:
    if level is None:
        level = Config.LOG_LEVEL
    if isinstance(level, str):
        value = logging.getLevelName(level.upper())
        return value if isinstance(value, int) else logging.INFO
    return level


def setup_logger(name: str, level: Union[int, str, None] = None,
                 log_file: Optional[str] = None) -> logging.Logger:
    """
    Set up a logger with consistent formatting.

    Args:
        name: Logger name (typically __name__ or a package root)
        level: Logging level; defaults to QUARK_LOG_LEVEL
        log_file: Optional log file path

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    resolved = _resolve_level(level)
    logger.setLevel(resolved)

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    # Avoid adding the console handler multiple times
    if not any(getattr(h, '_quark_console', False) for h in logger.handlers):
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setLevel(resolved)
        console_handler.setFormatter(formatter)
        console_handler._quark_console = True
        logger.addHandler(console_handler)

    if log_file:
        attach_file_handler(logger, log_file, resolved)

    return logger


def attach_file_handler(logger: logging.Logger, log_file: Union[str, Path],
                        level: Union[int, str, None] = None) -> logging.Handler:
    """
    Add a file handler (e.g. the run directory's run.log) to a logger.

    Returns:
        The handler, so callers can detach it when the run ends
    """
    log_path = Path(log_file)
    log_path.parent.mkdir(parents=True, exist_ok=True)

    file_handler = logging.FileHandler(log_path)
    file_handler.setLevel(_resolve_level(level))
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(file_handler)
    return file_handler


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)
