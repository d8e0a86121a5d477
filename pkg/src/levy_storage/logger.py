"""logger.py
Logger set-up for the toolkit: console and optional rotating-file handlers on top of the `logging` module, configured
from parameters or LEVY_STORAGE_LOG_* environment variables.
"""

import logging
import os
import pathlib
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler
from sys import stderr

from .utils import get_bool_property, get_int_property

DEFAULT_LOGGER_NAME = "levy_storage"
DEFAULT_LOG_PATTERN = "%(asctime)s %(levelname)s [%(threadName)s] %(name)s: %(message)s"

# Names of loggers that already carry our handlers
_configured: set[str] = set()


def _env_bool(name: str, default: bool) -> bool:
    return get_bool_property({}, name, name, default)


def _env_int(name: str, default: int) -> int:
    return get_int_property({}, name, name, default)


def _default_log_file() -> str:
    log_file = os.getenv("LEVY_STORAGE_LOG_FILE")
    if log_file and log_file.strip():
        return log_file
    return str(pathlib.Path.home() / "logs" / "levy-storage" / "levy-storage.log")


def _file_handler(log_file: str, rotation_type: str, max_bytes: int, backup_count: int, when: str,
                  interval: int) -> logging.Handler:
    os.makedirs(os.path.dirname(log_file) or ".", exist_ok=True)
    if rotation_type == "time":
        return TimedRotatingFileHandler(log_file, when=when, interval=interval, backupCount=backup_count)
    return RotatingFileHandler(log_file, maxBytes=max_bytes, backupCount=backup_count)


def get_logger(name: str = DEFAULT_LOGGER_NAME,
               log_level: str | None = None,
               log_console_enabled: bool | None = None,
               log_file_enabled: bool | None = None,
               log_file: str | None = None,
               log_pattern: str | None = None,
               rotation_type: str | None = None,
               max_bytes: int | None = None,
               backup_count: int | None = None,
               when: str | None = None,
               interval: int | None = None,
               ) -> logging.Logger:
    """Get or configure a logger.
    Note, a logger that was configured before is returned as is, later arguments are ignored.

    Args:
        :param name:                Name of the logger (default: "levy_storage"). Sub-loggers such as
                                    "levy_storage.simulation" propagate to it.
        :param log_level:           Logging level (default: LEVY_STORAGE_LOG_LEVEL or INFO).
        :param log_console_enabled: Whether to log to stderr (default: LEVY_STORAGE_LOG_CONSOLE_ENABLED or True).
        :param log_file_enabled:    Whether to log to a file (default: LEVY_STORAGE_LOG_FILE_ENABLED or False).
        :param log_file:            Log file path (default: LEVY_STORAGE_LOG_FILE or
                                    ~/logs/levy-storage/levy-storage.log).
        :param log_pattern:         Log pattern (default: LEVY_STORAGE_LOG_PATTERN or DEFAULT_LOG_PATTERN).
        :param rotation_type:       'size' or 'time' (default: LEVY_STORAGE_LOG_ROTATION_TYPE or 'size').
        :param max_bytes:           Bytes per file before size rotation (default: LEVY_STORAGE_LOG_MAX_BYTES or 10MB).
        :param backup_count:        Rotated files to keep (default: LEVY_STORAGE_LOG_BACKUP_COUNT or 5).
        :param when:                Time rotation unit, see TimedRotatingFileHandler (default: 'midnight').
        :param interval:            Time rotation interval (default: 1).

    Returns:
        The configured logger instance.
    """

    if name in _configured:
        return logging.getLogger(name)

    log = logging.getLogger(name)

    if log_console_enabled is None:
        log_console_enabled = _env_bool("LEVY_STORAGE_LOG_CONSOLE_ENABLED", True)
    if log_file_enabled is None:
        log_file_enabled = _env_bool("LEVY_STORAGE_LOG_FILE_ENABLED", False)

    level_name = (log_level or os.getenv("LEVY_STORAGE_LOG_LEVEL", "INFO")).upper()
    log.setLevel(getattr(logging, level_name, logging.INFO))

    if not log_console_enabled and not log_file_enabled:
        _configured.add(name)
        return log

    pattern = log_pattern if log_pattern and log_pattern.strip() \
        else os.getenv("LEVY_STORAGE_LOG_PATTERN", DEFAULT_LOG_PATTERN)
    formatter = logging.Formatter(pattern)

    if log_console_enabled:
        console_handler = logging.StreamHandler(stderr)
        console_handler.setFormatter(formatter)
        log.addHandler(console_handler)

    if log_file_enabled:
        log_file = log_file if log_file and log_file.strip() else _default_log_file()
        rotation_type = (rotation_type or os.getenv("LEVY_STORAGE_LOG_ROTATION_TYPE", "size")).lower()
        max_bytes = max_bytes if max_bytes and max_bytes > 0 \
            else _env_int("LEVY_STORAGE_LOG_MAX_BYTES", 10 * 1024 * 1024)
        backup_count = backup_count if backup_count and backup_count > 0 \
            else _env_int("LEVY_STORAGE_LOG_BACKUP_COUNT", 5)
        when = when or os.getenv("LEVY_STORAGE_LOG_ROTATION_WHEN", "midnight")
        interval = interval if interval and interval > 0 else _env_int("LEVY_STORAGE_LOG_ROTATION_INTERVAL", 1)

        file_handler = _file_handler(log_file, rotation_type, max_bytes, backup_count, when, interval)
        file_handler.setFormatter(formatter)
        log.addHandler(file_handler)
        log.debug(f"File logging enabled. Name: {name}, Level: {level_name}, File: {log_file}, "
                  f"Rotation: {rotation_type}-based, backups: {backup_count}.")

    # Handlers live on this logger only
    log.propagate = False

    _configured.add(name)
    return log
