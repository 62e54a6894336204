import logging
import sys
from pathlib import Path

ROOT_LOGGER = "gradfrac"
_FORMAT = "[%(tag)s] %(message)s"


class _TagFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        record.tag = record.name.rsplit(".", 1)[-1]
        return True


def setup_logging(level: str = "INFO", log_file: Path | None = None) -> logging.Logger:
    """Install console (and optional file) handlers on the package logger."""
    logger = logging.getLogger(ROOT_LOGGER)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.setLevel(level.upper())
    logger.propagate = False

    console = logging.StreamHandler(sys.stdout)
    console.addFilter(_TagFilter())
    console.setFormatter(logging.Formatter(_FORMAT))
    logger.addHandler(console)

    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, mode="w", encoding="utf-8")
        file_handler.addFilter(_TagFilter())
        file_handler.setFormatter(logging.Formatter(_FORMAT))
        logger.addHandler(file_handler)
    return logger
