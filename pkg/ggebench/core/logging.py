"""Logging configuration."""

import json
import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path


class JSONFormatter(logging.Formatter):
    """JSON log formatter."""

    def format(self, record):
        log_obj = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "line": record.lineno,
        }

        if record.exc_info:
            log_obj["exception"] = self.formatException(record.exc_info)

        if hasattr(record, "extra"):
            log_obj.update(record.extra)

        return json.dumps(log_obj, default=str)


def setup_logging(
    level: str = "INFO",
    log_file: Path | None = None,
    json_format: bool = False,
):
    """Configure logging."""
    log_level = getattr(logging, level.upper(), logging.INFO)

    handlers: list[logging.Handler] = []

    console_handler = logging.StreamHandler()
    if json_format:
        console_handler.setFormatter(JSONFormatter())
    else:
        console_handler.setFormatter(
            logging.Formatter(
                "%(asctime)s [%(levelname)s] %(name)s: %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )
        )
    handlers.append(console_handler)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(JSONFormatter())
        handlers.append(file_handler)

    logging.basicConfig(level=log_level, handlers=handlers, force=True)


@contextmanager
def log_step(logger: logging.Logger, name: str, **fields) -> Iterator[None]:
    """Log start, completion and duration of a pipeline step."""
    start_time = time.perf_counter()
    logger.info(f"Starting: {name}", extra={"extra": {"step": name, **fields}})
    try:
        yield
    except Exception as e:
        duration = time.perf_counter() - start_time
        logger.error(
            f"Failed: {name} ({duration:.2f}s): {e}",
            extra={"extra": {"step": name, "duration": duration, "error": str(e), **fields}},
        )
        raise
    duration = time.perf_counter() - start_time
    logger.info(
        f"Completed: {name} ({duration:.2f}s)",
        extra={"extra": {"step": name, "duration": duration, **fields}},
    )


@contextmanager
def log_to_file(log_file: Path, level: str = "INFO") -> Iterator[None]:
    """Mirror records into a JSON-lines file for the duration of the block."""
    log_file.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(log_file)
    handler.setFormatter(JSONFormatter())
    handler.setLevel(getattr(logging, level.upper(), logging.INFO))
    root = logging.getLogger()
    root.addHandler(handler)
    previous = root.level
    if root.level > handler.level:
        root.setLevel(handler.level)
    try:
        yield
    finally:
        root.removeHandler(handler)
        root.setLevel(previous)
        handler.close()
