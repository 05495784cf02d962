"""
Structured JSON logging utilities for experiment and request tracking.
"""
import json
import logging
import sys
import time
import uuid
from datetime import datetime, timezone
from typing import Any, Dict, Optional, TextIO
from contextvars import ContextVar

from plancherel_stein.config import Config


# Context variable to store the run ID across nested calls and async contexts
run_id_var: ContextVar[Optional[str]] = ContextVar('run_id', default=None)


class JSONFormatter(logging.Formatter):
    """Custom formatter that outputs logs as JSON."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_data = {
            "ts": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        run_id = run_id_var.get()
        if run_id:
            log_data["run_id"] = run_id

        if hasattr(record, "extra_fields"):
            log_data.update(record.extra_fields)

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data, default=str)


def setup_logging(stream: TextIO = sys.stderr) -> None:
    """Configure package logging based on config.

    The CLI writes reports to stdout, so log lines go to stderr by default.
    """
    logger = logging.getLogger()
    logger.setLevel(getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO))

    logger.handlers.clear()

    handler = logging.StreamHandler(stream)

    if Config.LOG_FORMAT.lower() == "json":
        handler.setFormatter(JSONFormatter())
    else:
        handler.setFormatter(
            logging.Formatter(
                '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
            )
        )

    logger.addHandler(handler)


def _emit(logger: logging.Logger, level: int, message: str, fields: Dict[str, Any]) -> None:
    record = logger.makeRecord(logger.name, level, "(structured)", 0, message, (), None)
    record.extra_fields = fields
    logger.handle(record)


def log_request(
    method: str,
    path: str,
    status_code: int,
    latency_ms: float,
    extra: Optional[Dict[str, Any]] = None
) -> None:
    """Log an HTTP request to the service with structured data."""
    logger = logging.getLogger("plancherel_stein.request")

    log_data = {
        "method": method,
        "path": path,
        "status": status_code,
        "latency_ms": round(latency_ms, 2),
    }
    if extra:
        log_data.update(extra)

    _emit(logger, logging.INFO, f"{method} {path} {status_code} {latency_ms:.2f}ms", log_data)


def log_experiment(
    command: str,
    parameters: Dict[str, Any],
    passed: Optional[bool],
    duration_ms: float,
    failed: Optional[list] = None,
) -> None:
    """Log one completed CLI or service run."""
    logger = logging.getLogger("plancherel_stein.experiment")

    log_data = {
        "command": command,
        "parameters": parameters,
        "passed": passed,
        "duration_ms": round(duration_ms, 2),
    }
    if failed:
        log_data["failed"] = failed

    level = logging.INFO if passed is not False else logging.WARNING
    outcome = {True: "passed", False: "FAILED", None: "done"}[passed]
    _emit(logger, level, f"{command} {outcome} in {duration_ms:.0f}ms", log_data)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance with the given name."""
    return logging.getLogger(name)


class ExperimentLogger:
    """Context manager for logging an experiment's lifecycle."""

    def __init__(self, command: str, parameters: Dict[str, Any], run_id: Optional[str] = None):
        self.command = command
        self.parameters = parameters
        self.run_id = run_id or uuid.uuid4().hex[:12]
        self.passed: Optional[bool] = None
        self.failed: list = []
        self.start_time = None
        self._token = None

    def __enter__(self):
        """Start experiment logging."""
        self._token = run_id_var.set(self.run_id)
        self.start_time = time.time()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Complete experiment logging."""
        duration_ms = (time.time() - self.start_time) * 1000

        if exc_type is not None:
            self.passed = False
            self.failed.append(getattr(exc_val, "invariant", exc_type.__name__))

        log_experiment(self.command, self.parameters, self.passed, duration_ms, self.failed)

        run_id_var.reset(self._token)
        return False
