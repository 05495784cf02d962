"""
Tests for structured logging.
"""
import io
import json
import logging

import pytest

from plancherel_stein.config import Config
from plancherel_stein.errors import InvariantViolation
from plancherel_stein.logging_utils import (
    ExperimentLogger,
    JSONFormatter,
    get_logger,
    log_request,
    run_id_var,
    setup_logging,
)


@pytest.fixture
def restore_root_handlers():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def test_json_formatter_includes_run_id():
    token = run_id_var.set("abc123")
    try:
        record = logging.LogRecord("plancherel_stein.test", logging.INFO, __file__, 1, "hello", (), None)
        record.extra_fields = {"n": 7}
        data = json.loads(JSONFormatter().format(record))
    finally:
        run_id_var.reset(token)
    assert data["message"] == "hello"
    assert data["run_id"] == "abc123"
    assert data["n"] == 7
    assert data["level"] == "INFO"


def test_setup_logging_writes_json_lines(restore_root_handlers, monkeypatch):
    monkeypatch.setattr(Config, "LOG_FORMAT", "json")
    stream = io.StringIO()
    setup_logging(stream)
    log_request("GET", "/plancherel/3", 200, 1.234)
    line = json.loads(stream.getvalue().strip().splitlines()[-1])
    assert line["path"] == "/plancherel/3"
    assert line["status"] == 200
    assert line["latency_ms"] == 1.23


def test_setup_logging_text_format(restore_root_handlers, monkeypatch):
    monkeypatch.setattr(Config, "LOG_FORMAT", "text")
    stream = io.StringIO()
    setup_logging(stream)
    get_logger("plancherel_stein.test").warning("plain")
    assert "WARNING - plain" in stream.getvalue()


def test_experiment_logger_records_outcome(caplog):
    with caplog.at_level(logging.INFO):
        with ExperimentLogger("verify", {"nmax": 3}) as run:
            assert run_id_var.get() == run.run_id
            run.passed = True
    assert run_id_var.get() is None
    record = caplog.records[-1]
    assert record.extra_fields["command"] == "verify"
    assert record.extra_fields["passed"] is True


def test_experiment_logger_does_not_swallow(caplog):
    """Failures are logged with the invariant name and re-raised."""
    with caplog.at_level(logging.INFO):
        with pytest.raises(InvariantViolation):
            with ExperimentLogger("chain", {}):
                raise InvariantViolation("row sums are one")
    record = caplog.records[-1]
    assert record.levelno == logging.WARNING
    assert record.extra_fields["failed"] == ["row sums are one"]
