"""
Tests for the verification suites and their runner.
"""
import pytest

from plancherel_stein.config import Config
from plancherel_stein.errors import ArgumentError, ResourceLimitError
from plancherel_stein.verification import SUITES, run_suite, run_suites, verify_partitions


def test_partition_suite():
    for n in range(1, 9):
        assert all(check.passed for check in verify_partitions(n))


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_each_suite_passes(suite):
    """Every suite passes up to n = 5."""
    report = run_suite(suite, 5)
    assert report.suite == suite
    assert report.nmax == 5
    assert report.passed, [c.name for c in report.checks if not c.passed]


def test_run_suites_all():
    reports = run_suites(["all"], 3)
    assert [r.suite for r in reports] == list(SUITES)
    assert all(r.passed for r in reports)


def test_unknown_suite():
    with pytest.raises(ArgumentError):
        run_suite("galois", 3)


def test_nmax_must_be_positive():
    with pytest.raises(ArgumentError):
        run_suite("partitions", 0)


def test_nmax_above_exact_cap(monkeypatch):
    monkeypatch.setattr(Config, "EXACT_CAP", 4)
    with pytest.raises(ResourceLimitError):
        run_suite("partitions", 5)
