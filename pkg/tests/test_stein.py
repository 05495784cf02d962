"""
Tests for the character-ratio statistic W, its exchangeable pair and the
normal approximation bound.
"""
from fractions import Fraction

import numpy as np
import pytest

from plancherel_stein import stein
from plancherel_stein.config import Config
from plancherel_stein.errors import ArgumentError, InvariantViolation
from plancherel_stein.partitions import Partition, enumerate_partitions
from plancherel_stein.plancherel import sample_batch
from plancherel_stein.rng import SeededStream
from plancherel_stein.stein import (
    CLT_CONSTANT,
    SQRT2,
    character_ratio_moments,
    clt_bound,
    clt_experiment,
    conditional_first_moment,
    conditional_second_moment,
    constant_grid,
    constant_lhs,
    content_sum,
    jump_sample,
    kolmogorov_distance,
    mean_variance_check,
    pathwise_jumps,
    pathwise_limit,
    r_value,
    squared_jump,
    stein_bound_constant_check,
    stein_error_bound,
    term1_exact,
    term1_formula,
    term1_given_w,
    term2_bound,
    term2_empirical,
    verify_exchangeability,
    verify_stein,
    w_statistic,
)


def test_w_small_shapes():
    """W = (n-1) chi(12)/(sqrt(2) dim) on a few shapes."""
    assert r_value(Partition([2])) == 1
    assert r_value(Partition([1, 1])) == -1
    assert r_value(Partition([3, 1])) == 1
    assert r_value(Partition([2, 2])) == 0
    assert r_value(Partition([1])) == 0
    assert w_statistic([3, 1]).value == pytest.approx(1 / SQRT2)
    assert w_statistic([4]).r_squared_half == Fraction(9, 2)


def test_content_sum_matches_contents():
    """Row formula for the content sum."""
    assert content_sum(Partition([3, 1])) == 2
    assert content_sum(Partition([2, 2])) == 0
    assert content_sum(Partition([1, 1, 1])) == -3


def test_w_agrees_with_character_on_every_shape():
    """Frobenius formula and Murnaghan-Nakayama give the same W."""
    for lam in enumerate_partitions(6):
        assert w_statistic(lam).r == r_value(lam)


def test_conditional_first_moment_n2():
    """E(W*|(2)) = (1 - 2/3) W."""
    assert conditional_first_moment(Partition([2])) == (Fraction(1, 3), Fraction(1, 3))


def test_conditional_moments_every_shape():
    """Both conditional moment identities for every lambda of 5."""
    for lam in enumerate_partitions(5):
        computed, expected = conditional_first_moment(lam)
        assert computed == expected
        assert conditional_second_moment(lam) >= 0
    assert conditional_second_moment(Partition([2])) == Fraction(1, 2)


def test_mean_and_variance():
    """E(W) = 0 and Var(W) = 1 - 1/n under Plancherel measure."""
    assert mean_variance_check(2) == (0, Fraction(1, 2))
    for n in range(1, 8):
        mean, variance = mean_variance_check(n)
        assert mean == 0
        assert variance == 1 - Fraction(1, n)


def test_squared_jump_n2():
    """A jump from (2) goes to (1,1) with probability 1/3, moving r by 2."""
    assert squared_jump(Partition([2])) == Fraction(2, 3)


def test_term1_closed_form():
    """Exact term1 against (3n^2 - 5n + 6)/(4n^3)."""
    assert term1_exact(2) == Fraction(1, 4)
    assert term1_exact(3) == Fraction(1, 6)
    for n in range(1, 7):
        assert term1_exact(n) == term1_formula(n)
    with pytest.raises(ArgumentError):
        term1_exact(0)


def test_term1_given_w_is_smaller():
    """Conditioning on W instead of lambda cannot increase the term."""
    for n in range(2, 7):
        assert term1_given_w(n) <= term1_formula(n)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_exchangeability(n):
    assert verify_exchangeability(n).passed


def test_character_ratio_moments():
    """Moments of chi(12)/dim count products of transpositions."""
    result = character_ratio_moments(4)
    assert result.passed, result.failures
    assert result.details["moments"]["1"] == "0"
    with pytest.raises(ArgumentError):
        character_ratio_moments(1)


def test_term2_bound():
    """(4e)^3 dominates at n = 2."""
    assert term2_bound(2) > 1285
    assert term2_bound(10 ** 4) < term2_bound(100)
    with pytest.raises(ArgumentError):
        term2_bound(1)


def test_pathwise_limit():
    assert pathwise_limit(Partition([4])) == 4
    assert pathwise_limit(Partition([2, 2])) == 2


def test_jump_sample_respects_pathwise_bound():
    """Every sampled |W*-W| is at most 2 sqrt(2)."""
    rng = SeededStream(5)
    jumps = jump_sample([Partition([5, 3, 1]), Partition([3, 3, 2, 1]), Partition([9])], rng)
    assert len(jumps) == 3
    assert all(abs(j) <= 2 * SQRT2 + 1e-12 for j in jumps)


def test_pathwise_violations_are_counted(monkeypatch):
    """With a negative limit every draw is a violation: counted by the experiment, raised by jump_sample."""
    monkeypatch.setattr(stein, "pathwise_limit", lambda lam: Fraction(-1))
    jumps, violations = pathwise_jumps([Partition([3, 1]), Partition([2, 2])], SeededStream(2))
    assert len(jumps) == len(violations) == 2
    with pytest.raises(InvariantViolation):
        jump_sample([Partition([3, 1])], SeededStream(2))
    report = clt_experiment(8, 40, 3, pair_count=25)
    assert report.pathwise_violations == 25


@pytest.mark.slow
@pytest.mark.parametrize("n", [16, 64])
def test_pathwise_bound_on_many_transitions(n):
    """10^5 updown steps from RSK samples never break the pathwise bound."""
    partitions = sample_batch("rsk", n, 100_000, seed=n)
    jumps, violations = pathwise_jumps(partitions, SeededStream(n, 1 << 20))
    assert violations == []
    assert len(jumps) == 100_000
    assert float(np.mean(np.abs(jumps) ** 3)) <= term2_bound(n)


def test_term2_empirical():
    """Monte Carlo third absolute moment stays under its bound."""
    value = term2_empirical(16, 2000, SeededStream(3))
    assert 0 < value <= (2 * SQRT2) ** 3
    assert value <= term2_bound(16)


def test_kolmogorov_distance():
    """Both one-sided limits count at an atom."""
    assert kolmogorov_distance([0.0]) == pytest.approx(0.5)
    with pytest.raises(ArgumentError):
        kolmogorov_distance([])
    normals = np.random.default_rng(0).standard_normal(200_000)
    assert kolmogorov_distance(normals) < 0.01


def test_stein_error_bound():
    """The refined bound never exceeds 40.1 n^(-1/4)."""
    for n in (2, 3, 10, 100, 10 ** 4, 10 ** 6):
        assert stein_error_bound(n) <= clt_bound(n)
        assert constant_lhs(n) <= clt_bound(n)
    assert clt_bound(16) == pytest.approx(CLT_CONSTANT / 2)


def test_constant_grid():
    grid = constant_grid(10 ** 4)
    assert grid[0] == 2
    assert grid[-1] == 10 ** 4
    assert 2000 in grid
    assert constant_grid(50) == list(range(2, 51))


def test_constant_check_small_grid():
    """Constant check on n <= 10^4."""
    result = stein_bound_constant_check(constant_grid(10 ** 4))
    assert result.passed, result.failures
    assert result.details["worst_constant"] < CLT_CONSTANT
    with pytest.raises(ArgumentError):
        stein_bound_constant_check([1])


@pytest.mark.slow
def test_constant_check_full_grid():
    """Constant check out to n = 10^6."""
    assert stein_bound_constant_check().passed


def test_clt_experiment_is_deterministic():
    """Same (n, samples, seed) gives the same report."""
    first = clt_experiment(12, 500, 4)
    second = clt_experiment(12, 500, 4)
    assert first == second
    assert first.pair_samples == 500
    assert first.pathwise_violations == 0
    assert clt_experiment(12, 500, 4, pair_count=100).pair_samples == 100


def test_clt_experiment_records_chunk_size(monkeypatch):
    """The chunk size in effect is part of the report and changes the draws."""
    monkeypatch.setattr(Config, "CHUNK_SIZE", 64)
    default = clt_experiment(12, 200, 4)
    assert default.chunk_size == 64
    assert clt_experiment(12, 200, 4, chunk_size=64) == default
    smaller = clt_experiment(12, 200, 4, chunk_size=50)
    assert smaller.chunk_size == 50
    assert smaller.kolmogorov_distance != default.kolmogorov_distance or smaller.w_mean != default.w_mean


def test_clt_experiment_moments():
    """Sample mean and variance of W are close to 0 and 1 - 1/n."""
    report = clt_experiment(50, 2000, 3)
    assert abs(report.w_mean) < 0.15
    assert abs(report.w_variance - (1 - 1 / 50)) < 0.2
    assert report.within_bound
    assert report.jump_third_abs_moment <= report.term2_bound


def test_clt_experiment_domain():
    with pytest.raises(ArgumentError):
        clt_experiment(1, 10, 1)
    with pytest.raises(ArgumentError):
        clt_experiment(10, 0, 1)


@pytest.mark.parametrize("n", range(1, 6))
def test_verify_stein(n):
    """Whole exchangeable-pair suite passes."""
    checks = verify_stein(n)
    assert all(check.passed for check in checks), [c.name for c in checks if not c.passed]


@pytest.mark.slow
def test_clt_distances_shrink_with_n():
    """2*10^5 samples at n = 16, 64, 256: within 40.1 n^(-1/4), non-increasing up to noise, below 0.05 at 256."""
    count = 200_000
    noise = 2 * 0.5 / count ** 0.5
    distances = []
    for n in (16, 64, 256):
        report = clt_experiment(n, count, seed=1)
        assert report.within_bound
        assert report.pathwise_violations == 0
        distances.append(report.kolmogorov_distance)
    assert distances[1] <= distances[0] + noise
    assert distances[2] <= distances[1] + noise
    assert distances[2] < 0.05
