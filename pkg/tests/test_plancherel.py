"""
Tests for the exact Plancherel law and the growth and RSK samplers.
"""
from collections import Counter
from fractions import Fraction

import pytest

from plancherel_stein.config import Config
from plancherel_stein.errors import ArgumentError, InvariantViolation, ResourceLimitError
from plancherel_stein.partitions import Partition, dimension, enumerate_partitions
from plancherel_stein.plancherel import (
    empirical_counts,
    goodness_of_fit,
    growth_law_exact,
    growth_sample,
    lis_tail_probability_check,
    longest_increasing_subsequence,
    plancherel_dist,
    rsk_exhaustive_law,
    rsk_sample,
    resolve_chunk_size,
    rsk_shape,
    sample_batch,
    sampler_agreement,
    verify_plancherel,
)
from plancherel_stein.rng import SeededStream, split


def test_plancherel_n3():
    """dim^2/n! at n = 3."""
    dist = plancherel_dist(3)
    assert dist[Partition([3])] == Fraction(1, 6)
    assert dist[Partition([2, 1])] == Fraction(2, 3)
    assert dist[Partition([1, 1, 1])] == Fraction(1, 6)
    assert dist.total() == 1
    assert dist.states == enumerate_partitions(3)


def test_growth_law_is_plancherel():
    """Exact growth-process law equals dim^2/n!."""
    for n in range(9):
        assert growth_law_exact(n).probabilities == plancherel_dist(n).probabilities


def test_rsk_shape():
    """Row insertion on small permutations."""
    assert rsk_shape([3, 1, 2]) == Partition([2, 1])
    assert rsk_shape([1, 2, 3, 4]) == Partition([4])
    assert rsk_shape([4, 3, 2, 1]) == Partition([1, 1, 1, 1])
    assert rsk_shape([]) == Partition([])


def test_rsk_rejects_non_permutations():
    """Input must be a permutation of 1..n."""
    with pytest.raises(ArgumentError):
        rsk_shape([1, 1, 2])
    with pytest.raises(ArgumentError):
        rsk_shape([0, 1, 2])


def test_longest_increasing_subsequence():
    """Patience sorting."""
    assert longest_increasing_subsequence([3, 1, 2]) == 2
    assert longest_increasing_subsequence([2, 4, 1, 5, 3, 6]) == 4
    assert longest_increasing_subsequence([]) == 0


def test_rsk_exhaustive_law():
    """Shape counts over S_4 are dim^2."""
    law = rsk_exhaustive_law(4)
    assert law == {lam: dimension(lam) ** 2 for lam in enumerate_partitions(4)}
    with pytest.raises(ResourceLimitError):
        rsk_exhaustive_law(8)


def test_samplers_return_partitions_of_n():
    """Both samplers produce partitions of the requested size."""
    rng = SeededStream(5)
    for n in (1, 7, 30):
        assert growth_sample(n, rng).n == n
        assert rsk_sample(n, rng).n == n
    assert growth_sample(0, rng) == Partition([])
    with pytest.raises(ArgumentError):
        rsk_sample(0, rng)


def test_streams_are_reproducible():
    """Same (seed, stream) reproduces draws; different streams differ."""
    a = [SeededStream(11, 3).uniform() for _ in range(1)]
    b = [SeededStream(11, 3).uniform() for _ in range(1)]
    c = [SeededStream(11, 4).uniform() for _ in range(1)]
    assert a == b
    assert a != c
    with pytest.raises(InvariantViolation):
        SeededStream(1).choose([0.5, 0.4])
    with pytest.raises(ArgumentError):
        SeededStream(-1)


def test_split_covers_count():
    """Chunks cover the requested count in order."""
    chunks = list(split(3, 25, 10))
    assert [(start, size) for start, size, _ in chunks] == [(0, 10), (10, 10), (20, 5)]
    assert [stream.stream for _, _, stream in chunks] == [0, 1, 2]


def test_sample_batch_deterministic():
    """Seeded batches are reproducible and independent of worker count."""
    first = sample_batch("rsk", 12, 50, seed=9, chunk_size=16, workers=1)
    again = sample_batch("rsk", 12, 50, seed=9, chunk_size=16, workers=1)
    parallel = sample_batch("rsk", 12, 50, seed=9, chunk_size=16, workers=2)
    assert first == again == parallel
    assert len(first) == 50
    with pytest.raises(ArgumentError):
        sample_batch("bogus", 5, 10, seed=1)


def test_chunk_size_is_part_of_the_stream_layout(monkeypatch):
    """Streams are per chunk, so a different chunk size gives different draws."""
    by_16 = sample_batch("rsk", 12, 50, seed=9, chunk_size=16)
    by_10 = sample_batch("rsk", 12, 50, seed=9, chunk_size=10)
    assert by_16[:10] == by_10[:10]
    assert by_16 != by_10
    monkeypatch.setattr(Config, "CHUNK_SIZE", 16)
    assert resolve_chunk_size() == 16
    assert sample_batch("rsk", 12, 50, seed=9) == by_16
    assert resolve_chunk_size(10) == 10
    with pytest.raises(ArgumentError):
        resolve_chunk_size(0)


def test_goodness_of_fit_growth_and_rsk():
    """Both samplers agree with the exact law at n = 6."""
    exact = plancherel_dist(6)
    growth = empirical_counts(sample_batch("growth", 6, 6000, seed=21))
    rsk = empirical_counts(sample_batch("rsk", 6, 6000, seed=22))
    assert goodness_of_fit(growth, exact)[1] > 1e-4
    assert goodness_of_fit(rsk, exact)[1] > 1e-4
    assert sampler_agreement(growth, rsk)[1] > 1e-4


def test_goodness_of_fit_detects_wrong_law():
    """A point mass is rejected."""
    counts = Counter({Partition([6]): 5000})
    assert goodness_of_fit(counts, plancherel_dist(6))[1] < 1e-6


def test_lis_tail_check():
    """No partition of 16 reaches 2e sqrt(16) ~ 21.7 rows or columns."""
    result = lis_tail_probability_check(16, 500, SeededStream(4))
    assert result.passed
    assert result.details["hits"] == 0


@pytest.mark.parametrize("n", range(1, 7))
def test_verify_plancherel(n):
    """Normalization, growth law and exhaustive RSK."""
    assert all(check.passed for check in verify_plancherel(n))


def test_enumeration_cap(monkeypatch):
    """Exact distributions respect PLANCHEREL_ENUM_CAP."""
    monkeypatch.setattr(Config, "ENUM_CAP", 5)
    with pytest.raises(ResourceLimitError):
        plancherel_dist(29)


def test_plancherel_n7_example():
    """dim([4,2,1]) = 35, so its mass is 35^2/7! = 35/144."""
    dist = plancherel_dist(7)
    assert dimension(Partition([4, 2, 1])) == 35
    assert dist[Partition([4, 2, 1])] == Fraction(35, 144)
    assert dist.total() == 1


@pytest.mark.slow
def test_samplers_agree_at_n20():
    """Growth and RSK shape counts pass a homogeneity test at n = 20 with 10^5 draws each."""
    growth = empirical_counts(sample_batch("growth", 20, 100_000, seed=31))
    rsk = empirical_counts(sample_batch("rsk", 20, 100_000, seed=32))
    assert sampler_agreement(growth, rsk)[1] > 1e-3


@pytest.mark.slow
def test_first_row_scale_at_n64():
    """Mean lambda_1/sqrt(n) over 10^4 RSK samples at n = 64 sits below 2 and well above 1."""
    samples = sample_batch("rsk", 64, 10_000, seed=64)
    mean_ratio = sum(lam.first_row for lam in samples) / len(samples) / 8
    assert 1.5 <= mean_ratio <= 2.0
