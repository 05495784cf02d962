"""
Tests for partitions, hook lengths, dimensions and Young-lattice navigation.
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from plancherel_stein.errors import ArgumentError
from plancherel_stein.partitions import (
    EMPTY,
    Partition,
    add_box,
    addable_rows,
    addition_probability,
    conjugate,
    contents,
    dimension,
    down_neighbors,
    enumerate_partitions,
    hook_lengths,
    kingman_dimension,
    parse_partition,
    partition_count,
    path_count,
    removable_rows,
    up_neighbors,
)


partitions_strategy = st.lists(st.integers(min_value=1, max_value=6), max_size=6).map(
    lambda parts: Partition(sorted(parts, reverse=True))
)


def test_enumeration_order():
    """Partitions of 4 come out in reverse-lexicographic order."""
    assert enumerate_partitions(4) == (
        Partition([4]),
        Partition([3, 1]),
        Partition([2, 2]),
        Partition([2, 1, 1]),
        Partition([1, 1, 1, 1]),
    )
    assert enumerate_partitions(0) == (EMPTY,)


def test_partition_count_matches_enumeration():
    """Pentagonal recurrence agrees with enumeration and known values."""
    assert [partition_count(n) for n in range(11)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    for n in range(15):
        assert len(enumerate_partitions(n)) == partition_count(n)


def test_partition_validation():
    """Parts must be positive integers in weakly decreasing order."""
    with pytest.raises(ArgumentError):
        Partition([1, 2])
    with pytest.raises(ArgumentError):
        Partition([2, 0])
    with pytest.raises(ArgumentError):
        Partition([2.0, 1])
    with pytest.raises(ArgumentError):
        enumerate_partitions(-1)


def test_text_form():
    """Bracket text form prints and parses."""
    lam = Partition([4, 2, 1])
    assert str(lam) == "[4,2,1]"
    assert parse_partition("[4,2,1]") == lam
    assert parse_partition(" 3, 1 ") == Partition([3, 1])
    assert parse_partition("[]") == EMPTY
    with pytest.raises(ArgumentError):
        parse_partition("[4,x]")
    with pytest.raises(ArgumentError):
        parse_partition("[1,3]")


def test_hooks_and_dimensions():
    """Hook-length formula on small shapes."""
    assert sorted(hook_lengths(Partition([4, 2, 1])).multiset()) == [1, 1, 1, 2, 3, 4, 6]
    assert dimension(Partition([4, 2, 1])) == 35
    assert dimension(Partition([3, 2, 1])) == 16
    assert dimension(Partition([2, 1])) == 2
    assert dimension(EMPTY) == 1


def test_sum_of_squared_dimensions():
    """sum dim^2 = n! for n <= 10."""
    factorial = 1
    for n in range(1, 11):
        factorial *= n
        assert sum(dimension(lam) ** 2 for lam in enumerate_partitions(n)) == factorial


def test_conjugate_and_contents():
    """Conjugate transposes the diagram; contents are column minus row."""
    assert conjugate(Partition([4, 2, 1])) == Partition([3, 2, 1, 1])
    assert conjugate(EMPTY) == EMPTY
    assert contents(Partition([2, 1])) == [0, 1, -1]


def test_kingman_dimension():
    """n!/prod lambda_i!."""
    assert kingman_dimension(Partition([2, 1])) == 3
    assert kingman_dimension(Partition([1, 1, 1])) == 6
    assert kingman_dimension(Partition([3])) == 1


def test_neighbors():
    """Up and down neighbors of [2,1]."""
    lam = Partition([2, 1])
    assert addable_rows(lam) == [0, 1, 2]
    assert removable_rows(lam) == [0, 1]
    assert up_neighbors(lam) == [Partition([3, 1]), Partition([2, 2]), Partition([2, 1, 1])]
    assert down_neighbors(lam) == [Partition([2]), Partition([1, 1])]
    assert add_box(EMPTY, 0) == Partition([1])


def test_path_count():
    """Skew dimensions count box-addition chains."""
    assert path_count(Partition([1]), Partition([2, 1])) == 2
    assert path_count(Partition([2]), Partition([1, 1, 1])) == 0
    assert path_count(EMPTY, Partition([3, 2])) == dimension(Partition([3, 2]))
    with pytest.raises(ArgumentError):
        path_count(Partition([2, 1]), Partition([2]))


def test_addition_probabilities_sum_to_one():
    """Coherent growth probabilities are a distribution at every shape."""
    for n in range(8):
        for lam in enumerate_partitions(n):
            assert sum(addition_probability(lam, row) for row in addable_rows(lam)) == 1


def test_addition_probability_is_dimension_ratio():
    """Probability of Lambda from lambda equals dim(Lambda)/((n+1) dim(lambda))."""
    lam = Partition([3, 1])
    for row in addable_rows(lam):
        big = add_box(lam, row)
        assert addition_probability(lam, row) == Fraction(dimension(big), 5 * dimension(lam))


@given(partitions_strategy)
@settings(max_examples=200, deadline=None)
def test_conjugate_is_involution(lam):
    """lambda'' = lambda and dim(lambda') = dim(lambda)."""
    assert conjugate(conjugate(lam)) == lam
    assert dimension(conjugate(lam)) == dimension(lam)


@given(partitions_strategy)
@settings(max_examples=200, deadline=None)
def test_dimension_branching(lam):
    """dim(lambda) is the sum of dim over down-neighbors."""
    if lam.n:
        assert sum(dimension(mu) for mu in down_neighbors(lam)) == dimension(lam)


@given(partitions_strategy)
@settings(max_examples=200, deadline=None)
def test_content_sum_formula(lam):
    """Sum of contents = sum C(lambda_i, 2) - sum C(lambda_i', 2)."""
    expected = sum(p * (p - 1) // 2 for p in lam) - sum(q * (q - 1) // 2 for q in conjugate(lam))
    assert sum(contents(lam)) == expected
