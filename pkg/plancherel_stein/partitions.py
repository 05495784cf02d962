"""
Integer partitions, Young-lattice navigation, hook lengths and exact dimensions.

Partitions are ordered reverse-lexicographically everywhere in the package:
(4) > (3,1) > (2,2) > (2,1,1) > (1,1,1,1). Matrix indices, report rows and
character-table rows all follow this order.
"""
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Dict, Iterable, Iterator, List, Tuple

from plancherel_stein.errors import ArgumentError, ConsistencyError


class Partition(tuple):
    """
    A weakly decreasing tuple of positive integers.

    Instances are immutable and hashable, so they serve directly as dictionary
    keys for distributions and matrix indices. ``str()`` gives the text form
    used in CLI output and JSON reports, e.g. ``[4,2,1]``.
    """

    __slots__ = ()

    def __new__(cls, parts: Iterable[int] = ()):
        if isinstance(parts, Partition):
            return parts
        parts = tuple(parts)
        for p in parts:
            if not isinstance(p, int) or isinstance(p, bool):
                raise ArgumentError(f"partition parts must be integers, got {p!r}")
            if p < 1:
                raise ArgumentError(f"partition parts must be positive, got {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ArgumentError(f"partition parts must be weakly decreasing, got {parts}")
        return super().__new__(cls, parts)

    @property
    def parts(self) -> Tuple[int, ...]:
        return tuple(self)

    @property
    def n(self) -> int:
        return sum(self)

    @property
    def first_row(self) -> int:
        """lambda_1, the length of the first row (0 for the empty partition)."""
        return self[0] if self else 0

    @property
    def first_column(self) -> int:
        """lambda_1', the number of rows."""
        return len(self)

    def multiplicities(self) -> Dict[int, int]:
        """m_j: number of parts equal to j, for every j that occurs."""
        return dict(Counter(self))

    def contains(self, other: "Partition") -> bool:
        """True if the Young diagram of ``other`` fits inside this one."""
        if len(other) > len(self):
            return False
        return all(o <= s for o, s in zip(other, self))

    def __str__(self) -> str:
        return "[" + ",".join(str(p) for p in self) + "]"

    def __repr__(self) -> str:
        return f"Partition({list(self)!r})"


EMPTY = Partition()


def parse_partition(text: str) -> Partition:
    """Parse the text form ``[4,2,1]`` (brackets optional, ``[]`` is empty)."""
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    body = body.strip()
    if not body:
        return EMPTY
    try:
        parts = [int(token) for token in body.split(",")]
    except ValueError:
        raise ArgumentError(f"malformed partition text: {text!r}")
    return Partition(parts)


def _descending(n: int, largest: int) -> Iterator[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _descending(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def enumerate_partitions(n: int) -> Tuple[Partition, ...]:
    """All partitions of n in reverse-lexicographic order."""
    if n < 0:
        raise ArgumentError(f"n must be non-negative, got {n}")
    return tuple(Partition(p) for p in _descending(n, n))


@lru_cache(maxsize=None)
def partition_count(n: int) -> int:
    """p(n) by Euler's pentagonal-number recurrence."""
    if n < 0:
        return 0
    if n == 0:
        return 1
    total = 0
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 > n:
            break
        sign = 1 if k % 2 else -1
        total += sign * partition_count(n - g1)
        g2 = k * (3 * k + 1) // 2
        if g2 <= n:
            total += sign * partition_count(n - g2)
        k += 1
    return total


def conjugate(partition: Partition) -> Partition:
    """Transpose the Young diagram: rows become columns."""
    if not partition:
        return EMPTY
    return Partition(
        sum(1 for part in partition if part > j) for j in range(partition[0])
    )


@dataclass(frozen=True)
class HookGrid:
    """Hook lengths laid out in the shape of a partition."""

    shape: Partition
    rows: Tuple[Tuple[int, ...], ...]

    def cells(self) -> Iterator[int]:
        for row in self.rows:
            yield from row

    def product(self) -> int:
        return prod(self.cells())

    def multiset(self) -> List[int]:
        return sorted(self.cells())


def hook_lengths(partition: Partition) -> HookGrid:
    """Hook length of every box: 1 + boxes to the right + boxes below."""
    partition = Partition(partition)
    columns = conjugate(partition)
    rows = tuple(
        tuple(
            (row_length - j - 1) + (columns[j] - i - 1) + 1
            for j in range(row_length)
        )
        for i, row_length in enumerate(partition)
    )
    return HookGrid(shape=partition, rows=rows)


@lru_cache(maxsize=65536)
def dimension(partition: Partition) -> int:
    """Exact dimension n!/prod h(x) of the irreducible representation."""
    partition = Partition(partition)
    quotient, remainder = divmod(factorial(partition.n), hook_lengths(partition).product())
    if remainder:
        raise ConsistencyError("hook-length formula", f"n!/prod h not integral for {partition}")
    return quotient


def kingman_dimension(partition: Partition) -> int:
    """Dimension function of the Kingman lattice: n!/(lambda_1! ... lambda_l!)."""
    partition = Partition(partition)
    return factorial(partition.n) // prod(factorial(p) for p in partition)


def contents(partition: Partition) -> List[int]:
    """Content (column index minus row index) of every box, row by row."""
    return [j - i for i, row_length in enumerate(partition) for j in range(row_length)]


def addable_rows(partition: Partition) -> List[int]:
    """Row indices where a box can be added, top to bottom (a new row included)."""
    return [
        i for i in range(len(partition) + 1)
        if i == 0 or i == len(partition) or partition[i - 1] > partition[i]
    ]


def removable_rows(partition: Partition) -> List[int]:
    """Row indices whose last box can be removed, top to bottom."""
    return [
        i for i in range(len(partition))
        if i == len(partition) - 1 or partition[i] > partition[i + 1]
    ]


def add_box(partition: Partition, row: int) -> Partition:
    parts = list(partition)
    if row == len(parts):
        parts.append(1)
    else:
        parts[row] += 1
    return Partition(parts)


def remove_box(partition: Partition, row: int) -> Partition:
    parts = list(partition)
    parts[row] -= 1
    if parts[row] == 0:
        parts.pop()
    return Partition(parts)


def up_neighbors(partition: Partition) -> List[Partition]:
    """Partitions of n+1 covering ``partition`` in the Young lattice, canonical order."""
    partition = Partition(partition)
    return [add_box(partition, row) for row in addable_rows(partition)]


def down_neighbors(partition: Partition) -> List[Partition]:
    """Partitions of n-1 covered by ``partition``, canonical order."""
    partition = Partition(partition)
    return sorted(
        (remove_box(partition, row) for row in removable_rows(partition)),
        reverse=True,
    )


def addition_ratio(partition: Partition, row: int) -> Tuple[int, int]:
    """
    dim(Lambda) / ((n+1) dim(lambda)) for Lambda = lambda plus a box in ``row``,
    returned as an integer pair (numerator, denominator).

    Only hooks in the new box's row and column change (each grows by one), so
    the ratio is prod h/(h+1) over those cells.
    """
    columns = conjugate(partition)
    c = partition[row] if row < len(partition) else 0
    hooks = [
        (partition[row] - j - 1) + (columns[j] - row - 1) + 1 for j in range(c)
    ]
    hooks.extend((partition[i] - c - 1) + (row - i - 1) + 1 for i in range(row))
    numerator = prod(hooks)
    denominator = prod(h + 1 for h in hooks)
    return numerator, denominator


def addition_probability(partition: Partition, row: int) -> Fraction:
    """Exact Plancherel-coherent probability of adding a box in ``row``."""
    numerator, denominator = addition_ratio(partition, row)
    return Fraction(numerator, denominator)


@lru_cache(maxsize=None)
def _path_count(lower: Partition, upper: Partition) -> int:
    if lower == upper:
        return 1
    if len(upper) < len(lower) or upper.n <= lower.n or not upper.contains(lower):
        return 0
    return sum(
        _path_count(lower, nu) for nu in down_neighbors(upper) if nu.contains(lower)
    )


def path_count(lower: Partition, upper: Partition) -> int:
    """
    dim(upper/lower): the number of box-addition chains from ``lower`` to ``upper``.

    Zero when ``lower`` is not contained in ``upper``; equals dimension(upper)
    when ``lower`` is empty. Memoized per (lower, upper) for the life of the process.
    """
    lower, upper = Partition(lower), Partition(upper)
    if lower.n > upper.n:
        raise ArgumentError(f"path_count needs |lower| <= |upper|, got {lower} and {upper}")
    return _path_count(lower, upper)
