"""
Exact irreducible characters of the symmetric groups, conjugacy-class data, and
the classical character identities (orthogonality, solution counting,
induction/restriction, branching) as executable checks.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import permutations, product
from math import comb, factorial, perm, prod
from typing import Dict, List, Sequence, Tuple

from plancherel_stein.config import Config
from plancherel_stein.errors import ArgumentError, ConsistencyError, ResourceLimitError
from plancherel_stein.logging_utils import get_logger
from plancherel_stein.models import CheckResult
from plancherel_stein.partitions import (
    Partition,
    conjugate,
    dimension,
    enumerate_partitions,
    path_count,
    up_neighbors,
)


logger = get_logger(__name__)


class Direction(str, Enum):
    """Which way the Young lattice is traversed first."""

    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class CycleType:
    """A partition of n read as the label of a conjugacy class of S_n."""

    partition: Partition

    def __post_init__(self):
        object.__setattr__(self, "partition", Partition(self.partition))

    @classmethod
    def of(cls, *cycles: int) -> "CycleType":
        return cls(Partition(sorted(cycles, reverse=True)))

    @classmethod
    def identity(cls, n: int) -> "CycleType":
        return cls(Partition([1] * n))

    @classmethod
    def transposition(cls, n: int) -> "CycleType":
        if n < 2:
            raise ArgumentError(f"S_{n} has no transpositions")
        return cls.of(2, *([1] * (n - 2)))

    @classmethod
    def three_cycle(cls, n: int) -> "CycleType":
        if n < 3:
            raise ArgumentError(f"S_{n} has no 3-cycles")
        return cls.of(3, *([1] * (n - 3)))

    @classmethod
    def double_transposition(cls, n: int) -> "CycleType":
        if n < 4:
            raise ArgumentError(f"S_{n} has no products of two disjoint transpositions")
        return cls.of(2, 2, *([1] * (n - 4)))

    @property
    def n(self) -> int:
        return self.partition.n

    @cached_property
    def multiplicities(self) -> Dict[int, int]:
        return self.partition.multiplicities()

    @cached_property
    def centralizer_order(self) -> int:
        return prod(j ** m * factorial(m) for j, m in self.multiplicities.items())

    @cached_property
    def class_size(self) -> int:
        size, remainder = divmod(factorial(self.n), self.centralizer_order)
        if remainder:
            raise ConsistencyError("class size", f"centralizer of {self} does not divide n!")
        return size

    @property
    def fixed_points(self) -> int:
        return self.multiplicities.get(1, 0)

    @property
    def sign(self) -> int:
        return -1 if (self.n - len(self.partition)) % 2 else 1

    @property
    def is_identity(self) -> bool:
        return self.fixed_points == self.n

    def __str__(self) -> str:
        return str(self.partition)


@lru_cache(maxsize=None)
def _murnaghan_nakayama(shape: Tuple[int, ...], cycles: Tuple[int, ...]) -> int:
    if not cycles:
        return 1 if not shape else 0
    length, rest = cycles[0], cycles[1:]
    size = len(shape)
    # beta-set (first-column hook lengths); a border strip of size `length`
    # is a bead moved from b down to an empty position b - length.
    beta = [shape[i] + size - 1 - i for i in range(size)]
    occupied = set(beta)
    total = 0
    for index, bead in enumerate(beta):
        target = bead - length
        if target < 0 or target in occupied:
            continue
        height = sum(1 for b in beta if target < b < bead)
        moved = sorted(beta[:index] + [target] + beta[index + 1:], reverse=True)
        smaller = tuple(p for p in (moved[i] - (size - 1 - i) for i in range(size)) if p > 0)
        value = _murnaghan_nakayama(smaller, rest)
        total += -value if height % 2 else value
    return total


def character(partition: Partition, cycle_type) -> int:
    """chi^lambda evaluated on the class with the given cycle type."""
    partition = Partition(partition)
    rho = cycle_type.partition if isinstance(cycle_type, CycleType) else Partition(cycle_type)
    if partition.n != rho.n:
        raise ArgumentError(f"character needs |lambda| = |rho|, got {partition} and {rho}")
    return _murnaghan_nakayama(tuple(partition), tuple(rho))


def frobenius_ratio(partition: Partition) -> Fraction:
    """chi^lambda(12)/dim(lambda) by Frobenius' row/column formula."""
    partition = Partition(partition)
    n = partition.n
    if n < 2:
        raise ArgumentError(f"frobenius_ratio needs n >= 2, got {n}")
    columns = conjugate(partition)
    numerator = sum(comb(p, 2) for p in partition) - sum(comb(q, 2) for q in columns)
    return Fraction(numerator, comb(n, 2))


@lru_cache(maxsize=None)
def class_data(n: int) -> Tuple[CycleType, ...]:
    """One CycleType per partition of n, canonical order."""
    if n < 1:
        raise ArgumentError(f"class_data needs n >= 1, got {n}")
    classes = tuple(CycleType(p) for p in enumerate_partitions(n))
    total = sum(c.class_size for c in classes)
    if total != factorial(n):
        raise ConsistencyError("class equation", f"class sizes sum to {total}, not {n}!")
    return classes


def character_table(n: int) -> Tuple[Tuple[Partition, ...], Tuple[CycleType, ...], List[List[int]]]:
    """Irreducibles (rows) by classes (columns), both in canonical order."""
    Config.require_enumerable(n, "character table")
    irreducibles = enumerate_partitions(n)
    classes = class_data(n)
    table = [[character(lam, c) for c in classes] for lam in irreducibles]
    return irreducibles, classes, table


def rising(base: int, k: int) -> int:
    """(base+1)(base+2)...(base+k)."""
    return perm(base + k, k)


def falling(base: int, k: int) -> int:
    """base(base-1)...(base-k+1); zero once a factor hits zero."""
    if base < 0:
        raise ArgumentError(f"falling factorial of negative base {base}")
    return perm(base, k)


def fixed_point_factor(cycle_type: CycleType, k: int, direction: Direction) -> int:
    if direction == Direction.UP:
        return rising(cycle_type.fixed_points, k)
    return falling(cycle_type.fixed_points, k)


def induced_restricted_character(
    partition: Partition, k: int, cycle_type: CycleType, direction: Direction
) -> int:
    """
    Character of Res Ind chi^lambda (direction up) or Ind Res chi^lambda
    (direction down) through S_{n+k} or S_{n-k}, evaluated at a class of S_n.
    """
    direction = Direction(direction)
    partition = Partition(partition)
    if k < 1:
        raise ArgumentError(f"k must be at least 1, got {k}")
    if direction == Direction.DOWN and k > partition.n:
        raise ArgumentError(f"cannot restrict S_{partition.n} to S_{partition.n - k}")
    return character(partition, cycle_type) * fixed_point_factor(cycle_type, k, direction)


def count_solutions(n: int, class_list: Sequence[CycleType], target: CycleType) -> int:
    """
    Number of tuples (g_1, ..., g_m), g_j in class_list[j], with g_1...g_m
    equal to a fixed element of the target class, by the character formula.
    """
    if not class_list:
        raise ArgumentError("count_solutions needs at least one class")
    for c in list(class_list) + [target]:
        if c.n != n:
            raise ArgumentError(f"class {c} is not a class of S_{n}")
    m = len(class_list)
    total = Fraction(0)
    for lam in enumerate_partitions(n):
        term = Fraction(prod(character(lam, c) for c in class_list) * character(lam, target))
        total += term / dimension(lam) ** (m - 1)
    value = total * prod(c.class_size for c in class_list) / factorial(n)
    if value.denominator != 1 or value < 0:
        raise ConsistencyError("solution count integrality", f"got {value} for {list(map(str, class_list))} -> {target}")
    return int(value)


def _cycle_type_of(permutation: Tuple[int, ...]) -> Partition:
    seen = [False] * len(permutation)
    lengths = []
    for start in range(len(permutation)):
        if seen[start]:
            continue
        length = 0
        point = start
        while not seen[point]:
            seen[point] = True
            point = permutation[point]
            length += 1
        lengths.append(length)
    return Partition(sorted(lengths, reverse=True))


def _representative(cycle_type: CycleType) -> Tuple[int, ...]:
    image = []
    start = 0
    for length in cycle_type.partition:
        image.extend(start + (i + 1) % length for i in range(length))
        start += length
    return tuple(image)


def count_solutions_by_enumeration(n: int, class_list: Sequence[CycleType], target: CycleType) -> int:
    """Brute-force oracle for count_solutions: multiply permutations directly."""
    if n > 6:
        raise ResourceLimitError("solution enumeration", n, 6)
    tuples = prod(c.class_size for c in class_list)
    if tuples > 5_000_000:
        raise ResourceLimitError("solution enumeration tuples", tuples, 5_000_000)
    members: Dict[Partition, List[Tuple[int, ...]]] = {}
    for p in permutations(range(n)):
        members.setdefault(_cycle_type_of(p), []).append(p)
    goal = _representative(target)
    count = 0
    for choice in product(*(members[c.partition] for c in class_list)):
        composed = tuple(range(n))
        for g in reversed(choice):
            composed = tuple(g[composed[i]] for i in range(n))
        if composed == goal:
            count += 1
    return count


def verify_orthogonality(n: int) -> CheckResult:
    """Column and row orthogonality of the character table, exactly."""
    Config.require_exact(n)
    irreducibles, classes, table = character_table(n)
    failures = []
    checked = 0
    for a, ca in enumerate(classes):
        for b, cb in enumerate(classes):
            checked += 1
            total = sum(row[a] * row[b] for row in table)
            expected = ca.centralizer_order if a == b else 0
            if total != expected:
                failures.append(f"columns {ca},{cb}: {total} != {expected}")
    for i, lam in enumerate(irreducibles):
        for j, mu in enumerate(irreducibles):
            checked += 1
            total = sum(c.class_size * table[i][x] * table[j][x] for x, c in enumerate(classes))
            expected = factorial(n) if i == j else 0
            if total != expected:
                failures.append(f"rows {lam},{mu}: {total} != {expected}")
    logger.debug(f"orthogonality n={n}: {checked} pairs, {len(failures)} failures")
    return CheckResult.from_failures(f"orthogonality n={n}", checked, failures)


def verify_identity_column(n: int) -> CheckResult:
    """chi^lambda(identity) = dim(lambda) and the sign character is (-1)^(n - cycles)."""
    failures = []
    identity = CycleType.identity(n)
    sign_rep = Partition([1] * n)
    checked = 0
    for lam in enumerate_partitions(n):
        checked += 1
        if character(lam, identity) != dimension(lam):
            failures.append(f"{lam}: chi(1) != dim")
    for c in class_data(n):
        checked += 1
        if character(sign_rep, c) != c.sign:
            failures.append(f"sign character at {c}")
    return CheckResult.from_failures(f"identity and sign columns n={n}", checked, failures)


def verify_conjugation_symmetry(n: int) -> CheckResult:
    """chi^lambda(rho) = sign(rho) chi^lambda'(rho)."""
    Config.require_exact(n)
    failures = []
    checked = 0
    for lam in enumerate_partitions(n):
        lam_t = conjugate(lam)
        for c in class_data(n):
            checked += 1
            if character(lam, c) != c.sign * character(lam_t, c):
                failures.append(f"{lam} at {c}")
    return CheckResult.from_failures(f"conjugation symmetry n={n}", checked, failures)


def branching_sum(lam: Partition, mu: Partition, k: int, direction: Direction) -> int:
    """Lattice side of the branching identity: sum over tau at level n +- k."""
    n = lam.n
    if direction == Direction.UP:
        return sum(path_count(lam, tau) * path_count(mu, tau) for tau in enumerate_partitions(n + k))
    return sum(path_count(tau, lam) * path_count(tau, mu) for tau in enumerate_partitions(n - k))


def character_sum(lam: Partition, mu: Partition, k: int, direction: Direction) -> Fraction:
    """Character side: (1/n!) sum_C |C| chi^mu(C) chi^lambda(C) times the fixed-point factor."""
    n = lam.n
    total = sum(
        c.class_size * character(mu, c) * character(lam, c) * fixed_point_factor(c, k, direction)
        for c in class_data(n)
    )
    return Fraction(total, factorial(n))


def verify_branching(n: int, k: int) -> CheckResult:
    """Both branching identities for every pair of partitions of n."""
    Config.require_exact(n)
    failures = []
    checked = 0
    directions = [Direction.UP] + ([Direction.DOWN] if k <= n else [])
    for direction in directions:
        for lam in enumerate_partitions(n):
            for mu in enumerate_partitions(n):
                checked += 1
                lattice = branching_sum(lam, mu, k, direction)
                chars = character_sum(lam, mu, k, direction)
                if lattice != chars:
                    failures.append(f"{direction.value} k={k} {lam},{mu}: {lattice} != {chars}")
    return CheckResult.from_failures(f"branching n={n} k={k}", checked, failures)


def parents(lam: Partition, mu: Partition) -> List[Partition]:
    """Partitions of n+1 covering both lambda and mu."""
    above_mu = set(up_neighbors(mu))
    return [p for p in up_neighbors(lam) if p in above_mu]


def verify_parents(n: int) -> CheckResult:
    """|parents(mu, lambda)| equals the k=1 character sum for every pair."""
    Config.require_exact(n)
    failures = []
    checked = 0
    for lam in enumerate_partitions(n):
        for mu in enumerate_partitions(n):
            checked += 1
            count = len(parents(lam, mu))
            chars = character_sum(lam, mu, 1, Direction.UP)
            if count != chars:
                failures.append(f"{lam},{mu}: {count} != {chars}")
    return CheckResult.from_failures(f"parents n={n}", checked, failures)


def verify_induced_restricted(n: int, k: int) -> CheckResult:
    """
    The fixed-point formula for Res Ind / Ind Res characters against the
    character of the branching decomposition sum_mu mult(mu) chi^mu.
    """
    Config.require_exact(n)
    failures = []
    checked = 0
    directions = [Direction.UP] + ([Direction.DOWN] if k <= n else [])
    for direction in directions:
        for lam in enumerate_partitions(n):
            multiplicity = {mu: branching_sum(lam, mu, k, direction) for mu in enumerate_partitions(n)}
            for c in class_data(n):
                checked += 1
                decomposed = sum(m * character(mu, c) for mu, m in multiplicity.items())
                formula = induced_restricted_character(lam, k, c, direction)
                if decomposed != formula:
                    failures.append(f"{direction.value} k={k} {lam} at {c}: {decomposed} != {formula}")
    return CheckResult.from_failures(f"induced/restricted characters n={n} k={k}", checked, failures)


def verify_solution_counts(n: int) -> CheckResult:
    """Character-formula solution counts against brute force, transposition tuples."""
    if n < 2:
        return CheckResult(name=f"solution counts n={n}", passed=True, checked=0)
    failures = []
    checked = 0
    t = CycleType.transposition(n)
    for m in (1, 2, 3):
        for target in class_data(n):
            checked += 1
            formula = count_solutions(n, [t] * m, target)
            brute = count_solutions_by_enumeration(n, [t] * m, target)
            if formula != brute:
                failures.append(f"m={m} -> {target}: {formula} != {brute}")
    return CheckResult.from_failures(f"solution counts n={n}", checked, failures)


def verify_frobenius(n: int) -> CheckResult:
    """Frobenius' formula equals chi(12)/dim from the character engine."""
    if n < 2:
        return CheckResult(name=f"frobenius formula n={n}", passed=True, checked=0)
    t = CycleType.transposition(n)
    failures = [
        str(lam) for lam in enumerate_partitions(n)
        if frobenius_ratio(lam) != Fraction(character(lam, t), dimension(lam))
    ]
    return CheckResult.from_failures(f"frobenius formula n={n}", len(enumerate_partitions(n)), failures)
