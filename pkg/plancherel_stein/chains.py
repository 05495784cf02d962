"""
Reversible Markov chains on partitions of n.

- updown(k): k coherent box additions, then k box removals (k=1 is the chain
  behind the exchangeable pair).
- downup(k): k removals, then k additions.
- kingman: one step up and one step down the Kingman lattice, stationary for
  the cycle type of a uniform random permutation.

Transition matrices are exact (``Fraction`` entries). Spectral claims are
checked by exact eigen-identities, never by numerical eigendecomposition.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import exp, factorial, floor, log, pi, sqrt
from typing import Dict, List, Sequence, Tuple, Union

import sympy

from plancherel_stein.characters import CycleType, character, class_data, falling, rising
from plancherel_stein.config import Config
from plancherel_stein.errors import ArgumentError, InvariantViolation
from plancherel_stein.logging_utils import get_logger
from plancherel_stein.models import CheckResult, ExperimentReport, MixingRow, SpectralEntry, exact_text, make_report
from plancherel_stein.partitions import (
    Partition,
    add_box,
    addition_ratio,
    dimension,
    enumerate_partitions,
    kingman_dimension,
    path_count,
    remove_box,
    removable_rows,
    up_neighbors,
)
from plancherel_stein.plancherel import ExactDist, growth_step, plancherel_dist
from plancherel_stein.rng import SeededStream


logger = get_logger(__name__)

Number = Union[Fraction, float]


class ChainKind(str, Enum):
    UPDOWN = "updown"
    DOWNUP = "downup"
    KINGMAN = "kingman"


@dataclass(frozen=True)
class ChainSpec:
    """Which chain, on which level n, moving k levels."""

    n: int
    kind: ChainKind
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", ChainKind(self.kind))
        if self.n < 1:
            raise ArgumentError(f"chains live on partitions of n >= 1, got n={self.n}")
        if self.k < 1:
            raise ArgumentError(f"k must be at least 1, got {self.k}")
        if self.kind == ChainKind.DOWNUP and self.k > self.n:
            raise ArgumentError(f"downup(k) needs k <= n, got k={self.k}, n={self.n}")
        if self.kind == ChainKind.KINGMAN and self.k != 1:
            raise ArgumentError("the Kingman chain moves one level (k=1)")

    def __str__(self) -> str:
        if self.kind == ChainKind.KINGMAN:
            return f"kingman(n={self.n})"
        return f"{self.kind.value}({self.k}, n={self.n})"


# --- single-level moves -------------------------------------------------------

def restriction_probability(partition: Partition, row: int) -> Fraction:
    """dim(mu)/dim(Lambda) for mu = Lambda minus the last box of ``row``."""
    smaller = remove_box(partition, row)
    numerator, denominator = addition_ratio(smaller, row)
    return Fraction(denominator, numerator * partition.n)


def restriction_probabilities(partition: Partition) -> Tuple[List[Partition], List[float]]:
    """Down-neighbors of Lambda with their coherent probabilities as floats."""
    targets, weights = [], []
    size = partition.n
    for row in removable_rows(partition):
        smaller = remove_box(partition, row)
        numerator, denominator = addition_ratio(smaller, row)
        targets.append(smaller)
        weights.append(denominator / (numerator * size))
    return targets, weights


def restriction_step(partition: Partition, rng: SeededStream) -> Partition:
    targets, weights = restriction_probabilities(partition)
    return targets[rng.choose(weights)]


def updown_step(partition: Partition, rng: SeededStream, k: int = 1) -> Partition:
    """k coherent additions followed by k coherent removals."""
    partition = Partition(partition)
    if partition.n < 1:
        raise ArgumentError("updown_step needs a non-empty partition")
    for _ in range(k):
        partition = growth_step(partition, rng)
    for _ in range(k):
        partition = restriction_step(partition, rng)
    return partition


def downup_step(partition: Partition, k: int, rng: SeededStream) -> Partition:
    """k coherent removals followed by k coherent additions."""
    partition = Partition(partition)
    if k < 1 or k > partition.n:
        raise ArgumentError(f"downup_step needs 1 <= k <= n, got k={k}, n={partition.n}")
    for _ in range(k):
        partition = restriction_step(partition, rng)
    for _ in range(k):
        partition = growth_step(partition, rng)
    return partition


def _kingman_additions(partition: Partition) -> Dict[Partition, Fraction]:
    size = partition.n + 1
    moves = {add_box(partition, len(partition)): Fraction(1, size)}
    for length, count in partition.multiplicities().items():
        row = partition.index(length)
        moves[add_box(partition, row)] = Fraction(length * count, size)
    return moves


def _kingman_removals(partition: Partition) -> Dict[Partition, Fraction]:
    size = partition.n
    moves = {}
    for length, count in partition.multiplicities().items():
        row = len(partition) - 1 - partition[::-1].index(length)
        moves[remove_box(partition, row)] = Fraction(length * count, size)
    return moves


def kingman_row(partition: Partition) -> Dict[Partition, Fraction]:
    """Exact one-step law of the Kingman chain from ``partition``."""
    row: Dict[Partition, Fraction] = {}
    for bigger, p_up in _kingman_additions(partition).items():
        for smaller, p_down in _kingman_removals(bigger).items():
            row[smaller] = row.get(smaller, Fraction(0)) + p_up * p_down
    return row


def _draw(moves: Dict[Partition, Fraction], rng: SeededStream) -> Partition:
    targets = list(moves)
    return targets[rng.choose([float(moves[t]) for t in targets])]


def kingman_step(partition: Partition, rng: SeededStream) -> Partition:
    """Add a box to a row of length r w.p. r m_r/(n+1) (new row 1/(n+1)), then remove one."""
    partition = Partition(partition)
    if partition.n < 1:
        raise ArgumentError("kingman_step needs a non-empty partition")
    bigger = _draw(_kingman_additions(partition), rng)
    return _draw(_kingman_removals(bigger), rng)


def chain_step(spec: ChainSpec, partition: Partition, rng: SeededStream) -> Partition:
    if spec.kind == ChainKind.UPDOWN:
        return updown_step(partition, rng, spec.k)
    if spec.kind == ChainKind.DOWNUP:
        return downup_step(partition, spec.k, rng)
    return kingman_step(partition, rng)


# --- exact matrices -----------------------------------------------------------

@lru_cache(maxsize=None)
def cycle_type_law(n: int) -> ExactDist:
    """Cycle type of a uniform random permutation: 1/prod j^m_j m_j!."""
    return ExactDist(
        n=n,
        probabilities={c.partition: Fraction(1, c.centralizer_order) for c in class_data(n)},
    )


def stationary_distribution(spec: ChainSpec) -> ExactDist:
    if spec.kind == ChainKind.KINGMAN:
        return cycle_type_law(spec.n)
    return plancherel_dist(spec.n)


def updown_probability(lam: Partition, mu: Partition, k: int) -> Fraction:
    """dim(mu)/((n+1)...(n+k) dim(lam)) sum_{|tau|=n+k} dim(tau/lam) dim(tau/mu)."""
    n = lam.n
    paths = sum(path_count(lam, tau) * path_count(mu, tau) for tau in enumerate_partitions(n + k))
    return Fraction(dimension(mu) * paths, rising(n, k) * dimension(lam))


def downup_probability(lam: Partition, mu: Partition, k: int) -> Fraction:
    """dim(mu)/(n(n-1)...(n-k+1) dim(lam)) sum_{|tau|=n-k} dim(lam/tau) dim(mu/tau)."""
    n = lam.n
    paths = sum(path_count(tau, lam) * path_count(tau, mu) for tau in enumerate_partitions(n - k))
    return Fraction(dimension(mu) * paths, falling(n, k) * dimension(lam))


@dataclass(frozen=True)
class TransitionMatrix:
    """Exact transition matrix indexed by partitions of n in canonical order."""

    spec: ChainSpec
    states: Tuple[Partition, ...]
    entries: Tuple[Tuple[Fraction, ...], ...]
    index: Dict[Partition, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {lam: i for i, lam in enumerate(self.states)})

    def __getitem__(self, key: Tuple[Partition, Partition]) -> Fraction:
        lam, mu = key
        return self.entries[self.index[Partition(lam)]][self.index[Partition(mu)]]

    def row(self, partition: Partition) -> Tuple[Fraction, ...]:
        return self.entries[self.index[Partition(partition)]]

    def apply(self, values: Sequence[Number]) -> List[Number]:
        """(J f)(x) = sum_y J(x, y) f(y)."""
        return [sum((p * v for p, v in zip(row, values) if p), Fraction(0)) for row in self.entries]

    def propagate(self, distribution: Sequence[Number]) -> List[Number]:
        """(p J)(y) = sum_x p(x) J(x, y)."""
        size = len(self.states)
        out = [Fraction(0)] * size
        for x, mass in enumerate(distribution):
            if not mass:
                continue
            for y, p in enumerate(self.entries[x]):
                if p:
                    out[y] += mass * p
        return out

    def power_row(self, start: Partition, r: int) -> List[Fraction]:
        row = [Fraction(0)] * len(self.states)
        row[self.index[Partition(start)]] = Fraction(1)
        for _ in range(r):
            row = self.propagate(row)
        return row

    def power(self, r: int) -> List[List[Fraction]]:
        return [self.power_row(lam, r) for lam in self.states]

    def to_json_dict(self) -> dict:
        return {
            "chain": str(self.spec),
            "kind": self.spec.kind.value,
            "n": self.spec.n,
            "k": self.spec.k,
            "states": [str(lam) for lam in self.states],
            "entries": [[exact_text(p) for p in row] for row in self.entries],
        }


def matrix_failures(matrix: TransitionMatrix, stationary: ExactDist) -> List[str]:
    """Row sums, non-negativity and exact reversibility."""
    failures = []
    states = matrix.states
    for i, lam in enumerate(states):
        row = matrix.entries[i]
        if sum(row) != 1:
            failures.append(f"row {lam} sums to {sum(row)}")
        if any(p < 0 for p in row):
            failures.append(f"row {lam} has a negative entry")
        for j in range(i + 1, len(states)):
            mu = states[j]
            if stationary[lam] * row[j] != stationary[mu] * matrix.entries[j][i]:
                failures.append(f"reversibility {lam},{mu}")
    return failures


@lru_cache(maxsize=128)
def transition_matrix(spec: ChainSpec) -> TransitionMatrix:
    """Exact matrix for ``spec``; row sums and reversibility are asserted."""
    Config.require_matrix(spec.n + (spec.k if spec.kind == ChainKind.UPDOWN else 0))
    states = enumerate_partitions(spec.n)
    if spec.kind == ChainKind.UPDOWN:
        entries = tuple(tuple(updown_probability(lam, mu, spec.k) for mu in states) for lam in states)
    elif spec.kind == ChainKind.DOWNUP:
        entries = tuple(tuple(downup_probability(lam, mu, spec.k) for mu in states) for lam in states)
    else:
        rows = [kingman_row(lam) for lam in states]
        entries = tuple(tuple(row.get(mu, Fraction(0)) for mu in states) for row in rows)
    matrix = TransitionMatrix(spec=spec, states=states, entries=entries)
    failures = matrix_failures(matrix, stationary_distribution(spec))
    if failures:
        raise InvariantViolation(f"{spec} is a reversible stochastic matrix", "; ".join(failures[:5]))
    logger.debug(f"built {spec}: {len(states)} states")
    return matrix


# --- coherent families on two lattices ---------------------------------------

class YoungLattice:
    """Young lattice, unit edge multiplicities, Plancherel measures."""

    name = "young"

    @staticmethod
    def kappa(lam: Partition, big: Partition) -> int:
        return 1 if big in up_neighbors(lam) else 0

    @staticmethod
    def dim(lam: Partition) -> int:
        return dimension(lam)

    @staticmethod
    def measure(n: int) -> ExactDist:
        return plancherel_dist(n)


class KingmanLattice:
    """
    Kingman lattice: same vertices and edges, multiplicity = number of rows of
    length j in Lambda when lambda is Lambda minus a box from a row of length j.
    """

    name = "kingman"

    @staticmethod
    def kappa(lam: Partition, big: Partition) -> int:
        if big not in up_neighbors(lam):
            return 0
        grown = dict(big.multiplicities())
        for length, count in lam.multiplicities().items():
            grown[length] = grown.get(length, 0) - count
        (length,) = [j for j, c in grown.items() if c > 0]
        return big.multiplicities()[length]

    @staticmethod
    def dim(lam: Partition) -> int:
        return kingman_dimension(lam)

    @staticmethod
    def measure(n: int) -> ExactDist:
        return cycle_type_law(n)


LATTICES = {"young": YoungLattice, "kingman": KingmanLattice}


def verify_coherence(lattice, n: int) -> CheckResult:
    """M_n(lam) = sum_Lambda dim(lam) kappa(lam, Lambda)/dim(Lambda) M_{n+1}(Lambda)."""
    Config.require_exact(n)
    lower, upper = lattice.measure(n), lattice.measure(n + 1)
    failures = []
    for lam in lower.states:
        total = sum(
            Fraction(lattice.dim(lam) * lattice.kappa(lam, big), lattice.dim(big)) * upper[big]
            for big in up_neighbors(lam)
        )
        if total != lower[lam]:
            failures.append(f"{lam}: {total} != {lower[lam]}")
    return CheckResult.from_failures(f"coherence {lattice.name} n={n}", len(lower.states), failures)


def coherent_updown_matrix(lattice, n: int) -> List[List[Fraction]]:
    """
    J(lam, mu) = dim(lam) dim(mu)/M_n(lam) sum_Lambda M_{n+1}(Lambda)
    kappa(lam, Lambda) kappa(mu, Lambda)/dim(Lambda)^2.
    """
    Config.require_matrix(n + 1)
    lower, upper = lattice.measure(n), lattice.measure(n + 1)
    states = enumerate_partitions(n)
    matrix = []
    for lam in states:
        row = []
        above = up_neighbors(lam)
        for mu in states:
            total = Fraction(0)
            for big in above:
                weight = lattice.kappa(lam, big) * lattice.kappa(mu, big)
                if weight:
                    total += upper[big] * Fraction(weight, lattice.dim(big) ** 2)
            row.append(total * lattice.dim(lam) * lattice.dim(mu) / lower[lam])
        matrix.append(row)
    return matrix


def verify_coherent_construction(n: int) -> List[CheckResult]:
    """The general up-then-down formula reproduces the updown(1) and Kingman matrices."""
    checks = []
    for lattice, spec in ((YoungLattice, ChainSpec(n, ChainKind.UPDOWN, 1)), (KingmanLattice, ChainSpec(n, ChainKind.KINGMAN))):
        general = coherent_updown_matrix(lattice, n)
        closed = transition_matrix(spec)
        failures = [
            f"{lam},{mu}"
            for i, lam in enumerate(closed.states)
            for j, mu in enumerate(closed.states)
            if general[i][j] != closed.entries[i][j]
        ]
        checks.append(CheckResult.from_failures(
            f"coherent construction = {spec}", len(closed.states) ** 2, failures
        ))
    return checks


# --- spectra -----------------------------------------------------------------

def eigenvalue(spec: ChainSpec, cycle_type: CycleType) -> Fraction:
    """Falling-factorial ratio (downup) or rising-factorial ratio (updown)."""
    n1 = cycle_type.fixed_points
    if spec.kind == ChainKind.DOWNUP:
        return Fraction(falling(n1, spec.k), falling(spec.n, spec.k))
    if spec.kind == ChainKind.UPDOWN:
        return Fraction(rising(n1, spec.k), rising(spec.n, spec.k))
    raise ArgumentError("no closed-form spectrum for the Kingman chain")


def second_eigenvalue(spec: ChainSpec) -> Fraction:
    """beta = max |theta(C)| over non-identity classes (zero when n = 1)."""
    values = [abs(eigenvalue(spec, c)) for c in class_data(spec.n) if not c.is_identity]
    return max(values, default=Fraction(0))


def downup_beta(n: int, k: int) -> Fraction:
    """(n-k)(n-k-1)/(n(n-1)) for the downup(k) chain."""
    return Fraction((n - k) * (n - k - 1), n * (n - 1))


@dataclass
class Eigenpair:
    """theta(C) with psi_C = |C|^(1/2) * ratios, the square root kept symbolic."""

    cycle_type: CycleType
    eigenvalue: Fraction
    ratios: Tuple[Fraction, ...]
    eigen_identity: bool = True
    orthonormal: bool = True

    @property
    def class_size(self) -> int:
        return self.cycle_type.class_size

    def psi_product(self, x: int, y: int) -> Fraction:
        """psi_C(x) psi_C(y), rational because |C|^(1/2) appears twice."""
        return self.class_size * self.ratios[x] * self.ratios[y]


@dataclass
class SpectralCertificate:
    spec: ChainSpec
    states: Tuple[Partition, ...]
    eigenpairs: List[Eigenpair]
    beta: Fraction
    rank: int
    failures: List[str]

    @property
    def valid(self) -> bool:
        return not self.failures

    def entries(self) -> List[SpectralEntry]:
        return [
            SpectralEntry(
                cycle_type=str(pair.cycle_type),
                class_size=str(pair.class_size),
                eigenvalue=exact_text(pair.eigenvalue),
                eigen_identity=pair.eigen_identity,
                orthonormal=pair.orthonormal,
            )
            for pair in self.eigenpairs
        ]


def eigenfunction_rank(states: Sequence[Partition], pairs: Sequence[Eigenpair]) -> int:
    """Exact rank of the matrix whose rows are the psi_C (up to the |C|^(1/2) scale)."""
    matrix = sympy.Matrix([[sympy.Rational(r.numerator, r.denominator) for r in pair.ratios] for pair in pairs])
    return int(matrix.rank())


def spectral_certificate(spec: ChainSpec) -> SpectralCertificate:
    """
    Check exactly that J psi_C = theta(C) psi_C for every class C, that the psi_C
    are orthonormal in l2(pi), that they span (rank p(n)), and that the identity
    class gives theta = 1 and psi = 1.
    """
    matrix = transition_matrix(spec)
    pi_dist = stationary_distribution(spec)
    states = matrix.states
    weights = pi_dist.vector(states)
    failures: List[str] = []
    pairs: List[Eigenpair] = []
    for c in class_data(spec.n):
        ratios = tuple(Fraction(character(lam, c), dimension(lam)) for lam in states)
        theta = eigenvalue(spec, c)
        pair = Eigenpair(cycle_type=c, eigenvalue=theta, ratios=ratios)
        applied = matrix.apply(ratios)
        for lam, lhs, r in zip(states, applied, ratios):
            if lhs != theta * r:
                pair.eigen_identity = False
                failures.append(f"eigen-identity at class {c}, state {lam}")
                break
        if not -1 <= theta <= 1:
            failures.append(f"eigenvalue {theta} of class {c} outside [-1, 1]")
        if c.is_identity and (theta != 1 or any(r != 1 for r in ratios)):
            failures.append("identity class must give theta = 1 and psi = 1")
        pairs.append(pair)
    for a, pa in enumerate(pairs):
        for b in range(a, len(pairs)):
            pb = pairs[b]
            inner = sum((w * x * y for w, x, y in zip(weights, pa.ratios, pb.ratios)), Fraction(0))
            expected = Fraction(1, pa.class_size) if a == b else Fraction(0)
            if inner != expected:
                pa.orthonormal = pb.orthonormal = False
                failures.append(f"orthonormality {pa.cycle_type},{pb.cycle_type}")
    rank = eigenfunction_rank(states, pairs)
    if rank != len(states):
        failures.append(f"eigenfunctions span rank {rank}, expected {len(states)}")
    beta = second_eigenvalue(spec)
    if spec.kind == ChainKind.DOWNUP and spec.n >= 2 and beta != downup_beta(spec.n, spec.k):
        failures.append(f"beta {beta} != (n-k)(n-k-1)/(n(n-1))")
    return SpectralCertificate(spec=spec, states=states, eigenpairs=pairs, beta=beta, rank=rank, failures=failures)


def spectral_expansion_check(spec: ChainSpec, r: int) -> CheckResult:
    """
    J^r(x, y) = sum_C theta(C)^r psi_C(x) psi_C(y) pi(y) for all x, y, and
    ||J^r_x/pi - 1||^2 = sum_{C != id} theta(C)^(2r) psi_C(x)^2, exactly.
    """
    matrix = transition_matrix(spec)
    pi_dist = stationary_distribution(spec)
    certificate = spectral_certificate(spec)
    states = matrix.states
    weights = pi_dist.vector(states)
    failures = []
    powered = matrix.power(r)
    for x, lam in enumerate(states):
        for y, mu in enumerate(states):
            expansion = sum(
                (pair.eigenvalue ** r * pair.psi_product(x, y) for pair in certificate.eigenpairs),
                Fraction(0),
            ) * weights[y]
            if expansion != powered[x][y]:
                failures.append(f"J^{r}({lam},{mu})")
        spectral_l2 = sum(
            (pair.eigenvalue ** (2 * r) * pair.psi_product(x, x)
             for pair in certificate.eigenpairs if not pair.cycle_type.is_identity),
            Fraction(0),
        )
        if spectral_l2 != l2_distance_squared(powered[x], weights):
            failures.append(f"L2 expansion from {lam}")
    return CheckResult.from_failures(f"spectral expansion {spec} r={r}", len(states) ** 2, failures)


# --- distances and mixing -----------------------------------------------------

def _aligned(p: Sequence[Number], q: Sequence[Number]) -> None:
    if len(p) != len(q):
        raise ArgumentError(f"distributions on different supports ({len(p)} vs {len(q)} states)")


def tv_distance(p: Sequence[Number], q: Sequence[Number]) -> Number:
    """(1/2) sum_y |p(y) - q(y)|; exact when both inputs are exact."""
    _aligned(p, q)
    return sum((abs(a - b) for a, b in zip(p, q)), Fraction(0)) / 2


def l2_distance_squared(p: Sequence[Number], stationary: Sequence[Number]) -> Number:
    """sum_y |p(y)/pi(y) - 1|^2 pi(y); exact when both inputs are exact."""
    _aligned(p, stationary)
    if any(w == 0 for w in stationary):
        raise ArgumentError("stationary distribution has a zero entry")
    return sum(((a / w - 1) ** 2 * w for a, w in zip(p, stationary)), Fraction(0))


def l2_distance(p: Sequence[Number], stationary: Sequence[Number]) -> float:
    """||p/pi - 1||_2, asserting 2 TV(p, pi) <= L2 on every call."""
    squared = l2_distance_squared(p, stationary)
    twice_tv = 2 * tv_distance(p, stationary)
    if isinstance(squared, Fraction) and isinstance(twice_tv, Fraction):
        holds = twice_tv ** 2 <= squared
    else:
        holds = float(twice_tv) <= sqrt(float(squared)) + 1e-12
    if not holds:
        raise InvariantViolation("2 TV <= L2", f"2TV={float(twice_tv)}, L2^2={float(squared)}")
    return sqrt(float(squared))


def mixing_threshold(n: int, beta: Fraction, c: float) -> float:
    """(n log n + 2c) / (2 log(1/beta)); zero when beta = 0."""
    if beta == 0:
        return 0.0
    return (n * log(n) + 2 * c) / (2 * log(1 / float(beta)))


def mixing_guarantee(c: float) -> float:
    """TV bound (2 pi)^(1/4)/2 e^(-c) past the threshold."""
    return (2 * pi) ** 0.25 / 2 * exp(-c)


def mixing_report(
    n: int, k: int, r_max: int, cs: Sequence[float] = (1.0, 2.0, 4.0), target: float = 0.01
) -> ExperimentReport:
    """
    Exact distance to Plancherel measure of downup(k) started from the one-row
    partition (n), for r = 0..r_max, against sqrt(n!) beta^r and the threshold
    guarantee.
    """
    if n < 3 or not 1 <= k < n:
        raise ArgumentError(f"mixing bounds need n >= 3 and 1 <= k < n, got n={n}, k={k}")
    spec = ChainSpec(n, ChainKind.DOWNUP, k)
    matrix = transition_matrix(spec)
    weights = plancherel_dist(n).vector(matrix.states)
    start = Partition([n])
    x = matrix.index[start]
    beta = downup_beta(n, k)
    n_factorial = factorial(n)
    start_factor = (1 - weights[x]) / weights[x]

    rows: List[MixingRow] = []
    assertions: Dict[str, bool] = {
        "bound_every_r": True,
        "start_bound_every_r": True,
        "tv_below_l2": True,
        "tv_monotone": True,
        "tv_at_zero": True,
    }
    tvs: List[Fraction] = []
    distribution = [Fraction(0)] * len(matrix.states)
    distribution[x] = Fraction(1)
    for r in range(r_max + 1):
        if r:
            distribution = matrix.propagate(distribution)
        tv = tv_distance(distribution, weights)
        squared = l2_distance_squared(distribution, weights)
        bound_squared = n_factorial * beta ** (2 * r)
        bound_holds = squared <= bound_squared
        assertions["bound_every_r"] &= bound_holds
        assertions["start_bound_every_r"] &= squared <= start_factor * beta ** (2 * r)
        assertions["tv_below_l2"] &= (2 * tv) ** 2 <= squared
        if tvs and tv > tvs[-1]:
            assertions["tv_monotone"] = False
        tvs.append(tv)
        rows.append(MixingRow(
            r=r,
            tv=exact_text(tv),
            tv_float=float(tv),
            l2_squared=exact_text(squared),
            l2=sqrt(float(squared)),
            bound=sqrt(n_factorial) * float(beta) ** r,
            bound_holds=bound_holds,
        ))
    assertions["tv_at_zero"] = tvs[0] == 1 - Fraction(1, n_factorial)

    thresholds = []
    for c in cs:
        r_star = mixing_threshold(n, beta, c)
        first_past = floor(r_star) + 1
        entry = {"c": c, "r_star": r_star, "first_r_past": first_past, "guarantee": mixing_guarantee(c)}
        if first_past <= r_max:
            entry["tv"] = float(tvs[first_past])
            entry["holds"] = bool(float(tvs[first_past]) <= entry["guarantee"])
            assertions[f"threshold_c={c:g}"] = entry["holds"]
        thresholds.append(entry)

    first_below = next((r for r, tv in enumerate(tvs) if tv < target), None)
    c_target = log((2 * pi) ** 0.25 / 2 / target)
    r_star_target = mixing_threshold(n, beta, c_target)
    if first_below is not None:
        assertions["first_below_target_within_threshold"] = first_below <= floor(r_star_target) + 1
    elif floor(r_star_target) + 1 <= r_max:
        assertions["first_below_target_within_threshold"] = False

    logger.info(f"mixing {spec}: r_max={r_max}, first r with TV<{target}: {first_below}")
    return make_report(
        command="mix",
        parameters={"n": n, "k": k, "r_max": r_max},
        results={
            "chain": str(spec),
            "start": str(start),
            "beta": exact_text(beta),
            "rows": [row.model_dump() for row in rows],
            "thresholds": thresholds,
            "target": target,
            "first_r_below_target": first_below,
            "r_star_at_target": r_star_target,
        },
        assertions=assertions,
    )


def step_frequency_check(spec: ChainSpec, start: Partition, steps: int, rng: SeededStream, sigmas: float = 4.0) -> CheckResult:
    """Monte Carlo one-step frequencies from ``start`` against the exact matrix row."""
    matrix = transition_matrix(spec)
    counts = {lam: 0 for lam in matrix.states}
    for _ in range(steps):
        counts[chain_step(spec, start, rng)] += 1
    failures = []
    for lam in matrix.states:
        p = float(matrix[start, lam])
        tolerance = sigmas * sqrt(p * (1 - p) / steps) + 1e-12
        if abs(counts[lam] / steps - p) > tolerance:
            failures.append(f"{lam}: {counts[lam] / steps:.5f} vs {p:.5f}")
    return CheckResult.from_failures(f"one-step frequencies {spec} from {start}", steps, failures)


def verify_chains(n: int, ks: Sequence[int] = (1, 2, 3), spectral_ks: Sequence[int] = (1, 2)) -> List[CheckResult]:
    """Exact checks for every chain on partitions of n."""
    Config.require_exact(n)
    checks: List[CheckResult] = []
    specs = [ChainSpec(n, ChainKind.KINGMAN)]
    for k in ks:
        specs.append(ChainSpec(n, ChainKind.UPDOWN, k))
        if k <= n:
            specs.append(ChainSpec(n, ChainKind.DOWNUP, k))
    for spec in specs:
        try:
            matrix = transition_matrix(spec)
            checks.append(CheckResult(name=f"reversible stochastic {spec}", passed=True, checked=len(matrix.states) ** 2))
        except InvariantViolation as exc:
            checks.append(CheckResult(name=f"reversible stochastic {spec}", passed=False, failures=[str(exc)]))
    for lattice in (YoungLattice, KingmanLattice):
        checks.append(verify_coherence(lattice, n))
    checks.extend(verify_coherent_construction(n))
    for k in spectral_ks:
        for kind in (ChainKind.UPDOWN, ChainKind.DOWNUP):
            if kind == ChainKind.DOWNUP and k > n:
                continue
            spec = ChainSpec(n, kind, k)
            certificate = spectral_certificate(spec)
            checks.append(CheckResult.from_failures(
                f"spectral certificate {spec}",
                len(certificate.eigenpairs),
                certificate.failures,
                beta=exact_text(certificate.beta),
                rank=certificate.rank,
            ))
    checks.append(spectral_expansion_check(ChainSpec(n, ChainKind.DOWNUP, 1), 3))
    return checks
