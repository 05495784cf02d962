"""
Multiplicities of irreducibles in tensor powers of the permutation module
Ind_{S_(n-k)}^{S_n}(1), and how fast they equidistribute toward
dim(lambda) ((n)_k)^r / n!.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, floor, log, pi, sqrt, exp
from typing import Dict, List, Optional

from plancherel_stein.chains import ChainKind, ChainSpec, downup_beta, transition_matrix
from plancherel_stein.characters import character, class_data, falling
from plancherel_stein.config import Config
from plancherel_stein.errors import ArgumentError, ConsistencyError
from plancherel_stein.logging_utils import get_logger
from plancherel_stein.models import CheckResult, ExperimentReport, TensorRow, exact_text, make_report
from plancherel_stein.partitions import Partition, dimension, down_neighbors, enumerate_partitions
from plancherel_stein.plancherel import plancherel_dist


logger = get_logger(__name__)


@dataclass(frozen=True)
class MultiplicityVector:
    """mult(lambda) in the r-th tensor power of Ind_{S_(n-k)}^{S_n}(1)."""

    n: int
    k: int
    r: int
    multiplicities: Dict[Partition, int]

    def __getitem__(self, partition: Partition) -> int:
        return self.multiplicities.get(Partition(partition), 0)

    def total_dimension(self) -> int:
        return sum(m * dimension(lam) for lam, m in self.multiplicities.items())

    def normalized(self, partition: Partition) -> Fraction:
        """n! mult(lambda) / (dim(lambda) ((n)_k)^r); equals 1 at perfect equidistribution."""
        return Fraction(factorial(self.n) * self[partition], dimension(partition) * falling(self.n, self.k) ** self.r)


def _check_parameters(n: int, k: int, r: int) -> None:
    if not 1 <= k < n:
        raise ArgumentError(f"tensor powers need 1 <= k < n, got n={n}, k={k}")
    if r < 0:
        raise ArgumentError(f"r must be non-negative, got {r}")
    Config.require_enumerable(n, "tensor multiplicities")


def tensor_multiplicities(n: int, k: int, r: int) -> MultiplicityVector:
    """(1/n!) sum_C |C| ((n_1(C))_k)^r chi^lambda(C), as exact integers."""
    _check_parameters(n, k, r)
    classes = class_data(n)
    weights = [c.class_size * falling(c.fixed_points, k) ** r for c in classes]
    n_factorial = factorial(n)
    multiplicities = {}
    for lam in enumerate_partitions(n):
        total = sum(w * character(lam, c) for w, c in zip(weights, classes) if w)
        value, remainder = divmod(total, n_factorial)
        if remainder or value < 0:
            raise ConsistencyError("tensor multiplicity is a non-negative integer", f"{lam}: {Fraction(total, n_factorial)}")
        multiplicities[lam] = value
    vector = MultiplicityVector(n=n, k=k, r=r, multiplicities=multiplicities)
    expected = falling(n, k) ** r
    if vector.total_dimension() != expected:
        raise ConsistencyError("sum mult * dim = ((n)_k)^r", f"n={n}, k={k}, r={r}")
    return vector


def _common_down_neighbors(lam: Partition, mu: Partition) -> int:
    below = set(down_neighbors(mu))
    return sum(1 for tau in down_neighbors(lam) if tau in below)


def tensor_multiplicities_by_recursion(n: int, k: int, r: int) -> MultiplicityVector:
    """m_{t+1}(mu) = sum_lambda m_t(lambda) * #{common down-neighbors of lambda and mu}; k must be 1."""
    if k != 1:
        raise ArgumentError(f"the lattice recursion handles k = 1 only, got k={k}")
    _check_parameters(n, k, r)
    states = enumerate_partitions(n)
    weights = {(lam, mu): _common_down_neighbors(lam, mu) for lam in states for mu in states}
    current = {lam: 0 for lam in states}
    current[Partition([n])] = 1
    for _ in range(r):
        current = {
            mu: sum(m * weights[lam, mu] for lam, m in current.items() if m)
            for mu in states
        }
    return MultiplicityVector(n=n, k=k, r=r, multiplicities=current)


def multiplicities_via_chain(n: int, k: int, r: int) -> MultiplicityVector:
    """mult(lambda) = J(k)^r((n), lambda) ((n)_k)^r / dim(lambda) for the downup(k) chain."""
    _check_parameters(n, k, r)
    matrix = transition_matrix(ChainSpec(n, ChainKind.DOWNUP, k))
    row = matrix.power_row(Partition([n]), r)
    scale = falling(n, k) ** r
    multiplicities = {}
    for lam, p in zip(matrix.states, row):
        value = p * scale / dimension(lam)
        if value.denominator != 1:
            raise ConsistencyError("chain multiplicity is an integer", f"{lam}: {value}")
        multiplicities[lam] = int(value)
    return MultiplicityVector(n=n, k=k, r=r, multiplicities=multiplicities)


def deviation(vector: MultiplicityVector) -> Fraction:
    """sum_lambda pi(lambda) |normalized(lambda) - 1|^2, exactly."""
    dist = plancherel_dist(vector.n)
    return sum(
        (p * (vector.normalized(lam) - 1) ** 2 for lam, p in dist.probabilities.items()),
        Fraction(0),
    )


def deviation_bound(n: int, k: int, r: int) -> Fraction:
    """n! beta^(2r)."""
    return factorial(n) * downup_beta(n, k) ** (2 * r)


def tensor_threshold(n: int, k: int, c: float) -> float:
    """(n log n + c) / (2 log(1/beta)); zero when beta = 0."""
    beta = downup_beta(n, k)
    if beta == 0:
        return 0.0
    return (n * log(n) + c) / (2 * log(1 / float(beta)))


def _rows(vector: MultiplicityVector) -> List[TensorRow]:
    return [
        TensorRow(
            partition=str(lam),
            multiplicity=str(m),
            dimension=str(dimension(lam)),
            normalized=exact_text(vector.normalized(lam)),
            deviation=exact_text(vector.normalized(lam) - 1),
        )
        for lam, m in vector.multiplicities.items()
    ]


def deviation_report(n: int, k: int, r: int, c: float = 1.0) -> ExperimentReport:
    """
    Exact weighted squared deviation of the r-th tensor power against n! beta^(2r),
    and the guarantee sqrt(2 pi) e^(-c) at the first integer past the threshold.
    """
    if n < 3:
        raise ArgumentError(f"deviation bounds need n >= 3, got {n}")
    vector = tensor_multiplicities(n, k, r)
    value = deviation(vector)
    bound = deviation_bound(n, k, r)
    threshold = tensor_threshold(n, k, c)
    past = floor(threshold) + 1
    past_value = deviation(tensor_multiplicities(n, k, past))
    guarantee = sqrt(2 * pi) * exp(-c)
    assertions = {
        "deviation_below_bound": value <= bound,
        "guarantee_past_threshold": float(past_value) <= guarantee,
        "total_dimension": vector.total_dimension() == falling(n, k) ** r,
    }
    logger.info(f"tensor n={n} k={k} r={r}: deviation={float(value):.6g}, bound={float(bound):.6g}")
    return make_report(
        command="tensor",
        parameters={"n": n, "k": k, "r": r, "c": c},
        results={
            "rows": [row.model_dump() for row in _rows(vector)],
            "beta": exact_text(downup_beta(n, k)),
            "deviation": exact_text(value),
            "deviation_float": float(value),
            "bound": exact_text(bound),
            "bound_float": float(bound),
            "threshold": threshold,
            "first_r_past_threshold": past,
            "deviation_past_threshold": float(past_value),
            "guarantee": guarantee,
        },
        assertions=assertions,
    )


def equidistribution_summary(n: int, k: int = 1, r_max: int = 30, epsilon: float = 1e-2, c: float = 1.0) -> ExperimentReport:
    """
    For r = 0..r_max, the worst relative error max_lambda |normalized - 1| and the
    weighted deviation; reports where each first drops below its target next to
    the (n log n + c)/(2 log(1/beta)) threshold and the n^2 log(n)/4 heuristic.
    """
    if n < 3:
        raise ArgumentError(f"equidistribution needs n >= 3, got {n}")
    guarantee = sqrt(2 * pi) * exp(-c)
    per_r = []
    first_max: Optional[int] = None
    first_l2: Optional[int] = None
    for r in range(r_max + 1):
        vector = tensor_multiplicities(n, k, r)
        worst = max(abs(float(vector.normalized(lam) - 1)) for lam in vector.multiplicities)
        value = float(deviation(vector))
        per_r.append({"r": r, "max_relative_deviation": worst, "deviation": value})
        if first_max is None and worst < epsilon:
            first_max = r
        if first_l2 is None and value <= guarantee:
            first_l2 = r
    threshold = tensor_threshold(n, k, c)
    assertions = {}
    if first_l2 is not None:
        assertions["l2_within_threshold"] = first_l2 <= floor(threshold) + 1
    elif floor(threshold) + 1 <= r_max:
        assertions["l2_within_threshold"] = False
    return make_report(
        command="equidistribution",
        parameters={"n": n, "k": k, "r_max": r_max, "epsilon": epsilon, "c": c},
        results={
            "per_r": per_r,
            "first_r_max_below_epsilon": first_max,
            "first_r_deviation_below_guarantee": first_l2,
            "threshold": threshold,
            "heuristic_n2_log_n_over_4": n * n * log(n) / 4,
        },
        assertions=assertions,
    )


def verify_tensor(n: int, r_max: int = 20, chain_r_max: int = 6) -> List[CheckResult]:
    """Character sums against the recursion and chain oracles and the deviation bound."""
    Config.require_exact(n)
    checks: List[CheckResult] = []
    for k in (1, 2):
        if k >= n:
            continue
        failures = []
        for r in range(r_max + 1):
            try:
                vector = tensor_multiplicities(n, k, r)
            except ConsistencyError as exc:
                failures.append(str(exc))
                continue
            if k == 1 and vector.multiplicities != tensor_multiplicities_by_recursion(n, k, r).multiplicities:
                failures.append(f"recursion disagrees at r={r}")
            if r <= chain_r_max and vector.multiplicities != multiplicities_via_chain(n, k, r).multiplicities:
                failures.append(f"chain power disagrees at r={r}")
            if n >= 3 and deviation(vector) > deviation_bound(n, k, r):
                failures.append(f"deviation above n! beta^(2r) at r={r}")
        checks.append(CheckResult.from_failures(f"tensor multiplicities n={n} k={k}", r_max + 1, failures))
    return checks
