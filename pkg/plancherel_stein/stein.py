"""
The normalized character ratio W = (n-1)/sqrt(2) * chi(12)/dim and its
exchangeable pair (W, W*) built from one step of the updown(1) chain.

Identities are checked with W stored as an exact rational r = (n-1) chi(12)/dim
times a symbolic 1/sqrt(2): every second moment carries a factor 1/2 and odd
moments vanish from the checks, so no irrational arithmetic is needed. Floats
appear only in the Monte Carlo normal approximation.
"""
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import comb, e, exp, pi, sqrt
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from plancherel_stein.characters import CycleType, character, count_solutions, frobenius_ratio
from plancherel_stein.chains import ChainKind, ChainSpec, transition_matrix, updown_step
from plancherel_stein.config import Config
from plancherel_stein.errors import ArgumentError, InvariantViolation
from plancherel_stein.logging_utils import get_logger
from plancherel_stein.metrics import MetricsCollector
from plancherel_stein.models import CheckResult, CltReport, exact_text
from plancherel_stein.partitions import Partition, dimension, enumerate_partitions
from plancherel_stein.plancherel import plancherel_dist, resolve_chunk_size, rsk_sample, sample_batch
from plancherel_stein.rng import SeededStream


logger = get_logger(__name__)

SQRT2 = sqrt(2.0)
CLT_CONSTANT = 40.1
# Pair draws use their own stream so they never overlap the batch chunks.
PAIR_STREAM = 1 << 20


@dataclass(frozen=True)
class WStat:
    """W for one partition: ``r`` exact, ``value`` = r/sqrt(2) as a float."""

    partition: Partition
    r: Fraction

    @property
    def value(self) -> float:
        return float(self.r) / SQRT2

    @property
    def r_squared_half(self) -> Fraction:
        """W^2 exactly."""
        return self.r * self.r / 2


def content_sum(partition: Partition) -> int:
    """Sum of box contents = sum_i [C(lambda_i, 2) - C(lambda_i', 2)]."""
    return sum(length * (length - 1) // 2 - i * length for i, length in enumerate(partition))


def r_value(partition: Partition) -> Fraction:
    """(n-1) chi(12)/dim = 2 (sum of contents)/n; zero at n <= 1."""
    n = partition.n
    if n <= 1:
        return Fraction(0)
    return Fraction(2 * content_sum(partition), n)


def w_statistic(partition: Partition) -> WStat:
    partition = Partition(partition)
    n = partition.n
    if n <= 1:
        return WStat(partition, Fraction(0))
    r = (n - 1) * frobenius_ratio(partition)
    if n <= Config.EXACT_CAP:
        by_character = Fraction((n - 1) * character(partition, CycleType.transposition(n)), dimension(partition))
        if by_character != r:
            raise InvariantViolation("Frobenius formula", f"{partition}: {r} != {by_character}")
    return WStat(partition, r)


def _updown_row(partition: Partition) -> Tuple[Tuple[Partition, ...], Tuple[Fraction, ...]]:
    matrix = transition_matrix(ChainSpec(partition.n, ChainKind.UPDOWN, 1))
    return matrix.states, matrix.row(partition)


def _class_ratio(partition: Partition, cycle_type: Optional[CycleType]) -> Fraction:
    if cycle_type is None:
        return Fraction(0)
    return Fraction(character(partition, cycle_type), dimension(partition))


def conditional_first_moment(partition: Partition) -> Tuple[Fraction, Fraction]:
    """
    Rational parts of E^lambda(W*) from the matrix row and of (1 - 2/(n+1)) W.
    Raises InvariantViolation if they differ.
    """
    partition = Partition(partition)
    n = partition.n
    states, row = _updown_row(partition)
    computed = sum((p * r_value(mu) for mu, p in zip(states, row) if p), Fraction(0))
    expected = (1 - Fraction(2, n + 1)) * r_value(partition)
    if computed != expected:
        raise InvariantViolation("E(W*|lambda) = (1 - 2/(n+1)) W", f"{partition}: {computed} != {expected}")
    return computed, expected


def second_moment_formula(partition: Partition) -> Fraction:
    """
    (1 - 1/n) + 2(n-1)(n-2)^2/(n(n+1)) chi(123)/dim
    + (n-1)(n-2)(n-3)^2/(2n(n+1)) chi((12)(34))/dim.

    The 3-cycle ratio is taken as zero for n <= 2 and the double transposition
    ratio for n <= 3.
    """
    n = partition.n
    three = _class_ratio(partition, CycleType.three_cycle(n) if n >= 3 else None)
    double = _class_ratio(partition, CycleType.double_transposition(n) if n >= 4 else None)
    return (
        1 - Fraction(1, n)
        + Fraction(2 * (n - 1) * (n - 2) ** 2, n * (n + 1)) * three
        + Fraction((n - 1) * (n - 2) * (n - 3) ** 2, 2 * n * (n + 1)) * double
    )


def conditional_second_moment(partition: Partition) -> Fraction:
    """E^lambda((W*)^2) from the matrix row; must equal ``second_moment_formula``."""
    partition = Partition(partition)
    states, row = _updown_row(partition)
    computed = sum((p * r_value(mu) ** 2 / 2 for mu, p in zip(states, row) if p), Fraction(0))
    expected = second_moment_formula(partition)
    if computed != expected:
        raise InvariantViolation("E((W*)^2|lambda) character formula", f"{partition}: {computed} != {expected}")
    return computed


def mean_variance_check(n: int) -> Tuple[Fraction, Fraction]:
    """E(W) = 0 and Var(W) = 1 - 1/n under Plancherel measure, exactly."""
    dist = plancherel_dist(n)
    mean = sum((p * r_value(lam) for lam, p in dist.probabilities.items()), Fraction(0))
    second = sum((p * r_value(lam) ** 2 / 2 for lam, p in dist.probabilities.items()), Fraction(0))
    expected = 1 - Fraction(1, n) if n >= 1 else Fraction(0)
    if mean != 0:
        raise InvariantViolation("E(W) = 0", f"n={n}: {mean}")
    if second != expected:
        raise InvariantViolation("Var(W) = 1 - 1/n", f"n={n}: {second} != {expected}")
    return mean, second


def squared_jump(partition: Partition) -> Fraction:
    """E^lambda(W* - W)^2, from the row and through (4/(n+1) - 1) W^2 + E^lambda(W*^2)."""
    partition = Partition(partition)
    n = partition.n
    states, row = _updown_row(partition)
    r = r_value(partition)
    direct = sum((p * (r_value(mu) - r) ** 2 / 2 for mu, p in zip(states, row) if p), Fraction(0))
    via_moments = (Fraction(4, n + 1) - 1) * r * r / 2 + conditional_second_moment(partition)
    if direct != via_moments:
        raise InvariantViolation("E(W*-W)^2 = (4/(n+1) - 1) W^2 + E(W*^2)", f"{partition}: {direct} != {via_moments}")
    return direct


def term1_formula(n: int) -> Fraction:
    """(3n^2 - 5n + 6)/(4n^3)."""
    return Fraction(3 * n * n - 5 * n + 6, 4 * n ** 3)


def term1_exact(n: int) -> Fraction:
    """E_pi[(-1 + (n+1)/4 E^lambda(W*-W)^2)^2], computed from matrix rows."""
    if n < 1:
        raise ArgumentError(f"term1_exact needs n >= 1, got {n}")
    dist = plancherel_dist(n)
    scale = Fraction(n + 1, 4)
    value = sum(
        (p * (-1 + scale * squared_jump(lam)) ** 2 for lam, p in dist.probabilities.items()),
        Fraction(0),
    )
    if value != term1_formula(n):
        raise InvariantViolation("term1 = (3n^2-5n+6)/(4n^3)", f"n={n}: {value} != {term1_formula(n)}")
    return value


def term1_given_w(n: int) -> Fraction:
    """The same term with E^W in place of E^lambda (states pooled by value of W)."""
    dist = plancherel_dist(n)
    mass: Dict[Fraction, Fraction] = defaultdict(Fraction)
    weighted: Dict[Fraction, Fraction] = defaultdict(Fraction)
    for lam, p in dist.probabilities.items():
        r = r_value(lam)
        mass[r] += p
        weighted[r] += p * squared_jump(lam)
    scale = Fraction(n + 1, 4)
    return sum(
        (mass[r] * (-1 + scale * weighted[r] / mass[r]) ** 2 for r in mass),
        Fraction(0),
    )


def verify_exchangeability(n: int) -> CheckResult:
    """The joint law of (r(lambda), r(lambda*)) is symmetric."""
    dist = plancherel_dist(n)
    matrix = transition_matrix(ChainSpec(n, ChainKind.UPDOWN, 1))
    joint: Dict[Tuple[Fraction, Fraction], Fraction] = defaultdict(Fraction)
    values = [r_value(lam) for lam in matrix.states]
    for i, lam in enumerate(matrix.states):
        for j, p in enumerate(matrix.entries[i]):
            if p:
                joint[values[i], values[j]] += dist[lam] * p
    failures = [
        f"({exact_text(a)},{exact_text(b)})"
        for (a, b), p in joint.items()
        if joint.get((b, a), Fraction(0)) != p
    ]
    return CheckResult.from_failures(f"exchangeability of (W, W*) n={n}", len(joint), failures)


def character_ratio_moments(n: int, m_max: int = 4) -> CheckResult:
    """
    E_pi[(chi(12)/dim)^m] equals the number of m-tuples of transpositions with
    product the identity, divided by C(n,2)^m.
    """
    if n < 2:
        raise ArgumentError(f"character_ratio_moments needs n >= 2, got {n}")
    dist = plancherel_dist(n)
    t = CycleType.transposition(n)
    identity = CycleType.identity(n)
    failures, moments = [], {}
    for m in range(1, m_max + 1):
        moment = sum((p * frobenius_ratio(lam) ** m for lam, p in dist.probabilities.items()), Fraction(0))
        counted = Fraction(count_solutions(n, [t] * m, identity), comb(n, 2) ** m)
        moments[str(m)] = exact_text(moment)
        if moment != counted:
            failures.append(f"m={m}: {moment} != {counted}")
    return CheckResult.from_failures(f"character ratio moments n={n}", m_max, failures, moments=moments)


def term2_bound(n: int) -> float:
    """(4e sqrt(2)/sqrt(n))^3 + 2 e^(-2e sqrt(n)) (2 sqrt(2))^3."""
    if n < 2:
        raise ArgumentError(f"term2_bound needs n >= 2, got {n}")
    return (4 * e * SQRT2 / sqrt(n)) ** 3 + 2 * exp(-2 * e * sqrt(n)) * (2 * SQRT2) ** 3


def pathwise_limit(partition: Partition) -> Fraction:
    """Largest possible |r(lambda*) - r(lambda)|: min(4, 4 max(lambda_1, lambda_1')/n)."""
    n = partition.n
    return min(Fraction(4), Fraction(4 * max(partition.first_row, partition.first_column), n))


def pathwise_jumps(partitions: Iterable[Partition], rng: SeededStream) -> Tuple[List[float], List[str]]:
    """
    W* - W for one updown(1) step from each partition, and a description of
    every draw that breaks the pathwise bound.
    """
    jumps, violations = [], []
    for lam in partitions:
        mu = updown_step(lam, rng)
        n = lam.n
        delta = Fraction(2 * (content_sum(mu) - content_sum(lam)), n)
        if abs(delta) > pathwise_limit(lam):
            violations.append(f"{lam} -> {mu}: |r jump| = {abs(delta)}")
        jumps.append(float(delta) / SQRT2)
    MetricsCollector.record_samples("updown", len(jumps))
    return jumps, violations


def jump_sample(partitions: Iterable[Partition], rng: SeededStream) -> List[float]:
    """Like ``pathwise_jumps``, but raises InvariantViolation if any draw breaks the bound."""
    jumps, violations = pathwise_jumps(partitions, rng)
    if violations:
        raise InvariantViolation(
            "|W*-W| <= min(2 sqrt 2, 2 sqrt 2 max(lambda_1, lambda_1')/n)",
            f"{len(violations)} violations, first {violations[0]}",
        )
    return jumps


def term2_empirical(n: int, samples: int, rng: SeededStream) -> float:
    """Monte Carlo E|W*-W|^3 with lambda drawn by RSK."""
    if n < 2:
        raise ArgumentError(f"term2_empirical needs n >= 2, got {n}")
    if samples < 1:
        raise ArgumentError("term2_empirical needs at least one sample")
    jumps = np.abs(np.array(jump_sample((rsk_sample(n, rng) for _ in range(samples)), rng)))
    value = float(np.mean(jumps ** 3))
    # |W*-W| <= 2 sqrt 2, so the third moment has standard error at most 22.7/sqrt(samples)
    allowance = 4 * (2 * SQRT2) ** 3 / sqrt(samples)
    if value > term2_bound(n) + allowance:
        raise InvariantViolation("E|W*-W|^3 <= term2 bound", f"n={n}: {value} > {term2_bound(n)}")
    return value


def normal_cdf(x):
    """Standard normal CDF (scipy's ndtr, accurate to double precision)."""
    return special.ndtr(x)


def kolmogorov_distance(values: Sequence[float]) -> float:
    """sup_x |F_sample(x) - Phi(x)|, using both one-sided limits at every sample point."""
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise ArgumentError("kolmogorov_distance needs a non-empty sample")
    points, counts = np.unique(data, return_counts=True)
    above = np.cumsum(counts) / data.size
    below = above - counts / data.size
    phi = normal_cdf(points)
    return float(min(1.0, max(np.max(np.abs(above - phi)), np.max(np.abs(below - phi)))))


def clt_bound(n: int) -> float:
    """40.1 n^(-1/4)."""
    return CLT_CONSTANT * n ** -0.25


def constant_lhs(n: int) -> float:
    """sqrt(3) n^(-1/4) + (2 pi)^(-1/4) sqrt((n+1)/2 ((4e sqrt 2/sqrt n)^3 + 2(2 sqrt 2)^3/n^(3/2)))."""
    inner = (4 * e * SQRT2 / sqrt(n)) ** 3 + 2 * (2 * SQRT2) ** 3 / n ** 1.5
    return sqrt(3) * n ** -0.25 + (2 * pi) ** -0.25 * sqrt((n + 1) / 2 * inner)


def stein_error_bound(n: int) -> float:
    """2 sqrt(term1) + (2 pi)^(-1/4) sqrt((n+1)/2 term2_bound(n)), never above 40.1 n^(-1/4)."""
    value = 2 * sqrt(float(term1_formula(n))) + (2 * pi) ** -0.25 * sqrt((n + 1) / 2 * term2_bound(n))
    if value > clt_bound(n):
        raise InvariantViolation("Stein bound <= 40.1 n^(-1/4)", f"n={n}: {value}")
    return value


def constant_grid(n_max: int = 10 ** 6, dense_to: int = 2000, points: int = 400) -> List[int]:
    """Every n up to ``dense_to``, then a geometric grid to ``n_max`` (endpoints included)."""
    dense = list(range(2, min(dense_to, n_max) + 1))
    if n_max <= dense_to:
        return dense
    sparse = np.unique(np.geomspace(dense_to, n_max, points).astype(int)).tolist()
    return sorted(set(dense) | set(sparse) | {n_max})


def stein_bound_constant_check(n_values: Optional[Sequence[int]] = None) -> CheckResult:
    """
    The simplified right-hand side stays below 40.1 n^(-1/4), the refined bound
    stays below the simplified one, and e^(-2e sqrt n) <= n^(-3/2), on a grid.
    """
    n_values = list(n_values) if n_values is not None else constant_grid()
    if any(n < 2 or n > 10 ** 6 for n in n_values):
        raise ArgumentError("constant check is defined for 2 <= n <= 10^6")
    failures = []
    worst = 0.0
    for n in n_values:
        lhs = constant_lhs(n)
        worst = max(worst, lhs * n ** 0.25)
        if lhs > clt_bound(n):
            failures.append(f"n={n}: {lhs:.6g} > {clt_bound(n):.6g}")
        if exp(-2 * e * sqrt(n)) > n ** -1.5:
            failures.append(f"n={n}: e^(-2e sqrt n) > n^(-3/2)")
        refined = 2 * sqrt(float(term1_formula(n))) + (2 * pi) ** -0.25 * sqrt((n + 1) / 2 * term2_bound(n))
        if refined > lhs * (1 + 1e-12):
            failures.append(f"n={n}: refined bound {refined:.6g} above simplified {lhs:.6g}")
    return CheckResult.from_failures(
        "Stein constant 40.1", len(n_values), failures,
        worst_constant=worst, n_min=min(n_values), n_max=max(n_values),
    )


def clt_experiment(
    n: int,
    samples: int,
    seed: int,
    pair_count: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> CltReport:
    """
    Kolmogorov distance of W over RSK-sampled Plancherel partitions to the
    standard normal, with W* - W statistics from ``pair_count`` updown steps.
    Draws that break the pathwise bound are counted, not raised.
    """
    if n < 2:
        raise ArgumentError(f"clt_experiment needs n >= 2, got {n}")
    if samples < 1:
        raise ArgumentError("clt_experiment needs at least one sample")
    chunk_size = resolve_chunk_size(chunk_size)
    partitions = sample_batch("rsk", n, samples, seed, chunk_size)
    w = np.array([float(r_value(lam)) / SQRT2 for lam in partitions])
    distance = kolmogorov_distance(w)

    pair_count = min(samples, 10_000) if pair_count is None else min(pair_count, samples)
    jump_list, violations = pathwise_jumps(partitions[:pair_count], SeededStream(seed, PAIR_STREAM))
    if violations:
        logger.warning(f"clt n={n}: {len(violations)} pathwise violations, first {violations[0]}")
    jumps = np.array(jump_list)
    absolute = np.abs(jumps)

    bound = clt_bound(n)
    report = CltReport(
        n=n,
        samples=samples,
        seed=seed,
        chunk_size=chunk_size,
        kolmogorov_distance=distance,
        bound=bound,
        within_bound=distance <= bound,
        refined_bound=stein_error_bound(n),
        w_mean=float(np.mean(w)),
        w_variance=float(np.var(w)),
        pair_samples=int(jumps.size),
        jump_mean=float(np.mean(jumps)) if jumps.size else 0.0,
        jump_variance=float(np.var(jumps)) if jumps.size else 0.0,
        jump_third_abs_moment=float(np.mean(absolute ** 3)) if jumps.size else 0.0,
        term2_bound=term2_bound(n),
        pathwise_violations=len(violations),
    )
    logger.info(f"clt n={n}: D={distance:.5f}, bound={bound:.4f}")
    return report


def _checked(name: str, fn: Callable[[], object]) -> CheckResult:
    try:
        fn()
    except InvariantViolation as exc:
        return CheckResult(name=name, passed=False, checked=1, failures=[str(exc)])
    return CheckResult(name=name, passed=True, checked=1)


def _per_partition(name: str, n: int, fn: Callable[[Partition], object]) -> CheckResult:
    failures = []
    states = enumerate_partitions(n)
    for lam in states:
        try:
            fn(lam)
        except InvariantViolation as exc:
            failures.append(str(exc))
    return CheckResult.from_failures(name, len(states), failures)


def verify_stein(n: int) -> List[CheckResult]:
    """Exact exchangeable-pair identities for partitions of n."""
    Config.require_exact(n)
    checks = [
        _per_partition(f"W by Frobenius = W by characters n={n}", n, w_statistic),
        _per_partition(f"E(W*|lambda) = (1 - 2/(n+1)) W n={n}", n, conditional_first_moment),
        _per_partition(f"E((W*)^2|lambda) formula n={n}", n, conditional_second_moment),
        _checked(f"E(W) = 0, Var(W) = 1 - 1/n n={n}", lambda: mean_variance_check(n)),
        _checked(f"term1 = (3n^2-5n+6)/(4n^3) n={n}", lambda: term1_exact(n)),
        verify_exchangeability(n),
    ]
    given_w, exact = term1_given_w(n), term1_formula(n)
    checks.append(CheckResult(
        name=f"term1 given W <= term1 n={n}",
        passed=given_w <= exact,
        checked=1,
        details={"given_w": exact_text(given_w), "term1": exact_text(exact)},
    ))
    if n >= 2:
        checks.append(character_ratio_moments(n))
        checks.append(_checked(f"Stein bound <= 40.1 n^(-1/4) n={n}", lambda: stein_error_bound(n)))
    return checks
