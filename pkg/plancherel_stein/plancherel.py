"""
Plancherel measure of the symmetric group: the exact distribution, the growth
process and RSK samplers, and longest-increasing-subsequence statistics.
"""
from bisect import bisect_left
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import e, exp, factorial, sqrt
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from plancherel_stein.config import Config
from plancherel_stein.errors import ArgumentError, InvariantViolation, ResourceLimitError
from plancherel_stein.logging_utils import get_logger
from plancherel_stein.metrics import MetricsCollector
from plancherel_stein.models import CheckResult
from plancherel_stein.partitions import (
    EMPTY,
    Partition,
    add_box,
    addable_rows,
    addition_probability,
    addition_ratio,
    dimension,
    enumerate_partitions,
)
from plancherel_stein.rng import SeededStream, split


logger = get_logger(__name__)

METHODS = ("growth", "rsk")


@dataclass(frozen=True)
class ExactDist:
    """An exact probability distribution on partitions of n."""

    n: int
    probabilities: Mapping[Partition, Fraction]

    @property
    def states(self) -> Tuple[Partition, ...]:
        return tuple(self.probabilities)

    def __getitem__(self, partition: Partition) -> Fraction:
        return self.probabilities.get(Partition(partition), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.probabilities.values(), Fraction(0))

    def vector(self, order: Sequence[Partition]) -> List[Fraction]:
        return [self[p] for p in order]


@lru_cache(maxsize=None)
def plancherel_dist(n: int) -> ExactDist:
    """pi(lambda) = dim(lambda)^2 / n!, exactly."""
    if n < 0:
        raise ArgumentError(f"n must be non-negative, got {n}")
    Config.require_enumerable(n, "Plancherel distribution")
    n_factorial = factorial(n)
    dist = ExactDist(
        n=n,
        probabilities={lam: Fraction(dimension(lam) ** 2, n_factorial) for lam in enumerate_partitions(n)},
    )
    if dist.total() != 1:
        raise InvariantViolation("Plancherel normalization", f"sum dim^2 != {n}! at n={n}")
    return dist


def growth_probabilities(partition: Partition) -> Tuple[List[Partition], List[float]]:
    """Up-neighbors of lambda and their coherent probabilities as floats."""
    rows = addable_rows(partition)
    targets = [add_box(partition, row) for row in rows]
    weights = []
    for row in rows:
        numerator, denominator = addition_ratio(partition, row)
        weights.append(numerator / denominator)
    return targets, weights


def growth_step(partition: Partition, rng: SeededStream) -> Partition:
    """One step of the Plancherel growth process: add a box."""
    targets, weights = growth_probabilities(partition)
    return targets[rng.choose(weights)]


def growth_sample(n: int, rng: SeededStream) -> Partition:
    """Grow a Plancherel-distributed partition of n box by box from the empty shape."""
    if n < 0:
        raise ArgumentError(f"n must be non-negative, got {n}")
    partition = EMPTY
    for _ in range(n):
        partition = growth_step(partition, rng)
    return partition


def growth_law_exact(n: int) -> ExactDist:
    """Law of the growth process at level n by exact dynamic programming."""
    Config.require_enumerable(n, "growth-process law")
    law: Dict[Partition, Fraction] = {EMPTY: Fraction(1)}
    for _ in range(n):
        nxt: Dict[Partition, Fraction] = {}
        for lam, mass in law.items():
            step = {add_box(lam, row): addition_probability(lam, row) for row in addable_rows(lam)}
            if sum(step.values()) != 1:
                raise InvariantViolation("growth probabilities sum to 1", str(lam))
            for big, p in step.items():
                nxt[big] = nxt.get(big, Fraction(0)) + mass * p
        law = nxt
    ordered = {lam: law.get(lam, Fraction(0)) for lam in enumerate_partitions(n)}
    return ExactDist(n=n, probabilities=ordered)


def _check_permutation(w: Sequence[int]) -> List[int]:
    values = [int(x) for x in w]
    if sorted(values) != list(range(1, len(values) + 1)):
        raise ArgumentError(f"not a permutation of 1..{len(values)}: {list(w)[:20]}")
    return values


def rsk_shape(w: Sequence[int]) -> Partition:
    """Shape of the RSK insertion tableau of the permutation w (row insertion)."""
    rows: List[List[int]] = []
    for x in _check_permutation(w):
        for row in rows:
            position = bisect_left(row, x)
            if position == len(row):
                row.append(x)
                break
            row[position], x = x, row[position]
        else:
            rows.append([x])
    return Partition(len(row) for row in rows)


def longest_increasing_subsequence(w: Sequence[int]) -> int:
    """Length of a longest increasing subsequence (patience sorting)."""
    piles: List[int] = []
    for x in w:
        position = bisect_left(piles, x)
        if position == len(piles):
            piles.append(x)
        else:
            piles[position] = x
    return len(piles)


def rsk_sample(n: int, rng: SeededStream) -> Partition:
    """Plancherel sample via the RSK shape of a uniform random permutation."""
    if n < 1:
        raise ArgumentError(f"rsk_sample needs n >= 1, got {n}")
    return rsk_shape(rng.permutation(n).tolist())


def rsk_exhaustive_law(n: int) -> Dict[Partition, int]:
    """Shape multiplicities of RSK over all n! permutations."""
    if n > 7:
        raise ResourceLimitError("exhaustive RSK", n, 7)
    counts = Counter(rsk_shape(w) for w in permutations(range(1, n + 1)))
    return {lam: counts.get(lam, 0) for lam in enumerate_partitions(n)}


SAMPLERS = {"growth": growth_sample, "rsk": rsk_sample}


def resolve_chunk_size(chunk_size: Optional[int] = None) -> int:
    """The chunk size a batch will use: the argument, else PLANCHEREL_CHUNK_SIZE."""
    chunk_size = Config.CHUNK_SIZE if chunk_size is None else chunk_size
    if chunk_size < 1:
        raise ArgumentError(f"chunk_size must be positive, got {chunk_size}")
    return chunk_size


def _sample_chunk(job: Tuple[str, int, int, int, int]) -> List[Partition]:
    method, n, size, seed, stream = job
    sampler = SAMPLERS[method]
    rng = SeededStream(seed, stream)
    return [sampler(n, rng) for _ in range(size)]


def sample_batch(
    method: str,
    n: int,
    count: int,
    seed: int,
    chunk_size: Optional[int] = None,
    workers: Optional[int] = None,
) -> List[Partition]:
    """
    ``count`` samples split into chunks with one stream per chunk.

    Output is the concatenation of chunks in chunk order, so it is the same
    for any number of workers. It does depend on ``chunk_size``, which
    reports therefore record next to the seed.
    """
    if method not in SAMPLERS:
        raise ArgumentError(f"unknown sampling method {method!r}; expected one of {METHODS}")
    if count < 0:
        raise ArgumentError(f"count must be non-negative, got {count}")
    chunk_size = resolve_chunk_size(chunk_size)
    workers = workers or Config.WORKERS
    jobs = [(method, n, size, seed, stream.stream) for _, size, stream in split(seed, count, chunk_size)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sample_chunk, jobs))
    else:
        chunks = [_sample_chunk(job) for job in jobs]
    MetricsCollector.record_samples(method, count)
    return [lam for chunk in chunks for lam in chunk]


def lis_tail_probability_check(
    n: int, samples: int, rng: SeededStream, alpha: float = 1e-3
) -> CheckResult:
    """
    Frequency of {lambda_1 >= 2e sqrt(n) or lambda_1' >= 2e sqrt(n)} under RSK
    sampling against the bound 2 exp(-2e sqrt(n)). Passes when the observed
    count is within the binomial (1 - alpha) quantile at the bound.
    """
    if n < 1:
        raise ArgumentError(f"n must be positive, got {n}")
    threshold = 2 * e * sqrt(n)
    bound = min(1.0, 2 * exp(-threshold))
    hits = 0
    for _ in range(samples):
        lam = rsk_sample(n, rng)
        if lam.first_row >= threshold or lam.first_column >= threshold:
            hits += 1
    allowed = int(stats.binom.ppf(1 - alpha, samples, bound)) if bound > 0 else 0
    MetricsCollector.record_samples("rsk", samples)
    return CheckResult(
        name=f"LIS tail bound n={n}",
        passed=hits <= allowed,
        checked=samples,
        details={
            "threshold": threshold,
            "hits": hits,
            "frequency": hits / samples if samples else 0.0,
            "bound": bound,
            "allowed_hits": allowed,
        },
    )


def _pooled(observed: List[float], expected: List[float], minimum: float = 5.0) -> Tuple[List[float], List[float]]:
    """Merge cells (in canonical order) until each expected count reaches ``minimum``."""
    pooled_obs, pooled_exp = [], []
    acc_obs = acc_exp = 0.0
    for o, x in zip(observed, expected):
        acc_obs += o
        acc_exp += x
        if acc_exp >= minimum:
            pooled_obs.append(acc_obs)
            pooled_exp.append(acc_exp)
            acc_obs = acc_exp = 0.0
    if acc_exp > 0 or acc_obs > 0:
        if pooled_exp:
            pooled_obs[-1] += acc_obs
            pooled_exp[-1] += acc_exp
        else:
            pooled_obs.append(acc_obs)
            pooled_exp.append(acc_exp)
    return pooled_obs, pooled_exp


def goodness_of_fit(counts: Mapping[Partition, int], exact: ExactDist) -> Tuple[float, float]:
    """Chi-square statistic and p-value of sampled counts against an exact law."""
    total = sum(counts.values())
    order = sorted(exact.states, key=lambda lam: exact[lam], reverse=True)
    observed = [float(counts.get(lam, 0)) for lam in order]
    expected = [float(exact[lam]) * total for lam in order]
    observed, expected = _pooled(observed, expected)
    if len(observed) < 2:
        return 0.0, 1.0
    result = stats.chisquare(observed, f_exp=expected)
    return float(result.statistic), float(result.pvalue)


def sampler_agreement(counts_a: Mapping[Partition, int], counts_b: Mapping[Partition, int]) -> Tuple[float, float]:
    """Chi-square homogeneity test between two samplers' shape counts."""
    shapes = sorted(set(counts_a) | set(counts_b), key=lambda lam: counts_a.get(lam, 0) + counts_b.get(lam, 0), reverse=True)
    rows_a, rows_b = [], []
    acc_a = acc_b = 0
    for lam in shapes:
        acc_a += counts_a.get(lam, 0)
        acc_b += counts_b.get(lam, 0)
        if acc_a + acc_b >= 10:
            rows_a.append(acc_a)
            rows_b.append(acc_b)
            acc_a = acc_b = 0
    if rows_a and (acc_a or acc_b):
        rows_a[-1] += acc_a
        rows_b[-1] += acc_b
    if len(rows_a) < 2:
        return 0.0, 1.0
    statistic, pvalue, _, _ = stats.chi2_contingency(np.array([rows_a, rows_b]))
    return float(statistic), float(pvalue)


def empirical_counts(samples: Iterable[Partition]) -> Dict[Partition, int]:
    return dict(Counter(samples))


def verify_plancherel(n: int) -> List[CheckResult]:
    """Normalization, growth-law equality and (n <= 6) exhaustive RSK law."""
    Config.require_exact(n)
    checks = []
    dist = plancherel_dist(n)
    checks.append(CheckResult(
        name=f"sum dim^2 = n! n={n}",
        passed=sum(dimension(lam) ** 2 for lam in dist.states) == factorial(n),
        checked=len(dist.states),
    ))
    growth = growth_law_exact(n)
    failures = [str(lam) for lam in dist.states if growth[lam] != dist[lam]]
    checks.append(CheckResult.from_failures(f"growth law = Plancherel n={n}", len(dist.states), failures))
    if 1 <= n <= 6:
        law = rsk_exhaustive_law(n)
        failures = [str(lam) for lam, c in law.items() if Fraction(c, factorial(n)) != dist[lam]]
        lis = Counter(longest_increasing_subsequence(w) for w in permutations(range(1, n + 1)))
        first_rows = Counter()
        for lam, c in law.items():
            first_rows[lam.first_row] += c
        if lis != first_rows:
            failures.append("first-row law != LIS law")
        checks.append(CheckResult.from_failures(f"exhaustive RSK = Plancherel n={n}", len(law), failures))
    return checks
