"""
Verification suites: every exact identity the package relies on, run for
n = 1..nmax and collected into SuiteReports.
"""
import time
from math import factorial
from typing import Callable, Dict, List, Sequence

from plancherel_stein import characters
from plancherel_stein.chains import verify_chains
from plancherel_stein.config import Config
from plancherel_stein.errors import ArgumentError
from plancherel_stein.logging_utils import get_logger
from plancherel_stein.metrics import MetricsCollector
from plancherel_stein.models import CheckResult, SuiteReport
from plancherel_stein.partitions import (
    EMPTY,
    conjugate,
    contents,
    dimension,
    down_neighbors,
    enumerate_partitions,
    hook_lengths,
    parse_partition,
    partition_count,
    path_count,
)
from plancherel_stein.plancherel import verify_plancherel
from plancherel_stein.stein import verify_stein
from plancherel_stein.tensor import verify_tensor


logger = get_logger(__name__)

SOLUTION_COUNT_NMAX = 5


def verify_partitions(n: int) -> List[CheckResult]:
    """Enumeration, conjugation, hook lengths and lattice path counts."""
    states = enumerate_partitions(n)
    checks = [
        CheckResult(
            name=f"p(n) n={n}",
            passed=len(states) == partition_count(n) and len(set(states)) == len(states),
            checked=len(states),
        ),
        CheckResult(
            name=f"reverse-lexicographic order n={n}",
            passed=list(states) == sorted(states, reverse=True),
            checked=len(states),
        ),
    ]
    failures = []
    for lam in states:
        if conjugate(conjugate(lam)) != lam:
            failures.append(f"{lam}: conjugate not an involution")
        if dimension(conjugate(lam)) != dimension(lam):
            failures.append(f"{lam}: dim(lambda') != dim(lambda)")
        if parse_partition(str(lam)) != lam:
            failures.append(f"{lam}: text form does not parse back")
        if path_count(EMPTY, lam) != dimension(lam):
            failures.append(f"{lam}: paths from the empty shape != dim")
        if n and sum(dimension(mu) for mu in down_neighbors(lam)) != dimension(lam):
            failures.append(f"{lam}: dim is not the sum over down-neighbors")
        if sorted(hook_lengths(lam).multiset()) != sorted(hook_lengths(conjugate(lam)).multiset()):
            failures.append(f"{lam}: hook multiset differs from conjugate")
        row_sum = sum(p * (p - 1) // 2 for p in lam) - sum(q * (q - 1) // 2 for q in conjugate(lam))
        if sum(contents(lam)) != row_sum:
            failures.append(f"{lam}: content sum != row/column formula")
    checks.append(CheckResult.from_failures(f"partition identities n={n}", len(states), failures))
    checks.append(CheckResult(
        name=f"sum dim^2 = n! n={n}",
        passed=sum(dimension(lam) ** 2 for lam in states) == factorial(n),
        checked=len(states),
    ))
    return checks


def verify_characters(n: int) -> List[CheckResult]:
    Config.require_exact(n)
    checks = [
        characters.verify_orthogonality(n),
        characters.verify_identity_column(n),
        characters.verify_conjugation_symmetry(n),
        characters.verify_frobenius(n),
        characters.verify_parents(n),
    ]
    for k in (1, 2):
        checks.append(characters.verify_branching(n, k))
        checks.append(characters.verify_induced_restricted(n, k))
    if n <= SOLUTION_COUNT_NMAX:
        checks.append(characters.verify_solution_counts(n))
    return checks


SUITES: Dict[str, Callable[[int], List[CheckResult]]] = {
    "partitions": verify_partitions,
    "characters": verify_characters,
    "plancherel": verify_plancherel,
    "chains": verify_chains,
    "stein": verify_stein,
    "tensor": verify_tensor,
}


def run_suite(suite: str, nmax: int) -> SuiteReport:
    """Run one suite for n = 1..nmax."""
    if suite not in SUITES:
        raise ArgumentError(f"unknown suite {suite!r}; expected one of {sorted(SUITES)} or 'all'")
    if nmax < 1:
        raise ArgumentError(f"nmax must be at least 1, got {nmax}")
    Config.require_exact(nmax, f"verify {suite}")
    start = time.time()
    checks: List[CheckResult] = []
    for n in range(1, nmax + 1):
        checks.extend(SUITES[suite](n))
    for check in checks:
        MetricsCollector.record_check(suite, check.passed)
    report = SuiteReport(suite=suite, nmax=nmax, checks=checks)
    failed = [c.name for c in checks if not c.passed]
    logger.info(
        f"verify {suite} nmax={nmax}: {len(checks) - len(failed)}/{len(checks)} passed "
        f"in {time.time() - start:.2f}s"
    )
    for name in failed:
        logger.warning(f"verify {suite}: FAILED {name}")
    return report


def run_suites(suites: Sequence[str], nmax: int) -> List[SuiteReport]:
    names = list(SUITES) if "all" in suites else list(suites)
    return [run_suite(name, nmax) for name in names]
