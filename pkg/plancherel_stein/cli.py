"""
Command-line entry point.

    python -m plancherel_stein sample --method rsk --n 10 --count 3 --seed 7
    python -m plancherel_stein chain --kind downup --n 6 --k 1 --spectrum --mix 40
    python -m plancherel_stein clt --n 64 --count 200000 --seed 1
    python -m plancherel_stein tensor --n 5 --k 1 --r 6
    python -m plancherel_stein verify --nmax 7
    python -m plancherel_stein serve --port 8000

Reports are JSON on stdout (or ``--json PATH``); logs go to stderr. Exit code
is 0 when every assertion passed, 1 when one failed (its name is printed on
stderr) and 2 for usage errors or exceeded caps.
"""
import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from plancherel_stein.chains import ChainKind, ChainSpec, mixing_report, spectral_certificate, transition_matrix
from plancherel_stein.config import Config
from plancherel_stein.errors import ArgumentError, InvariantViolation, ResourceLimitError
from plancherel_stein.logging_utils import ExperimentLogger, get_logger, setup_logging
from plancherel_stein.metrics import MetricsCollector
from plancherel_stein.models import ExperimentReport, SampleRow, exact_text, make_report
from plancherel_stein.plancherel import (
    METHODS,
    empirical_counts,
    goodness_of_fit,
    plancherel_dist,
    resolve_chunk_size,
    sample_batch,
)
from plancherel_stein.rng import GENERATOR_NAME
from plancherel_stein.stein import clt_experiment, r_value, SQRT2
from plancherel_stein.tensor import deviation_report, equidistribution_summary
from plancherel_stein.verification import SUITES, run_suites


logger = get_logger(__name__)

# Goodness of fit against the exact law is only attempted while p(n) stays small.
GOF_NMAX = 20


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", dest="json_path", type=Path, default=None, help="Write the JSON report here instead of stdout")
    parser.add_argument("--store", action="store_true", help="Archive the report in the SQLite report store")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plancherel_stein",
        description="Plancherel measure, Young-lattice chains and the character-ratio CLT",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sample = commands.add_parser("sample", help="Draw Plancherel partitions (CSV)")
    sample.add_argument("--method", choices=METHODS, default="rsk")
    sample.add_argument("--n", type=int, required=True)
    sample.add_argument("--count", type=int, default=1000)
    sample.add_argument("--seed", type=int, default=1)
    sample.add_argument("--out", type=Path, default=None, help="CSV path (default stdout)")
    sample.add_argument("--workers", type=int, default=None)
    sample.add_argument("--chunk-size", type=int, default=None)
    _common(sample)

    chain = commands.add_parser("chain", help="Exact transition matrix, spectrum and mixing")
    chain.add_argument("--kind", choices=[kind.value for kind in ChainKind], required=True)
    chain.add_argument("--n", type=int, required=True)
    chain.add_argument("--k", type=int, default=1)
    chain.add_argument("--matrix", type=Path, default=None, help="Write the exact matrix JSON here")
    chain.add_argument("--spectrum", action="store_true", help="Verify the eigenfunctions exactly")
    chain.add_argument("--mix", type=int, default=None, metavar="RMAX", help="Distances to stationarity for r = 0..RMAX")
    _common(chain)

    clt = commands.add_parser("clt", help="Monte Carlo normal approximation of W")
    clt.add_argument("--n", type=int, required=True)
    clt.add_argument("--count", type=int, default=10000)
    clt.add_argument("--seed", type=int, default=1)
    clt.add_argument("--pairs", type=int, default=None, help="Number of (W, W*) pairs (default min(count, 10000))")
    clt.add_argument("--chunk-size", type=int, default=None)
    _common(clt)

    tensor = commands.add_parser("tensor", help="Tensor-power multiplicities and their deviation bound")
    tensor.add_argument("--n", type=int, required=True)
    tensor.add_argument("--k", type=int, default=1)
    tensor.add_argument("--r", type=int, default=1)
    tensor.add_argument("--c", type=float, default=1.0)
    tensor.add_argument("--summary", type=int, default=None, metavar="RMAX", help="Equidistribution summary over r = 0..RMAX")
    _common(tensor)

    verify = commands.add_parser("verify", help="Run exact verification suites")
    verify.add_argument("suite", nargs="?", default="all", choices=sorted(SUITES) + ["all"])
    verify.add_argument("--nmax", type=int, default=None)
    verify.add_argument("--n", dest="nmax_alias", type=int, default=None, help="Alias for --nmax")
    _common(verify)

    serve = commands.add_parser("serve", help="Run the HTTP service")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)

    return parser


def _sample(args) -> Tuple[ExperimentReport, str]:
    chunk_size = resolve_chunk_size(args.chunk_size)
    partitions = sample_batch(args.method, args.n, args.count, args.seed, chunk_size, args.workers)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["index", "partition", "first_row", "first_column", "w"])
    w_values = []
    for index, lam in enumerate(partitions):
        w = float(r_value(lam)) / SQRT2
        w_values.append(w)
        row = SampleRow(index=index, partition=str(lam), first_row=lam.first_row, first_column=lam.first_column, w=w)
        writer.writerow([row.index, row.partition, row.first_row, row.first_column, repr(row.w)])
    results = {
        "method": args.method,
        "generator": GENERATOR_NAME,
        "count": args.count,
        "mean_first_row": float(np.mean([lam.first_row for lam in partitions])) if partitions else 0.0,
        "w_mean": float(np.mean(w_values)) if w_values else 0.0,
        "w_variance": float(np.var(w_values)) if w_values else 0.0,
    }
    if 1 <= args.n <= GOF_NMAX and partitions:
        statistic, pvalue = goodness_of_fit(empirical_counts(partitions), plancherel_dist(args.n))
        results["chi_square"] = statistic
        results["chi_square_pvalue"] = pvalue
    report = make_report(
        command="sample",
        parameters={"method": args.method, "n": args.n, "count": args.count, "chunk_size": chunk_size},
        seed=args.seed,
        results=results,
    )
    return report, buffer.getvalue()


def _chain(args) -> ExperimentReport:
    spec = ChainSpec(args.n, args.kind, args.k)
    matrix = transition_matrix(spec)
    if args.matrix:
        args.matrix.write_text(json.dumps(matrix.to_json_dict(), indent=2))
    results = {"chain": str(spec), "states": [str(lam) for lam in matrix.states]}
    assertions = {"reversible_stochastic": True}
    if args.matrix is None and len(matrix.states) <= 30:
        results["matrix"] = matrix.to_json_dict()["entries"]
    if args.spectrum:
        certificate = spectral_certificate(spec)
        results["spectrum"] = {
            "beta": exact_text(certificate.beta),
            "rank": certificate.rank,
            "eigenpairs": [entry.model_dump() for entry in certificate.entries()],
            "failures": certificate.failures,
        }
        assertions["spectral_certificate"] = certificate.valid
    if args.mix is not None:
        if spec.kind != ChainKind.DOWNUP:
            raise ArgumentError("--mix applies to the downup chain")
        mixing = mixing_report(args.n, args.k, args.mix)
        results["mixing"] = mixing.results
        assertions.update({f"mix_{name}": ok for name, ok in mixing.assertions.items()})
    return make_report(
        command="chain",
        parameters={"kind": spec.kind.value, "n": args.n, "k": args.k, "spectrum": args.spectrum, "mix": args.mix},
        results=results,
        assertions=assertions,
    )


def _clt(args) -> ExperimentReport:
    result = clt_experiment(args.n, args.count, args.seed, args.pairs, args.chunk_size)
    return make_report(
        command="clt",
        parameters={"n": args.n, "count": args.count, "pair_count": args.pairs, "chunk_size": result.chunk_size},
        seed=args.seed,
        results=result.model_dump(),
        assertions={"within_bound": result.within_bound, "pathwise_bound": result.pathwise_violations == 0},
    )


def _tensor(args) -> ExperimentReport:
    if args.summary is not None:
        return equidistribution_summary(args.n, args.k, args.summary, c=args.c)
    return deviation_report(args.n, args.k, args.r, c=args.c)


def _verify(args) -> ExperimentReport:
    nmax = next((value for value in (args.nmax, args.nmax_alias) if value is not None), Config.EXACT_CAP)
    reports = run_suites([args.suite], nmax)
    assertions = {
        f"{report.suite}: {check.name}": check.passed
        for report in reports
        for check in report.checks
    }
    return make_report(
        command="verify",
        parameters={"suite": args.suite, "nmax": nmax},
        results={
            "suites": [
                {"suite": report.suite, "passed": report.passed, "checks": [c.model_dump() for c in report.checks]}
                for report in reports
            ]
        },
        assertions=assertions,
    )


HANDLERS = {"chain": _chain, "clt": _clt, "tensor": _tensor, "verify": _verify}


def _emit(report: ExperimentReport, json_path: Optional[Path], to_stdout: bool = True) -> None:
    text = report.to_json()
    if json_path:
        json_path.parent.mkdir(parents=True, exist_ok=True)
        json_path.write_text(text + "\n")
    elif to_stdout:
        sys.stdout.write(text + "\n")


def _store(report: ExperimentReport) -> None:
    from plancherel_stein.storage import ReportStorage

    key, inserted = ReportStorage().insert_report(report)
    logger.info(f"report {key[:12]} {'archived' if inserted else 'already archived'}")


def run(argv: Optional[Sequence[str]] = None) -> Tuple[int, Optional[ExperimentReport]]:
    """Parse ``argv``, run the command, and return (exit code, report)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None

    if args.command == "serve":
        from plancherel_stein.main import serve

        serve(args.host, args.port)
        return 0, None

    parameters = {k: str(v) for k, v in vars(args).items() if k not in ("command", "store", "json_path")}
    report: Optional[ExperimentReport] = None
    try:
        with ExperimentLogger(args.command, parameters) as run_log:
            start = time.time()
            if args.command == "sample":
                report, rows = _sample(args)
                if args.out:
                    args.out.parent.mkdir(parents=True, exist_ok=True)
                    args.out.write_text(rows)
                else:
                    sys.stdout.write(rows)
                _emit(report, args.json_path, to_stdout=False)
            else:
                report = HANDLERS[args.command](args)
                _emit(report, args.json_path)
            run_log.passed = report.passed
            run_log.failed = report.failed_assertions()
            MetricsCollector.record_experiment(args.command, time.time() - start)
    except (ArgumentError, ResourceLimitError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2, None
    except InvariantViolation as exc:
        sys.stderr.write(f"invariant violated: {exc.invariant}\n")
        if exc.detail:
            sys.stderr.write(f"  {exc.detail}\n")
        return 1, None

    if args.store:
        _store(report)

    if not report.passed:
        for name in report.failed_assertions():
            sys.stderr.write(f"FAILED: {name}\n")
        return 1, report
    return 0, report


def main(argv: Optional[Sequence[str]] = None) -> int:
    setup_logging()
    code, _ = run(argv)
    return code
