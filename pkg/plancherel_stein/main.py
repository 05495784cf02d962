"""
FastAPI application exposing exact Plancherel/character/chain computations,
the Monte Carlo CLT experiment, and the report archive.
"""
import time
import uuid
from datetime import datetime, timezone
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.responses import JSONResponse

from plancherel_stein import __version__
from plancherel_stein.chains import ChainKind, ChainSpec, spectral_certificate, transition_matrix
from plancherel_stein.characters import character_table
from plancherel_stein.config import Config
from plancherel_stein.errors import ArgumentError, InvariantViolation, ResourceLimitError
from plancherel_stein.logging_utils import ExperimentLogger, get_logger, log_request, run_id_var, setup_logging
from plancherel_stein.metrics import MetricsCollector, get_metrics
from plancherel_stein.models import (
    CltRequest,
    HealthResponse,
    ReportListResponse,
    ReportStatsResponse,
    ReportSummary,
    exact_text,
    make_report,
)
from plancherel_stein.partitions import dimension
from plancherel_stein.plancherel import plancherel_dist
from plancherel_stein.stein import clt_experiment
from plancherel_stein.storage import ReportStorage
from plancherel_stein.tensor import deviation_report, tensor_multiplicities


setup_logging()
logger = get_logger(__name__)

app = FastAPI(
    title="Plancherel Stein Service",
    description="Exact Plancherel measure, Young-lattice chains and character-ratio CLT experiments",
    version=__version__,
)

storage = ReportStorage()


@app.exception_handler(ArgumentError)
async def argument_error_handler(request: Request, exc: ArgumentError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(ResourceLimitError)
async def resource_limit_handler(request: Request, exc: ResourceLimitError):
    return JSONResponse(
        status_code=413,
        content={"detail": str(exc), "what": exc.what, "n": exc.n, "cap": exc.cap},
    )


@app.exception_handler(InvariantViolation)
async def invariant_violation_handler(request: Request, exc: InvariantViolation):
    logger.error(f"Invariant violated while serving {request.url.path}: {exc}")
    return JSONResponse(status_code=500, content={"detail": str(exc), "invariant": exc.invariant})


@app.middleware("http")
async def logging_middleware(request: Request, call_next):
    """Middleware for request logging and metrics."""
    run_id = uuid.uuid4().hex[:12]
    token = run_id_var.set(run_id)

    start_time = time.time()

    response = await call_next(request)

    duration_ms = (time.time() - start_time) * 1000

    log_request(
        method=request.method,
        path=request.url.path,
        status_code=response.status_code,
        latency_ms=duration_ms,
        extra={"run_id": run_id},
    )

    MetricsCollector.record_http_request(path=request.url.path, status=response.status_code)

    response.headers["X-Run-ID"] = run_id
    run_id_var.reset(token)

    return response


@app.get("/plancherel/{n}")
def plancherel_endpoint(n: int):
    """Exact Plancherel measure on partitions of n, canonical order."""
    dist = plancherel_dist(n)
    return {
        "n": n,
        "states": [
            {"partition": str(lam), "dimension": str(dimension(lam)), "probability": exact_text(p)}
            for lam, p in dist.probabilities.items()
        ],
    }


@app.get("/characters/{n}")
def characters_endpoint(n: int):
    """Character table of S_n: rows are irreducibles, columns conjugacy classes."""
    if n < 1:
        raise ArgumentError(f"character tables need n >= 1, got {n}")
    Config.require_matrix(n, "character table")
    irreducibles, classes, table = character_table(n)
    return {
        "n": n,
        "irreducibles": [str(lam) for lam in irreducibles],
        "classes": [{"cycle_type": str(c), "class_size": str(c.class_size)} for c in classes],
        "table": [[str(value) for value in row] for row in table],
    }


@app.get("/chains/{kind}/{n}")
def chains_endpoint(
    kind: ChainKind,
    n: int,
    k: int = Query(default=1, ge=1),
    spectrum: bool = Query(default=False, description="Include the exact spectral certificate"),
):
    """Exact transition matrix of a chain on partitions of n."""
    spec = ChainSpec(n, kind, k)
    payload = transition_matrix(spec).to_json_dict()
    if spectrum:
        certificate = spectral_certificate(spec)
        payload["spectrum"] = {
            "valid": certificate.valid,
            "beta": exact_text(certificate.beta),
            "rank": certificate.rank,
            "eigenpairs": [entry.model_dump() for entry in certificate.entries()],
            "failures": certificate.failures,
        }
    return payload


@app.get("/tensor/{n}")
def tensor_endpoint(n: int, k: int = Query(default=1, ge=1), r: int = Query(default=1, ge=0)):
    """Multiplicities in the r-th tensor power of Ind_{S_(n-k)}^{S_n}(1)."""
    if n >= 3:
        return deviation_report(n, k, r).model_dump(mode="json")
    vector = tensor_multiplicities(n, k, r)
    return {
        "n": n,
        "k": k,
        "r": r,
        "multiplicities": {str(lam): str(m) for lam, m in vector.multiplicities.items()},
    }


@app.post("/experiments/clt")
def clt_endpoint(body: CltRequest):
    """
    Run the Monte Carlo CLT experiment and archive it.

    Reruns with the same (n, count, seed, pair_count, chunk_size) are
    recognised as duplicates by the archive.
    """
    parameters = body.model_dump()
    with ExperimentLogger("clt", parameters) as run:
        start = time.time()
        result = clt_experiment(body.n, body.count, body.seed, body.pair_count)
        report = make_report(
            command="clt",
            parameters={**parameters, "chunk_size": result.chunk_size},
            seed=body.seed,
            results=result.model_dump(),
            assertions={"within_bound": result.within_bound, "pathwise_bound": result.pathwise_violations == 0},
        )
        run.passed = report.passed
        MetricsCollector.record_experiment("clt", time.time() - start)
    key, inserted = storage.insert_report(report)
    return {"report_key": key, "stored": inserted, "report": result.model_dump()}


@app.get("/reports", response_model=ReportListResponse)
async def list_reports(
    limit: int = Query(default=50, ge=1, le=100),
    offset: int = Query(default=0, ge=0),
    command: Optional[str] = Query(default=None, description="Filter by command"),
    passed: Optional[bool] = Query(default=None, description="Filter by outcome"),
):
    """
    Archived reports with pagination and filtering.

    Ordering is deterministic: created_at ASC, report_key ASC.
    """
    try:
        reports, total = storage.get_reports(limit=limit, offset=offset, command=command, passed=passed)
    except Exception as e:
        logger.error(f"Error retrieving reports: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal server error")

    logger.info(f"Retrieved {len(reports)} reports (limit={limit}, offset={offset}, total={total})")
    return ReportListResponse(data=reports, total=total, limit=limit, offset=offset)


@app.get("/reports/stats", response_model=ReportStatsResponse)
async def report_stats():
    """Archive totals and per-command counts."""
    try:
        stats = storage.get_stats()
    except Exception as e:
        logger.error(f"Error retrieving report stats: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal server error")
    return ReportStatsResponse(**stats)


@app.get("/reports/{key}", response_model=ReportSummary)
async def get_report(key: str):
    report = storage.get_report(key)
    if report is None:
        raise HTTPException(status_code=404, detail="report not found")
    return report


@app.get("/health/live", response_model=HealthResponse)
async def liveness_check():
    """
    Liveness probe - checks if application is running.
    Always returns 200 when server is up.
    """
    return HealthResponse(status="ok", timestamp=datetime.now(timezone.utc))


@app.get("/health/ready", response_model=HealthResponse)
async def readiness_check():
    """
    Readiness probe - returns 200 only if the configuration is valid and the
    report archive is reachable. Otherwise returns 503.
    """
    if not Config.is_ready():
        raise HTTPException(status_code=503, detail="invalid configuration")

    if not storage.health_check():
        raise HTTPException(status_code=503, detail="Report archive not ready")

    return HealthResponse(status="ok", timestamp=datetime.now(timezone.utc), database="connected")


@app.get("/metrics")
async def metrics_endpoint():
    """
    Prometheus metrics endpoint.

    Exposes:
    - http_requests_total: HTTP requests by path and status
    - samples_drawn_total: partitions drawn by sampler
    - identity_checks_total: verification checks by suite and result
    - experiment_duration_seconds: experiment wall-clock time
    """
    if not Config.ENABLE_METRICS:
        raise HTTPException(status_code=404, detail="Metrics disabled")

    metrics_data, content_type = get_metrics()
    return Response(content=metrics_data, media_type=content_type)


@app.get("/")
async def root():
    """Root endpoint with API information."""
    return {
        "service": "Plancherel Stein Service",
        "version": __version__,
        "endpoints": {
            "plancherel": "GET /plancherel/{n}",
            "characters": "GET /characters/{n}",
            "chains": "GET /chains/{kind}/{n}?k=1&spectrum=false",
            "tensor": "GET /tensor/{n}?k=1&r=1",
            "clt": "POST /experiments/clt",
            "reports": "GET /reports",
            "report_stats": "GET /reports/stats",
            "health": {
                "liveness": "GET /health/live",
                "readiness": "GET /health/ready",
            },
            "metrics": "GET /metrics",
        },
    }


def serve(host: Optional[str] = None, port: Optional[int] = None) -> None:
    import uvicorn

    host = host or Config.HOST
    port = port or Config.PORT
    logger.info(f"Starting server on {host}:{port}")
    uvicorn.run(app, host=host, port=port, log_config=None)
