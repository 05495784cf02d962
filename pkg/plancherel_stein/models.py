"""
Pydantic models for reports, verification results and service payloads.

Exact quantities are serialized as strings ("35/144", big integers as decimal
strings) and partitions in their bracket text form ("[4,2,1]"), so JSON output
never loses precision.
"""
import json
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, field_validator


def exact_text(value: Union[int, Fraction]) -> str:
    """Serialize an exact integer or rational as "p" or "p/q"."""
    return str(Fraction(value))


def parse_exact(text: str) -> Fraction:
    return Fraction(text)


class CheckResult(BaseModel):
    """Outcome of one exact identity or Monte Carlo check."""

    name: str = Field(..., min_length=1, description="Identity or property checked")
    passed: bool
    checked: int = Field(default=0, ge=0, description="Number of cases evaluated")
    failures: List[str] = Field(default_factory=list, description="First offending cases")
    details: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_failures(
        cls, name: str, checked: int, failures: List[str], limit: int = 20, **details: Any
    ) -> "CheckResult":
        return cls(
            name=name,
            passed=not failures,
            checked=checked,
            failures=failures[:limit],
            details=details,
        )


class SuiteReport(BaseModel):
    """All checks run for one verification suite."""

    suite: str
    nmax: int
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class ExperimentReport(BaseModel):
    """Serialized record of one CLI or service run."""

    command: str = Field(..., min_length=1)
    parameters: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    version: str
    results: Dict[str, Any] = Field(default_factory=dict)
    assertions: Dict[str, bool] = Field(default_factory=dict)

    @field_validator('command')
    @classmethod
    def validate_command(cls, v: str) -> str:
        """Command names are stored lower-case without surrounding whitespace."""
        if not v.strip():
            raise ValueError("command cannot be empty or whitespace only")
        return v.strip().lower()

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())

    def failed_assertions(self) -> List[str]:
        return [name for name, ok in self.assertions.items() if not ok]

    def payload_json(self) -> str:
        """Canonical JSON of everything except the timestamp header."""
        data = self.model_dump(mode="json", exclude={"timestamp"})
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def to_json(self) -> str:
        """Pretty JSON with the timestamp isolated as the first field."""
        data = self.model_dump(mode="json")
        ordered = {"timestamp": data.pop("timestamp")}
        ordered.update(dict(sorted(data.items())))
        return json.dumps(ordered, indent=2, sort_keys=False)


class SampleRow(BaseModel):
    """One sampled partition as written to CSV."""

    index: int = Field(..., ge=0)
    partition: str
    first_row: int = Field(..., ge=0)
    first_column: int = Field(..., ge=0)
    w: float


class MixingRow(BaseModel):
    """Distance to Plancherel measure after r steps of an exact chain."""

    r: int = Field(..., ge=0)
    tv: str
    tv_float: float
    l2_squared: str
    l2: float
    bound: float
    bound_holds: bool


class SpectralEntry(BaseModel):
    """One eigenpair of a chain, indexed by a conjugacy class."""

    cycle_type: str
    class_size: str
    eigenvalue: str
    eigen_identity: bool
    orthonormal: bool


class TensorRow(BaseModel):
    """Multiplicity of one irreducible in a tensor power."""

    partition: str
    multiplicity: str
    dimension: str
    normalized: str
    deviation: str


class CltReport(BaseModel):
    """Monte Carlo normal-approximation experiment for the character-ratio statistic."""

    n: int = Field(..., ge=2)
    samples: int = Field(..., ge=1)
    seed: int
    chunk_size: int = Field(..., ge=1, description="Samples per seeded stream")
    kolmogorov_distance: float = Field(..., ge=0.0, le=1.0)
    bound: float = Field(..., description="40.1 n^(-1/4)")
    within_bound: bool
    refined_bound: float = Field(..., description="Unsimplified Stein bound at this n")
    w_mean: float
    w_variance: float
    pair_samples: int = Field(..., ge=0)
    jump_mean: float
    jump_variance: float
    jump_third_abs_moment: float
    term2_bound: float
    pathwise_violations: int = Field(..., ge=0)


class CltRequest(BaseModel):
    """Body of POST /experiments/clt."""

    n: int = Field(..., ge=2, le=4096, description="Partition size")
    count: int = Field(default=10000, ge=1, le=200000, description="Number of samples")
    seed: int = Field(default=1, ge=0)
    pair_count: Optional[int] = Field(default=None, ge=0, le=200000)


class ReportSummary(BaseModel):
    """Archived report as listed by the service."""

    report_key: str
    command: str
    seed: Optional[int] = None
    passed: bool
    created_at: datetime
    payload: Dict[str, Any]


class ReportListResponse(BaseModel):
    """Paginated report list response."""

    data: List[ReportSummary]
    total: int
    limit: int
    offset: int


class CommandStats(BaseModel):
    """Archive counts for a single command."""

    command: str
    count: int
    failed: int


class ReportStatsResponse(BaseModel):
    """Archive statistics response."""

    total_reports: int
    failed_reports: int
    per_command: List[CommandStats]
    first_report_at: Optional[datetime] = None
    last_report_at: Optional[datetime] = None


class HealthResponse(BaseModel):
    """Health check response."""

    status: str
    timestamp: datetime
    database: Optional[str] = None


def make_report(
    command: str,
    parameters: Dict[str, Any],
    results: Dict[str, Any],
    assertions: Optional[Dict[str, bool]] = None,
    seed: Optional[int] = None,
) -> ExperimentReport:
    """ExperimentReport stamped with the package version."""
    from plancherel_stein import __version__

    return ExperimentReport(
        command=command,
        parameters=parameters,
        seed=seed,
        version=__version__,
        results=results,
        assertions=assertions or {},
    )
