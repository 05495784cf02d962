"""
Prometheus metrics for monitoring.
Includes sampling and identity-check counters plus run-time histograms.
"""
from prometheus_client import Counter, Histogram, generate_latest, CONTENT_TYPE_LATEST

from plancherel_stein.config import Config


# HTTP request counters (service only)
http_requests_total = Counter(
    'http_requests_total',
    'Total number of HTTP requests',
    ['path', 'status']
)

# Monte Carlo draws by sampler
samples_drawn_total = Counter(
    'samples_drawn_total',
    'Total number of partitions drawn',
    ['method']
)

# Exact identity and property checks
identity_checks_total = Counter(
    'identity_checks_total',
    'Total number of verification checks run',
    ['suite', 'result']
)

# Experiment run time in seconds
experiment_duration_seconds = Histogram(
    'experiment_duration_seconds',
    'Wall-clock time of CLI and service experiments',
    ['command'],
    buckets=[0.1, 0.5, 1, 5, 10, 30, 60, 120, 300]
)


class MetricsCollector:
    """Helper class for collecting metrics."""

    @staticmethod
    def record_http_request(path: str, status: int) -> None:
        """Record HTTP request metrics."""
        if not Config.ENABLE_METRICS:
            return

        http_requests_total.labels(path=path, status=str(status)).inc()

    @staticmethod
    def record_samples(method: str, count: int) -> None:
        """Record partitions drawn by a sampler ("growth", "rsk", "updown", ...)."""
        if not Config.ENABLE_METRICS or count <= 0:
            return

        samples_drawn_total.labels(method=method).inc(count)

    @staticmethod
    def record_check(suite: str, passed: bool) -> None:
        """
        Record one verification check.

        Args:
            suite: Suite name, e.g. "characters" or "stein"
            passed: Whether the check passed
        """
        if not Config.ENABLE_METRICS:
            return

        identity_checks_total.labels(suite=suite, result="pass" if passed else "fail").inc()

    @staticmethod
    def record_experiment(command: str, duration_seconds: float) -> None:
        """Record how long a CLI or service experiment took."""
        if not Config.ENABLE_METRICS:
            return

        experiment_duration_seconds.labels(command=command).observe(duration_seconds)


def get_metrics() -> tuple[bytes, str]:
    """
    Get current metrics in Prometheus format.

    Returns:
        Tuple of (metrics_data, content_type)
    """
    return generate_latest(), CONTENT_TYPE_LATEST
