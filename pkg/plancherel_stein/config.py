"""
Configuration management following 12-factor app principles.
All settings are loaded from environment variables with sensible defaults.
"""
import os

from plancherel_stein.errors import ResourceLimitError


class Config:
    """Application configuration loaded from environment variables."""

    # Caps
    EXACT_CAP: int = int(os.getenv("PLANCHEREL_EXACT_CAP", "8"))
    ENUM_CAP: int = int(os.getenv("PLANCHEREL_ENUM_CAP", "40"))
    MATRIX_CAP: int = int(os.getenv("PLANCHEREL_MATRIX_CAP", "12"))

    # Batch sampling
    WORKERS: int = int(os.getenv("PLANCHEREL_WORKERS", "1"))
    CHUNK_SIZE: int = int(os.getenv("PLANCHEREL_CHUNK_SIZE", "10000"))

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FORMAT: str = os.getenv("LOG_FORMAT", "json")  # json or text

    # Report archive
    REPORT_DB_PATH: str = os.getenv("REPORT_DB_PATH", "./data/reports.db")

    # Metrics
    ENABLE_METRICS: bool = os.getenv("ENABLE_METRICS", "true").lower() == "true"

    # Service
    HOST: str = os.getenv("HOST", "127.0.0.1")
    PORT: int = int(os.getenv("PORT", "8000"))

    @classmethod
    def validate(cls) -> bool:
        """
        Validate critical configuration.
        Returns True if valid, False otherwise.
        """
        if min(cls.EXACT_CAP, cls.ENUM_CAP, cls.MATRIX_CAP) < 1:
            return False
        if cls.WORKERS < 1 or cls.CHUNK_SIZE < 1:
            return False
        return True

    @classmethod
    def is_ready(cls) -> bool:
        """Check if the service can answer computation requests."""
        return cls.validate()

    @classmethod
    def require_exact(cls, n: int, what: str = "exact verification") -> None:
        """Raise ResourceLimitError if n is above the exact-verification cap."""
        if n > cls.EXACT_CAP:
            raise ResourceLimitError(what, n, cls.EXACT_CAP)

    @classmethod
    def require_enumerable(cls, n: int, what: str = "enumeration") -> None:
        """Raise ResourceLimitError if partitions of n are too many to enumerate."""
        if n > cls.ENUM_CAP:
            raise ResourceLimitError(what, n, cls.ENUM_CAP)

    @classmethod
    def require_matrix(cls, n: int, what: str = "transition matrix") -> None:
        """Raise ResourceLimitError if an exact p(n) x p(n) matrix is too large."""
        if n > cls.MATRIX_CAP:
            raise ResourceLimitError(what, n, cls.MATRIX_CAP)
