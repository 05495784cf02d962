"""
SQLite archive of experiment reports with idempotent insertion.
Primary key on report_key (a digest of command, parameters and seed) ensures
that rerunning a seeded experiment never creates a second row.
"""
import hashlib
import json
import sqlite3
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Tuple

from plancherel_stein.config import Config
from plancherel_stein.logging_utils import get_logger
from plancherel_stein.models import CommandStats, ExperimentReport, ReportSummary


logger = get_logger(__name__)


def report_key(report: ExperimentReport) -> str:
    """sha256 over the canonical (command, parameters, seed) triple."""
    identity = json.dumps(
        {"command": report.command, "parameters": report.parameters, "seed": report.seed},
        sort_keys=True,
        separators=(",", ":"),
        default=str,
    )
    return hashlib.sha256(identity.encode()).hexdigest()


class ReportStorage:
    """SQLite-based report storage with idempotent operations."""

    def __init__(self, db_path: Optional[str] = None):
        """Initialize storage and ensure database exists."""
        self.db_path = db_path or Config.REPORT_DB_PATH
        self._ensure_database()

    def _ensure_database(self) -> None:
        """Create database directory and initialize schema."""
        db_file = Path(self.db_path)
        db_file.parent.mkdir(parents=True, exist_ok=True)

        with self._get_connection() as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS reports (
                    report_key TEXT PRIMARY KEY,
                    command TEXT NOT NULL,
                    seed INTEGER,
                    passed INTEGER NOT NULL,
                    payload TEXT NOT NULL,
                    created_at TEXT NOT NULL
                )
            """)

            conn.execute("""
                CREATE INDEX IF NOT EXISTS idx_command
                ON reports(command)
            """)

            conn.execute("""
                CREATE INDEX IF NOT EXISTS idx_created_at
                ON reports(created_at)
            """)

            conn.commit()
            logger.info(f"Report archive initialized at {self.db_path}")

    def _get_connection(self) -> sqlite3.Connection:
        """Get database connection with row factory."""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        return conn

    def insert_report(self, report: ExperimentReport) -> Tuple[str, bool]:
        """
        Archive a report.

        Returns:
            (report_key, True) if the report was inserted, (report_key, False)
            if a report with the same key already existed.
        """
        key = report_key(report)
        try:
            with self._get_connection() as conn:
                conn.execute(
                    """
                    INSERT INTO reports
                    (report_key, command, seed, passed, payload, created_at)
                    VALUES (?, ?, ?, ?, ?, ?)
                    """,
                    (
                        key,
                        report.command,
                        report.seed,
                        int(report.passed),
                        report.payload_json(),
                        datetime.now(timezone.utc).isoformat(),
                    ),
                )
                conn.commit()
                logger.info(f"Archived report: {report.command} {key[:12]}")
                return key, True
        except sqlite3.IntegrityError:
            logger.info(f"Report already archived: {report.command} {key[:12]}")
            return key, False

    def get_reports(
        self,
        limit: int = 50,
        offset: int = 0,
        command: Optional[str] = None,
        passed: Optional[bool] = None,
    ) -> Tuple[List[ReportSummary], int]:
        """
        Retrieve reports with pagination and filtering.

        Returns:
            Tuple of (reports list, total count)
        """
        with self._get_connection() as conn:
            where_clauses = []
            params: list = []

            if command:
                where_clauses.append("command = ?")
                params.append(command.strip().lower())

            if passed is not None:
                where_clauses.append("passed = ?")
                params.append(int(passed))

            where_sql = " AND ".join(where_clauses) if where_clauses else "1=1"

            count_query = f"SELECT COUNT(*) as total FROM reports WHERE {where_sql}"
            total = conn.execute(count_query, params).fetchone()["total"]

            # Deterministic ordering: oldest first, key as tie-breaker
            query = f"""
                SELECT report_key, command, seed, passed, payload, created_at
                FROM reports
                WHERE {where_sql}
                ORDER BY created_at ASC, report_key ASC
                LIMIT ? OFFSET ?
            """
            params.extend([limit, offset])

            rows = conn.execute(query, params).fetchall()

            reports = [
                ReportSummary(
                    report_key=row["report_key"],
                    command=row["command"],
                    seed=row["seed"],
                    passed=bool(row["passed"]),
                    created_at=datetime.fromisoformat(row["created_at"]),
                    payload=json.loads(row["payload"]),
                )
                for row in rows
            ]

            return reports, total

    def get_report(self, key: str) -> Optional[ReportSummary]:
        with self._get_connection() as conn:
            row = conn.execute(
                "SELECT report_key, command, seed, passed, payload, created_at FROM reports WHERE report_key = ?",
                (key,),
            ).fetchone()
        if row is None:
            return None
        return ReportSummary(
            report_key=row["report_key"],
            command=row["command"],
            seed=row["seed"],
            passed=bool(row["passed"]),
            created_at=datetime.fromisoformat(row["created_at"]),
            payload=json.loads(row["payload"]),
        )

    def get_stats(self) -> dict:
        """
        Get archive statistics.

        Returns:
            Dictionary with total_reports, failed_reports, per_command,
            first_report_at and last_report_at.
        """
        with self._get_connection() as conn:
            totals = conn.execute("""
                SELECT COUNT(*) as count,
                       COALESCE(SUM(1 - passed), 0) as failed,
                       MIN(created_at) as first_at,
                       MAX(created_at) as last_at
                FROM reports
            """).fetchone()

            per_command = conn.execute("""
                SELECT command, COUNT(*) as count, COALESCE(SUM(1 - passed), 0) as failed
                FROM reports
                GROUP BY command
                ORDER BY count DESC, command ASC
            """).fetchall()

            return {
                "total_reports": totals["count"],
                "failed_reports": totals["failed"],
                "per_command": [
                    CommandStats(command=row["command"], count=row["count"], failed=row["failed"])
                    for row in per_command
                ],
                "first_report_at": datetime.fromisoformat(totals["first_at"]) if totals["first_at"] else None,
                "last_report_at": datetime.fromisoformat(totals["last_at"]) if totals["last_at"] else None,
            }

    def health_check(self) -> bool:
        """Check if database is accessible."""
        try:
            with self._get_connection() as conn:
                conn.execute("SELECT 1").fetchone()
            return True
        except Exception as e:
            logger.error(f"Report archive health check failed: {e}")
            return False
