"""SQLite connection management and ordered-migration runner.

Every operation gets a fresh connection; SQLite's single-writer locking plus
BEGIN IMMEDIATE transactions give us linearizable per-entity mutations.
"""

from __future__ import annotations

import sqlite3
from contextlib import closing, contextmanager
from pathlib import Path
from typing import Iterator

MIGRATIONS_DIR = Path(__file__).parent / "migrations"


def _statements(sql: str) -> list[str]:
    # Good enough for our migration files: no semicolons inside literals.
    return [stmt.strip() for stmt in sql.split(";") if stmt.strip()]


class Database:
    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        # WAL lets readers proceed during writes (CLI tools alongside the service).
        with closing(self.connect()) as conn:
            conn.execute("PRAGMA journal_mode=WAL")

    def connect(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self.path, timeout=30.0, isolation_level=None)
        conn.row_factory = sqlite3.Row
        conn.execute("PRAGMA foreign_keys=ON")
        conn.execute("PRAGMA busy_timeout=30000")
        return conn

    @contextmanager
    def transaction(self, immediate: bool = False) -> Iterator[sqlite3.Connection]:
        """Open a connection, run a transaction, commit on success.

        ``immediate=True`` takes the write lock up front, which is what the
        compare-and-swap operations rely on.
        """
        conn = self.connect()
        try:
            conn.execute("BEGIN IMMEDIATE" if immediate else "BEGIN")
            yield conn
            conn.execute("COMMIT")
        except BaseException:
            conn.execute("ROLLBACK")
            raise
        finally:
            conn.close()

    def applied_migrations(self) -> list[str]:
        with closing(self.connect()) as conn:
            conn.execute(
                "CREATE TABLE IF NOT EXISTS schema_migrations"
                " (name TEXT PRIMARY KEY, applied_at TEXT NOT NULL)"
            )
            rows = conn.execute("SELECT name FROM schema_migrations ORDER BY name").fetchall()
        return [r["name"] for r in rows]

    def migrate(self) -> list[str]:
        """Apply pending migration files in filename order; returns those applied."""
        applied = set(self.applied_migrations())
        newly_applied = []
        for script in sorted(MIGRATIONS_DIR.glob("*.sql")):
            if script.name in applied:
                continue
            with self.transaction(immediate=True) as conn:
                for statement in _statements(script.read_text(encoding="utf-8")):
                    conn.execute(statement)
                conn.execute(
                    "INSERT INTO schema_migrations (name, applied_at)"
                    " VALUES (?, datetime('now'))",
                    (script.name,),
                )
            newly_applied.append(script.name)
        return newly_applied
