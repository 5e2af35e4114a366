"""Durable storage for all domain entities and the atomic workflow operations.

Deletion is a tombstone (state = deleted), never row removal, so statistics
stay reconstructible; only blob garbage collection physically removes data.
"""

from __future__ import annotations

import base64
import json
import sqlite3
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Sequence

from ..domain import (
    LIVE_STATES,
    DialectTag,
    Prompt,
    QAReport,
    ReviewOutcome,
    ReviewVerdict,
    Role,
    Submission,
    SubmissionEvent,
    SubmissionState,
    Task,
    TaskKind,
    TaskStatus,
    UserAccount,
    ValidationReview,
    apply_review,
    can_review,
    format_timestamp,
    new_id,
    parse_timestamp,
    submit_event,
    utcnow,
)
from .blobs import BlobStore
from .database import Database

PAGE_SIZE = 50

_NON_LIVE = tuple(s.value for s in SubmissionState if s not in LIVE_STATES)
_NON_LIVE_SQL = ",".join("?" for _ in _NON_LIVE)


class StoreError(Exception):
    pass


class NotFound(StoreError):
    pass


class StaleState(StoreError):
    """Compare-and-swap failed: the stored state moved under the caller."""


class Unauthorized(StoreError):
    pass


class UserBlocked(StoreError):
    pass


class TaskClosed(StoreError):
    pass


class EmailTaken(StoreError):
    pass


class DuplicatePrompt(StoreError):
    pass


class DuplicateLiveSubmission(StoreError):
    """The (prompt, user) pair already has a submission in a live state."""


class CannotReview(StoreError):
    pass


@dataclass(frozen=True)
class SubmissionRecord:
    submission: Submission
    flagged_for_admin: bool


def _user_from_row(row: sqlite3.Row) -> UserAccount:
    return UserAccount(
        user_id=row["user_id"],
        handle=row["handle"],
        email=row["email"],
        roles=frozenset(Role(r) for r in json.loads(row["roles"])),
        blocked=bool(row["blocked"]),
        created_at=parse_timestamp(row["created_at"]),
    )


def _task_from_row(row: sqlite3.Row) -> Task:
    return Task(
        task_id=row["task_id"],
        title=row["title"],
        kind=TaskKind(row["kind"]),
        dialects=frozenset(DialectTag.from_label(d) for d in json.loads(row["dialects"])),
        status=TaskStatus(row["status"]),
        created_by=row["created_by"],
        created_at=parse_timestamp(row["created_at"]),
    )


def _prompt_from_row(row: sqlite3.Row) -> Prompt:
    return Prompt(
        prompt_id=row["prompt_id"],
        task_id=row["task_id"],
        text=row["text"],
        dialect=DialectTag(country=row["country"], city=row["city"] or None),
        target_recordings=row["target_recordings"],
        active=bool(row["active"]),
    )


def _submission_from_row(row: sqlite3.Row) -> Submission:
    qa = QAReport.from_dict(json.loads(row["qa_json"])) if row["qa_json"] else None
    return Submission(
        submission_id=row["submission_id"],
        prompt_id=row["prompt_id"],
        user_id=row["user_id"],
        audio_ref=row["audio_ref"],
        duration_s=row["duration_s"],
        sample_rate_hz=row["sample_rate_hz"],
        state=SubmissionState(row["state"]),
        qa=qa,
        created_at=parse_timestamp(row["created_at"]),
    )


def _review_from_row(row: sqlite3.Row) -> ValidationReview:
    return ValidationReview(
        review_id=row["review_id"],
        submission_id=row["submission_id"],
        reviewer_id=row["reviewer_id"],
        verdict=ReviewVerdict(row["verdict"]),
        annotation=row["annotation"],
        feedback=row["feedback"],
        created_at=parse_timestamp(row["created_at"]),
    )


def _encode_cursor(created_at: str, submission_id: str) -> str:
    raw = json.dumps([created_at, submission_id]).encode()
    return base64.urlsafe_b64encode(raw).decode()


def _decode_cursor(cursor: str) -> tuple[str, str]:
    try:
        created_at, submission_id = json.loads(base64.urlsafe_b64decode(cursor.encode()))
        return str(created_at), str(submission_id)
    except (ValueError, TypeError) as exc:
        raise StoreError(f"bad cursor: {exc}") from exc


class Repository:
    def __init__(self, db: Database, blobs: BlobStore) -> None:
        self.db = db
        self.blobs = blobs

    # -- users ---------------------------------------------------------------

    def create_user(
        self,
        handle: str,
        email: str,
        password_hash: str,
        roles: Iterable[Role] = (Role.CONTRIBUTOR,),
    ) -> UserAccount:
        user = UserAccount(
            user_id=new_id("u"), handle=handle, email=email, roles=frozenset(roles)
        )
        with self.db.transaction(immediate=True) as conn:
            try:
                conn.execute(
                    "INSERT INTO users (user_id, handle, email, password_hash, roles,"
                    " blocked, created_at) VALUES (?,?,?,?,?,?,?)",
                    (
                        user.user_id,
                        user.handle,
                        user.email,
                        password_hash,
                        json.dumps(sorted(r.value for r in user.roles)),
                        0,
                        format_timestamp(user.created_at),
                    ),
                )
            except sqlite3.IntegrityError as exc:
                raise EmailTaken(user.email) from exc
        return user

    def get_user(self, user_id: str) -> UserAccount:
        with self.db.transaction() as conn:
            row = conn.execute("SELECT * FROM users WHERE user_id = ?", (user_id,)).fetchone()
        if row is None:
            raise NotFound(f"user {user_id}")
        return _user_from_row(row)

    def find_credentials(self, email: str) -> tuple[UserAccount, str] | None:
        with self.db.transaction() as conn:
            row = conn.execute(
                "SELECT * FROM users WHERE email = ?", (email.strip().lower(),)
            ).fetchone()
        if row is None:
            return None
        return _user_from_row(row), row["password_hash"]

    def list_users(self) -> list[UserAccount]:
        with self.db.transaction() as conn:
            rows = conn.execute("SELECT * FROM users ORDER BY created_at, user_id").fetchall()
        return [_user_from_row(r) for r in rows]

    def set_blocked(self, user_id: str, blocked: bool) -> None:
        with self.db.transaction(immediate=True) as conn:
            cur = conn.execute(
                "UPDATE users SET blocked = ? WHERE user_id = ?", (int(blocked), user_id)
            )
            if cur.rowcount != 1:
                raise NotFound(f"user {user_id}")

    def add_role(self, user_id: str, role: Role) -> UserAccount:
        with self.db.transaction(immediate=True) as conn:
            row = conn.execute("SELECT * FROM users WHERE user_id = ?", (user_id,)).fetchone()
            if row is None:
                raise NotFound(f"user {user_id}")
            roles = set(json.loads(row["roles"]))
            roles.add(role.value)
            conn.execute(
                "UPDATE users SET roles = ? WHERE user_id = ?",
                (json.dumps(sorted(roles)), user_id),
            )
            row = conn.execute("SELECT * FROM users WHERE user_id = ?", (user_id,)).fetchone()
        return _user_from_row(row)

    def user_submission_counts(self, user_id: str) -> dict[str, int]:
        with self.db.transaction() as conn:
            rows = conn.execute(
                "SELECT state, COUNT(*) AS n FROM submissions WHERE user_id = ? GROUP BY state",
                (user_id,),
            ).fetchall()
        counts = {state.value: 0 for state in SubmissionState}
        for row in rows:
            counts[row["state"]] = row["n"]
        return counts

    # -- sessions ------------------------------------------------------------

    def create_session(self, token_hash: str, user_id: str, expires_at: datetime) -> None:
        with self.db.transaction(immediate=True) as conn:
            conn.execute(
                "INSERT INTO sessions (token_hash, user_id, expires_at) VALUES (?,?,?)",
                (token_hash, user_id, format_timestamp(expires_at)),
            )

    def find_session(self, token_hash: str) -> tuple[UserAccount, datetime] | None:
        with self.db.transaction() as conn:
            row = conn.execute(
                "SELECT u.*, s.expires_at AS session_expires_at FROM sessions s"
                " JOIN users u ON u.user_id = s.user_id WHERE s.token_hash = ?",
                (token_hash,),
            ).fetchone()
        if row is None:
            return None
        return _user_from_row(row), parse_timestamp(row["session_expires_at"])

    def delete_session(self, token_hash: str) -> None:
        with self.db.transaction(immediate=True) as conn:
            conn.execute("DELETE FROM sessions WHERE token_hash = ?", (token_hash,))

    def delete_sessions_for(self, user_id: str) -> None:
        with self.db.transaction(immediate=True) as conn:
            conn.execute("DELETE FROM sessions WHERE user_id = ?", (user_id,))

    # -- tasks ---------------------------------------------------------------

    def create_task(
        self,
        title: str,
        kind: TaskKind,
        dialects: Iterable[DialectTag],
        created_by: str,
        status: TaskStatus = TaskStatus.OPEN,
    ) -> Task:
        task = Task(
            task_id=new_id("t"),
            title=title,
            kind=kind,
            dialects=frozenset(dialects),
            status=status,
            created_by=created_by,
        )
        with self.db.transaction(immediate=True) as conn:
            conn.execute(
                "INSERT INTO tasks (task_id, title, kind, dialects, status, created_by,"
                " created_at) VALUES (?,?,?,?,?,?,?)",
                (
                    task.task_id,
                    task.title,
                    task.kind.value,
                    json.dumps(sorted(d.label for d in task.dialects)),
                    task.status.value,
                    task.created_by,
                    format_timestamp(task.created_at),
                ),
            )
        return task

    def get_task(self, task_id: str) -> Task:
        with self.db.transaction() as conn:
            row = conn.execute("SELECT * FROM tasks WHERE task_id = ?", (task_id,)).fetchone()
        if row is None:
            raise NotFound(f"task {task_id}")
        return _task_from_row(row)

    def list_tasks(self, status: TaskStatus | None = None) -> list[Task]:
        query = "SELECT * FROM tasks"
        params: tuple = ()
        if status is not None:
            query += " WHERE status = ?"
            params = (status.value,)
        query += " ORDER BY created_at, task_id"
        with self.db.transaction() as conn:
            rows = conn.execute(query, params).fetchall()
        return [_task_from_row(r) for r in rows]

    # -- prompts -------------------------------------------------------------

    def add_prompts(
        self, task_id: str, rows: Sequence[tuple[str, DialectTag, int]], normalizer
    ) -> list[Prompt]:
        """Insert a batch of (text, dialect, target) rows, all-or-nothing.

        ``normalizer`` maps prompt text to its dedup key. Raises
        DuplicatePrompt (naming the first offending row, 1-based) when a row
        collides with an existing prompt or an earlier row in the batch.
        """
        prompts = [
            Prompt(
                prompt_id=new_id("p"),
                task_id=task_id,
                text=text,
                dialect=dialect,
                target_recordings=target,
            )
            for text, dialect, target in rows
        ]
        with self.db.transaction(immediate=True) as conn:
            if conn.execute("SELECT 1 FROM tasks WHERE task_id = ?", (task_id,)).fetchone() is None:
                raise NotFound(f"task {task_id}")
            for index, prompt in enumerate(prompts, start=1):
                try:
                    conn.execute(
                        "INSERT INTO prompts (prompt_id, task_id, text, normalized_text,"
                        " country, city, target_recordings, active) VALUES (?,?,?,?,?,?,?,?)",
                        (
                            prompt.prompt_id,
                            prompt.task_id,
                            prompt.text,
                            normalizer(prompt.text),
                            prompt.dialect.country,
                            prompt.dialect.city or "",
                            prompt.target_recordings,
                            1,
                        ),
                    )
                except sqlite3.IntegrityError as exc:
                    raise DuplicatePrompt(f"row {index} duplicates an existing prompt") from exc
        return prompts

    def get_prompt(self, prompt_id: str) -> Prompt:
        with self.db.transaction() as conn:
            row = conn.execute(
                "SELECT * FROM prompts WHERE prompt_id = ?", (prompt_id,)
            ).fetchone()
        if row is None:
            raise NotFound(f"prompt {prompt_id}")
        return _prompt_from_row(row)

    def list_prompts(self, task_id: str) -> list[Prompt]:
        with self.db.transaction() as conn:
            rows = conn.execute(
                "SELECT * FROM prompts WHERE task_id = ? ORDER BY prompt_id", (task_id,)
            ).fetchall()
        return [_prompt_from_row(r) for r in rows]

    def next_prompt_for(self, user_id: str, task_id: str, dialect: DialectTag) -> Prompt | None:
        """Coverage-balanced assignment: among active prompts of the dialect the
        user has no live submission for and whose live count is below target,
        pick the fewest-recorded one, ties broken by ascending prompt_id.
        """
        user = self.get_user(user_id)
        if user.blocked:
            raise UserBlocked(user_id)
        task = self.get_task(task_id)
        if task.status is not TaskStatus.OPEN:
            raise TaskClosed(task_id)
        query = f"""
            SELECT * FROM (
                SELECT p.*,
                       (SELECT COUNT(*) FROM submissions s
                         WHERE s.prompt_id = p.prompt_id
                           AND s.state NOT IN ({_NON_LIVE_SQL})) AS live_count
                  FROM prompts p
                 WHERE p.task_id = ? AND p.active = 1 AND p.country = ? AND p.city = ?
                   AND NOT EXISTS (SELECT 1 FROM submissions s2
                                    WHERE s2.prompt_id = p.prompt_id
                                      AND s2.user_id = ?
                                      AND s2.state NOT IN ({_NON_LIVE_SQL}))
            ) WHERE live_count < target_recordings
            ORDER BY live_count, prompt_id
            LIMIT 1
        """
        params = (
            *_NON_LIVE,
            task_id,
            dialect.country,
            dialect.city or "",
            user_id,
            *_NON_LIVE,
        )
        with self.db.transaction() as conn:
            row = conn.execute(query, params).fetchone()
        return _prompt_from_row(row) if row else None

    # -- submissions ---------------------------------------------------------

    def insert_submission(self, submission: Submission) -> None:
        """Persist a new submission; re-checks the repeat-pair invariant inside
        the write transaction so concurrent uploads cannot both slip in.
        """
        with self.db.transaction(immediate=True) as conn:
            live = conn.execute(
                f"SELECT 1 FROM submissions WHERE prompt_id = ? AND user_id = ?"
                f" AND state NOT IN ({_NON_LIVE_SQL}) LIMIT 1",
                (submission.prompt_id, submission.user_id, *_NON_LIVE),
            ).fetchone()
            if live is not None:
                raise DuplicateLiveSubmission(
                    f"user {submission.user_id} already has a live submission"
                    f" for prompt {submission.prompt_id}"
                )
            conn.execute(
                "INSERT INTO submissions (submission_id, prompt_id, user_id, audio_ref,"
                " duration_s, sample_rate_hz, state, qa_json, confidence,"
                " flagged_for_admin, created_at) VALUES (?,?,?,?,?,?,?,?,?,?,?)",
                (
                    submission.submission_id,
                    submission.prompt_id,
                    submission.user_id,
                    submission.audio_ref,
                    submission.duration_s,
                    submission.sample_rate_hz,
                    submission.state.value,
                    json.dumps(submission.qa.to_dict()) if submission.qa else None,
                    submission.qa.confidence if submission.qa else None,
                    0,
                    format_timestamp(submission.created_at),
                ),
            )

    def get_submission(self, submission_id: str) -> Submission:
        return self.get_submission_record(submission_id).submission

    def get_submission_record(self, submission_id: str) -> SubmissionRecord:
        with self.db.transaction() as conn:
            row = conn.execute(
                "SELECT * FROM submissions WHERE submission_id = ?", (submission_id,)
            ).fetchone()
        if row is None:
            raise NotFound(f"submission {submission_id}")
        return SubmissionRecord(_submission_from_row(row), bool(row["flagged_for_admin"]))

    def submissions_for_digest(self, digest: str) -> list[Submission]:
        with self.db.transaction() as conn:
            rows = conn.execute(
                "SELECT * FROM submissions WHERE audio_ref = ?", (digest,)
            ).fetchall()
        return [_submission_from_row(r) for r in rows]

    def live_pair_exists(self, prompt_id: str, user_id: str) -> bool:
        with self.db.transaction() as conn:
            row = conn.execute(
                f"SELECT 1 FROM submissions WHERE prompt_id = ? AND user_id = ?"
                f" AND state NOT IN ({_NON_LIVE_SQL}) LIMIT 1",
                (prompt_id, user_id, *_NON_LIVE),
            ).fetchone()
        return row is not None

    def list_user_submissions(
        self, user_id: str, states: Iterable[SubmissionState] | None = None
    ) -> list[Submission]:
        query = "SELECT * FROM submissions WHERE user_id = ?"
        params: list = [user_id]
        if states is not None:
            wanted = [s.value for s in states]
            query += f" AND state IN ({','.join('?' for _ in wanted)})"
            params.extend(wanted)
        query += " ORDER BY created_at, submission_id"
        with self.db.transaction() as conn:
            rows = conn.execute(query, params).fetchall()
        return [_submission_from_row(r) for r in rows]

    def transition_atomically(
        self, submission_id: str, expected_state: SubmissionState, event: SubmissionEvent
    ) -> Submission:
        """Compare-and-swap: apply the event iff the stored state still equals
        ``expected_state`` at commit time. Exactly one of two concurrent
        identical calls can succeed.
        """
        with self.db.transaction(immediate=True) as conn:
            row = conn.execute(
                "SELECT * FROM submissions WHERE submission_id = ?", (submission_id,)
            ).fetchone()
            if row is None:
                raise NotFound(f"submission {submission_id}")
            if row["state"] != expected_state.value:
                raise StaleState(f"expected {expected_state.value}, stored {row['state']}")
            updated = submit_event(_submission_from_row(row), event)
            cur = conn.execute(
                "UPDATE submissions SET state = ? WHERE submission_id = ? AND state = ?",
                (updated.state.value, submission_id, expected_state.value),
            )
            if cur.rowcount != 1:
                raise StaleState(f"submission {submission_id} moved during update")
        return updated

    def apply_event(self, submission_id: str, event: SubmissionEvent) -> Submission:
        """Read-modify-write under the write lock (no expected-state argument)."""
        with self.db.transaction(immediate=True) as conn:
            row = conn.execute(
                "SELECT * FROM submissions WHERE submission_id = ?", (submission_id,)
            ).fetchone()
            if row is None:
                raise NotFound(f"submission {submission_id}")
            updated = submit_event(_submission_from_row(row), event)
            conn.execute(
                "UPDATE submissions SET state = ? WHERE submission_id = ?",
                (updated.state.value, submission_id),
            )
        return updated

    def cascade_delete_user(self, target_user_id: str, acting: UserAccount) -> int:
        """Tombstone every submission by the user; reviews they wrote survive
        but are marked reviewer-removed. Returns the number of submissions
        newly deleted.
        """
        if not acting.is_admin:
            raise Unauthorized("cascade delete requires the admin role")
        with self.db.transaction(immediate=True) as conn:
            if (
                conn.execute(
                    "SELECT 1 FROM users WHERE user_id = ?", (target_user_id,)
                ).fetchone()
                is None
            ):
                raise NotFound(f"user {target_user_id}")
            cur = conn.execute(
                "UPDATE submissions SET state = ? WHERE user_id = ? AND state != ?",
                (SubmissionState.DELETED.value, target_user_id, SubmissionState.DELETED.value),
            )
            conn.execute(
                "UPDATE reviews SET reviewer_removed = 1 WHERE reviewer_id = ?",
                (target_user_id,),
            )
            return cur.rowcount

    def admin_list_submissions(
        self,
        from_ts: datetime,
        to_ts: datetime,
        task_id: str | None = None,
        state: SubmissionState | None = None,
        min_confidence: float | None = None,
        max_confidence: float | None = None,
        cursor: str | None = None,
        page_size: int = PAGE_SIZE,
    ) -> tuple[list[SubmissionRecord], str | None]:
        """Time-filtered cursor pagination over [from, to), ordered by
        (created_at, submission_id)."""
        query = (
            "SELECT s.* FROM submissions s JOIN prompts p ON p.prompt_id = s.prompt_id"
            " WHERE s.created_at >= ? AND s.created_at < ?"
        )
        params: list = [format_timestamp(from_ts), format_timestamp(to_ts)]
        if task_id is not None:
            query += " AND p.task_id = ?"
            params.append(task_id)
        if state is not None:
            query += " AND s.state = ?"
            params.append(state.value)
        if min_confidence is not None:
            query += " AND s.confidence >= ?"
            params.append(min_confidence)
        if max_confidence is not None:
            query += " AND s.confidence <= ?"
            params.append(max_confidence)
        if cursor is not None:
            after_created, after_id = _decode_cursor(cursor)
            query += " AND (s.created_at > ? OR (s.created_at = ? AND s.submission_id > ?))"
            params.extend([after_created, after_created, after_id])
        query += " ORDER BY s.created_at, s.submission_id LIMIT ?"
        params.append(page_size + 1)
        with self.db.transaction() as conn:
            rows = conn.execute(query, params).fetchall()
        next_cursor = None
        if len(rows) > page_size:
            rows = rows[:page_size]
            last = rows[-1]
            next_cursor = _encode_cursor(last["created_at"], last["submission_id"])
        records = [
            SubmissionRecord(_submission_from_row(r), bool(r["flagged_for_admin"])) for r in rows
        ]
        return records, next_cursor

    # -- reviews -------------------------------------------------------------

    def post_review(
        self,
        submission_id: str,
        reviewer: UserAccount,
        verdict: ReviewVerdict,
        annotation: str | None,
        feedback: str | None,
        quorum: int,
    ) -> tuple[ValidationReview, ReviewOutcome]:
        """Store a review and fold it into the submission's state, atomically.

        The whole read-check-insert-transition sequence runs inside one write
        transaction, so two concurrent quorum-reaching reviews cannot both
        transition the submission.
        """
        with self.db.transaction(immediate=True) as conn:
            row = conn.execute(
                "SELECT * FROM submissions WHERE submission_id = ?", (submission_id,)
            ).fetchone()
            if row is None:
                raise NotFound(f"submission {submission_id}")
            submission = _submission_from_row(row)
            if not can_review(reviewer, submission):
                raise CannotReview(
                    f"user {reviewer.user_id} may not review {submission_id} now"
                )
            prior_rows = conn.execute(
                "SELECT * FROM reviews WHERE submission_id = ? ORDER BY created_at, review_id",
                (submission_id,),
            ).fetchall()
            priors = [_review_from_row(r) for r in prior_rows]
            review = ValidationReview(
                review_id=new_id("r"),
                submission_id=submission_id,
                reviewer_id=reviewer.user_id,
                verdict=verdict,
                annotation=annotation,
                feedback=feedback,
            )
            outcome = apply_review(submission, review, quorum, priors)  # DuplicateReview raises
            conn.execute(
                "INSERT INTO reviews (review_id, submission_id, reviewer_id, verdict,"
                " annotation, feedback, reviewer_removed, created_at)"
                " VALUES (?,?,?,?,?,?,?,?)",
                (
                    review.review_id,
                    review.submission_id,
                    review.reviewer_id,
                    review.verdict.value,
                    review.annotation,
                    review.feedback,
                    0,
                    format_timestamp(review.created_at),
                ),
            )
            if outcome.submission.state is not submission.state:
                conn.execute(
                    "UPDATE submissions SET state = ? WHERE submission_id = ?",
                    (outcome.submission.state.value, submission_id),
                )
            if outcome.admin_attention:
                conn.execute(
                    "UPDATE submissions SET flagged_for_admin = 1 WHERE submission_id = ?",
                    (submission_id,),
                )
        return review, outcome

    def reviews_for(self, submission_id: str) -> list[ValidationReview]:
        with self.db.transaction() as conn:
            rows = conn.execute(
                "SELECT * FROM reviews WHERE submission_id = ? ORDER BY created_at, review_id",
                (submission_id,),
            ).fetchall()
        return [_review_from_row(r) for r in rows]

    def validation_queue(
        self, for_user_id: str, dialect: DialectTag | None = None, limit: int = PAGE_SIZE
    ) -> list[Submission]:
        """Pending submissions the user may review: never their own, never one
        they already reviewed; optionally narrowed to a dialect."""
        query = (
            "SELECT s.* FROM submissions s JOIN prompts p ON p.prompt_id = s.prompt_id"
            " WHERE s.state = ? AND s.user_id != ?"
            " AND NOT EXISTS (SELECT 1 FROM reviews r WHERE r.submission_id = s.submission_id"
            " AND r.reviewer_id = ?)"
        )
        params: list = [SubmissionState.PENDING_VALIDATION.value, for_user_id, for_user_id]
        if dialect is not None:
            query += " AND p.country = ?"
            params.append(dialect.country)
            if dialect.city is not None:
                query += " AND p.city = ?"
                params.append(dialect.city)
        query += " ORDER BY s.created_at, s.submission_id LIMIT ?"
        params.append(limit)
        with self.db.transaction() as conn:
            rows = conn.execute(query, params).fetchall()
        return [_submission_from_row(r) for r in rows]

    # -- aggregate reads -----------------------------------------------------

    def submissions_in_range(self, from_ts: datetime, to_ts: datetime) -> list[dict]:
        """Flat rows for the stats aggregator: state, duration, user, dialect."""
        with self.db.transaction() as conn:
            rows = conn.execute(
                "SELECT s.state, s.duration_s, s.user_id, s.created_at, p.country, p.city"
                " FROM submissions s JOIN prompts p ON p.prompt_id = s.prompt_id"
                " WHERE s.created_at >= ? AND s.created_at < ?",
                (format_timestamp(from_ts), format_timestamp(to_ts)),
            ).fetchall()
        return [
            {
                "state": SubmissionState(r["state"]),
                "duration_s": r["duration_s"],
                "user_id": r["user_id"],
                "dialect": DialectTag(country=r["country"], city=r["city"] or None),
            }
            for r in rows
        ]

    def accepted_for_export(
        self, task_id: str | None = None, dialect: DialectTag | None = None
    ) -> list[dict]:
        """Accepted submissions joined with their prompt, in one read snapshot."""
        query = (
            "SELECT s.*, p.text AS prompt_text, p.country, p.city, p.task_id AS prompt_task_id"
            " FROM submissions s JOIN prompts p ON p.prompt_id = s.prompt_id"
            " WHERE s.state = ?"
        )
        params: list = [SubmissionState.ACCEPTED.value]
        if task_id is not None:
            query += " AND p.task_id = ?"
            params.append(task_id)
        if dialect is not None:
            query += " AND p.country = ?"
            params.append(dialect.country)
            if dialect.city is not None:
                query += " AND p.city = ?"
                params.append(dialect.city)
        query += " ORDER BY s.submission_id"
        with self.db.transaction() as conn:
            rows = conn.execute(query, params).fetchall()
        return [
            {
                "submission": _submission_from_row(r),
                "prompt_text": r["prompt_text"],
                "dialect": DialectTag(country=r["country"], city=r["city"] or None),
            }
            for r in rows
        ]

    def submissions_with_prompts(self, states: Iterable[SubmissionState]) -> list[dict]:
        wanted = [s.value for s in states]
        if not wanted:
            return []
        query = (
            f"SELECT s.*, p.text AS prompt_text, p.country, p.city, p.task_id AS p_task,"
            f" p.target_recordings, p.active FROM submissions s"
            f" JOIN prompts p ON p.prompt_id = s.prompt_id"
            f" WHERE s.state IN ({','.join('?' for _ in wanted)})"
            f" ORDER BY s.created_at, s.submission_id"
        )
        with self.db.transaction() as conn:
            rows = conn.execute(query, wanted).fetchall()
        return [
            {
                "submission": _submission_from_row(r),
                "prompt": Prompt(
                    prompt_id=r["prompt_id"],
                    task_id=r["p_task"],
                    text=r["prompt_text"],
                    dialect=DialectTag(country=r["country"], city=r["city"] or None),
                    target_recordings=r["target_recordings"],
                    active=bool(r["active"]),
                ),
            }
            for r in rows
        ]

    def update_qa(
        self, submission_id: str, report: QAReport, new_state: SubmissionState | None = None
    ) -> None:
        """Refresh a submission's QA report (backfill); optionally move state."""
        with self.db.transaction(immediate=True) as conn:
            if new_state is None:
                cur = conn.execute(
                    "UPDATE submissions SET qa_json = ?, confidence = ? WHERE submission_id = ?",
                    (json.dumps(report.to_dict()), report.confidence, submission_id),
                )
            else:
                cur = conn.execute(
                    "UPDATE submissions SET qa_json = ?, confidence = ?, state = ?"
                    " WHERE submission_id = ?",
                    (
                        json.dumps(report.to_dict()),
                        report.confidence,
                        new_state.value,
                        submission_id,
                    ),
                )
            if cur.rowcount != 1:
                raise NotFound(f"submission {submission_id}")

    def referenced_digests(self, include_deleted: bool = False) -> set[str]:
        query = "SELECT DISTINCT audio_ref FROM submissions"
        params: tuple = ()
        if not include_deleted:
            query += " WHERE state != ?"
            params = (SubmissionState.DELETED.value,)
        with self.db.transaction() as conn:
            rows = conn.execute(query, params).fetchall()
        return {r["audio_ref"] for r in rows}
