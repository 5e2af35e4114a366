"""JSON views of domain entities and parsing of client-supplied parameters.

Email addresses appear only in self and admin views, never in the public
shapes other users can see.
"""

from __future__ import annotations

from datetime import datetime, timezone

from ..domain import (
    DialectTag,
    Prompt,
    Submission,
    Task,
    UserAccount,
    ValidationReview,
    format_timestamp,
    parse_timestamp,
)
from .errors import ApiError


def user_public(user: UserAccount) -> dict:
    return {"user_id": user.user_id, "handle": user.handle}


def user_private(user: UserAccount) -> dict:
    return {
        "user_id": user.user_id,
        "handle": user.handle,
        "email": user.email,
        "roles": sorted(r.value for r in user.roles),
        "blocked": user.blocked,
        "created_at": format_timestamp(user.created_at),
    }


def task_view(task: Task) -> dict:
    return {
        "task_id": task.task_id,
        "title": task.title,
        "kind": task.kind.value,
        "dialects": sorted(d.label for d in task.dialects),
        "status": task.status.value,
        "created_at": format_timestamp(task.created_at),
    }


def prompt_view(prompt: Prompt) -> dict:
    return {
        "prompt_id": prompt.prompt_id,
        "task_id": prompt.task_id,
        "text": prompt.text,
        "dialect": prompt.dialect.label,
        "target_recordings": prompt.target_recordings,
        "active": prompt.active,
    }


def submission_view(
    submission: Submission,
    prompt: Prompt | None = None,
    flagged: bool | None = None,
) -> dict:
    body = {
        "submission_id": submission.submission_id,
        "prompt_id": submission.prompt_id,
        "user_id": submission.user_id,
        "audio_ref": submission.audio_ref,
        "duration_s": submission.duration_s,
        "sample_rate_hz": submission.sample_rate_hz,
        "state": submission.state.value,
        "qa": submission.qa.to_dict() if submission.qa else None,
        "created_at": format_timestamp(submission.created_at),
    }
    if prompt is not None:
        body["prompt"] = {
            "prompt_id": prompt.prompt_id,
            "text": prompt.text,
            "dialect": prompt.dialect.label,
        }
    if flagged is not None:
        body["flagged_for_admin"] = flagged
    return body


def review_view(review: ValidationReview) -> dict:
    return {
        "review_id": review.review_id,
        "submission_id": review.submission_id,
        "reviewer_id": review.reviewer_id,
        "verdict": review.verdict.value,
        "annotation": review.annotation,
        "feedback": review.feedback,
        "created_at": format_timestamp(review.created_at),
    }


def parse_dialect_param(value: str) -> DialectTag:
    try:
        return DialectTag.from_label(value)
    except ValueError as exc:
        raise ApiError("bad_dialect", str(exc)) from exc


def parse_timestamp_param(value: str, name: str) -> datetime:
    """Accept the canonical wire format plus general ISO-8601; naive
    timestamps are taken as UTC."""
    try:
        return parse_timestamp(value)
    except ValueError:
        pass
    try:
        parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ApiError("bad_range", f"{name}: not a timestamp: {value!r}") from exc
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)
