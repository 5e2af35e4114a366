"""Core domain model: accounts, tasks, prompts, submissions and their lifecycle.

Everything in here is an immutable value; persistence and HTTP concerns live
elsewhere. The submission lifecycle is a small explicit state machine so the
legal transitions can be enumerated and tested exhaustively.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from uuid import uuid4


class DomainError(Exception):
    """Base class for domain rule violations."""


class IllegalTransition(DomainError):
    """The requested event has no edge from the submission's current state."""


class TerminalState(DomainError):
    """The submission is deleted; no further events apply."""


class DuplicateReview(DomainError):
    """A reviewer may review a given submission at most once."""


def new_id(prefix: str) -> str:
    """Opaque unique id. The prefix makes logs and test failures readable."""
    return f"{prefix}_{uuid4().hex}"


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    """Fixed-width UTC ISO-8601 with microseconds; lexicographic order == time order."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    dt = dt.astimezone(timezone.utc)
    # strftime leaves years < 1000 unpadded, which breaks both the fixed width
    # and the ordering guarantee.
    return (
        f"{dt.year:04d}-{dt.month:02d}-{dt.day:02d}"
        f"T{dt.hour:02d}:{dt.minute:02d}:{dt.second:02d}.{dt.microsecond:06d}Z"
    )


def parse_timestamp(value: str) -> datetime:
    raw = value.strip()
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    dt = datetime.fromisoformat(raw)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


class Role(str, Enum):
    CONTRIBUTOR = "contributor"
    ANNOTATOR = "annotator"
    ADMIN = "admin"


_COUNTRY_RE = re.compile(r"^[A-Z]{2}$")


@dataclass(frozen=True)
class DialectTag:
    """Country-level or city-level dialect label.

    Country comparison is case-insensitive (normalized to upper case here);
    city comparison is exact after whitespace trimming.
    """

    country: str
    city: str | None = None

    def __post_init__(self) -> None:
        country = self.country.strip().upper()
        if not _COUNTRY_RE.match(country):
            raise ValueError(f"country must be an ISO 3166-1 alpha-2 code, got {self.country!r}")
        city = self.city.strip() if self.city is not None else None
        if city == "":
            city = None
        object.__setattr__(self, "country", country)
        object.__setattr__(self, "city", city)

    @property
    def label(self) -> str:
        return self.country if self.city is None else f"{self.country}:{self.city}"

    @classmethod
    def from_label(cls, label: str) -> "DialectTag":
        country, _, city = label.partition(":")
        return cls(country=country, city=city or None)


@dataclass(frozen=True)
class UserAccount:
    user_id: str
    handle: str
    email: str
    roles: frozenset[Role]
    blocked: bool = False
    created_at: datetime = field(default_factory=utcnow)

    def __post_init__(self) -> None:
        if not self.handle.strip():
            raise ValueError("handle must be non-empty")
        object.__setattr__(self, "email", self.email.strip().lower())
        roles = frozenset(Role(r) for r in self.roles)
        if Role.CONTRIBUTOR not in roles:
            raise ValueError("every account holds the contributor role")
        object.__setattr__(self, "roles", roles)

    def has_role(self, role: Role) -> bool:
        return role in self.roles

    @property
    def is_admin(self) -> bool:
        return Role.ADMIN in self.roles


class TaskKind(str, Enum):
    SPEECH_RECORDING = "speech_recording"
    WORD_COLLECTION = "word_collection"
    OTHER = "other"


class TaskStatus(str, Enum):
    OPEN = "open"
    PAUSED = "paused"
    CLOSED = "closed"


@dataclass(frozen=True)
class Task:
    task_id: str
    title: str
    kind: TaskKind
    dialects: frozenset[DialectTag]
    status: TaskStatus
    created_by: str
    created_at: datetime = field(default_factory=utcnow)

    def __post_init__(self) -> None:
        if not self.title.strip():
            raise ValueError("title must be non-empty")
        if not self.dialects:
            raise ValueError("a task needs at least one dialect")
        object.__setattr__(self, "dialects", frozenset(self.dialects))


@dataclass(frozen=True)
class Prompt:
    prompt_id: str
    task_id: str
    text: str
    dialect: DialectTag
    target_recordings: int
    active: bool = True

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("prompt text must be non-empty")
        if self.target_recordings < 1:
            raise ValueError("target_recordings must be >= 1")


class SubmissionState(str, Enum):
    RECORDED = "recorded"
    QA_PASSED = "qa_passed"
    QA_FAILED = "qa_failed"
    PENDING_VALIDATION = "pending_validation"
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    DELETED = "deleted"


class SubmissionEvent(str, Enum):
    QA_PASS = "qa_pass"
    QA_FAIL = "qa_fail"
    SEND_TO_VALIDATION = "send_to_validation"
    APPROVE = "approve"
    REJECT = "reject"
    ADMIN_DELETE = "admin_delete"
    REDO = "redo"


# States from which a submission still counts against the (prompt, user) pair
# and against a prompt's coverage target.
LIVE_STATES = frozenset(
    s
    for s in SubmissionState
    if s not in (SubmissionState.QA_FAILED, SubmissionState.REJECTED, SubmissionState.DELETED)
)

_TRANSITIONS: dict[tuple[SubmissionState, SubmissionEvent], SubmissionState] = {
    (SubmissionState.RECORDED, SubmissionEvent.QA_PASS): SubmissionState.QA_PASSED,
    (SubmissionState.RECORDED, SubmissionEvent.QA_FAIL): SubmissionState.QA_FAILED,
    (SubmissionState.QA_PASSED, SubmissionEvent.SEND_TO_VALIDATION): SubmissionState.PENDING_VALIDATION,
    (SubmissionState.QA_PASSED, SubmissionEvent.REDO): SubmissionState.DELETED,
    (SubmissionState.PENDING_VALIDATION, SubmissionEvent.APPROVE): SubmissionState.ACCEPTED,
    (SubmissionState.PENDING_VALIDATION, SubmissionEvent.REJECT): SubmissionState.REJECTED,
}
for _state in SubmissionState:
    if _state is not SubmissionState.DELETED:
        _TRANSITIONS[(_state, SubmissionEvent.ADMIN_DELETE)] = SubmissionState.DELETED


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"


@dataclass(frozen=True)
class QAReport:
    """Outcome of the automated quality gates for one recording.

    ``fail_reasons`` is non-empty exactly when ``verdict`` is fail. ``notes``
    carries non-gating observations such as the ASR backend being unreachable.
    """

    speech_segments: tuple[tuple[float, float], ...]
    speech_ratio: float
    clipping_ratio: float
    verdict: Verdict
    fail_reasons: tuple[str, ...] = ()
    asr_hypothesis: str | None = None
    confidence: float | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "speech_segments", tuple((float(a), float(b)) for a, b in self.speech_segments)
        )
        object.__setattr__(self, "fail_reasons", tuple(self.fail_reasons))
        object.__setattr__(self, "notes", tuple(self.notes))
        if (self.verdict is Verdict.FAIL) != bool(self.fail_reasons):
            raise ValueError("verdict is fail iff fail_reasons is non-empty")
        if not 0.0 <= self.speech_ratio <= 1.0:
            raise ValueError("speech_ratio out of [0, 1]")
        if not 0.0 <= self.clipping_ratio <= 1.0:
            raise ValueError("clipping_ratio out of [0, 1]")
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence out of [0, 1]")
        prev_end = 0.0
        for start, end in self.speech_segments:
            if start < prev_end or start >= end:
                raise ValueError("segments must be sorted, non-overlapping, with start < end")
            prev_end = end

    @property
    def speech_s(self) -> float:
        return sum(end - start for start, end in self.speech_segments)

    def to_dict(self) -> dict:
        return {
            "speech_segments": [[s, e] for s, e in self.speech_segments],
            "speech_ratio": self.speech_ratio,
            "clipping_ratio": self.clipping_ratio,
            "verdict": self.verdict.value,
            "fail_reasons": list(self.fail_reasons),
            "asr_hypothesis": self.asr_hypothesis,
            "confidence": self.confidence,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QAReport":
        return cls(
            speech_segments=tuple((s, e) for s, e in data["speech_segments"]),
            speech_ratio=data["speech_ratio"],
            clipping_ratio=data["clipping_ratio"],
            verdict=Verdict(data["verdict"]),
            fail_reasons=tuple(data["fail_reasons"]),
            asr_hypothesis=data.get("asr_hypothesis"),
            confidence=data.get("confidence"),
            notes=tuple(data.get("notes", ())),
        )


@dataclass(frozen=True)
class Submission:
    """One recording of one prompt by one user; immutable per attempt."""

    submission_id: str
    prompt_id: str
    user_id: str
    audio_ref: str
    duration_s: float
    sample_rate_hz: int
    state: SubmissionState
    qa: QAReport | None = None
    created_at: datetime = field(default_factory=utcnow)

    def __post_init__(self) -> None:
        if self.duration_s <= 0:
            raise ValueError("duration_s must be > 0")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be > 0")
        # A QA report accompanies every state after recorded. The one exception
        # is deleted: an admin may delete a submission that never reached QA.
        if self.qa is None and self.state not in (SubmissionState.RECORDED, SubmissionState.DELETED):
            raise ValueError(f"state {self.state.value} requires a QA report")


def submit_event(submission: Submission, event: SubmissionEvent) -> Submission:
    """Apply one lifecycle event, returning the submission in its new state.

    Raises TerminalState when the submission is deleted, IllegalTransition when
    the event has no edge from the current state.
    """
    if submission.state is SubmissionState.DELETED:
        raise TerminalState(f"submission {submission.submission_id} is deleted")
    new_state = _TRANSITIONS.get((submission.state, event))
    if new_state is None:
        raise IllegalTransition(f"no transition {submission.state.value} --{event.value}-->")
    return replace(submission, state=new_state)


class ReviewVerdict(str, Enum):
    APPROVE = "approve"
    REJECT = "reject"
    FLAG = "flag"


@dataclass(frozen=True)
class ValidationReview:
    review_id: str
    submission_id: str
    reviewer_id: str
    verdict: ReviewVerdict
    annotation: str | None = None
    feedback: str | None = None
    created_at: datetime = field(default_factory=utcnow)


def can_review(reviewer: UserAccount, submission: Submission) -> bool:
    """Pure predicate: may this user peer-review this submission right now?"""
    return (
        not reviewer.blocked
        and (reviewer.has_role(Role.ANNOTATOR) or reviewer.has_role(Role.ADMIN))
        and reviewer.user_id != submission.user_id
        and submission.state is SubmissionState.PENDING_VALIDATION
    )


@dataclass(frozen=True)
class ReviewOutcome:
    submission: Submission
    admin_attention: bool


def apply_review(
    submission: Submission,
    review: ValidationReview,
    quorum: int,
    prior_reviews: list[ValidationReview] | tuple[ValidationReview, ...],
) -> ReviewOutcome:
    """Fold one new review into the submission's verdict tally.

    With the new review counted: approvals at quorum accept, rejections at
    quorum reject, otherwise any flag verdict parks the submission for admin
    attention and the state is unchanged.
    """
    if quorum < 1:
        raise ValueError("quorum must be >= 1")
    if any(r.reviewer_id == review.reviewer_id for r in prior_reviews):
        raise DuplicateReview(f"{review.reviewer_id} already reviewed {submission.submission_id}")
    reviews = [*prior_reviews, review]
    approvals = sum(1 for r in reviews if r.verdict is ReviewVerdict.APPROVE)
    rejections = sum(1 for r in reviews if r.verdict is ReviewVerdict.REJECT)
    if approvals >= quorum:
        return ReviewOutcome(submit_event(submission, SubmissionEvent.APPROVE), False)
    if rejections >= quorum:
        return ReviewOutcome(submit_event(submission, SubmissionEvent.REJECT), False)
    if any(r.verdict is ReviewVerdict.FLAG for r in reviews):
        return ReviewOutcome(submission, True)
    return ReviewOutcome(submission, False)
