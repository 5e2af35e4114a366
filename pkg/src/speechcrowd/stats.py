"""Aggregate statistics over submissions for dashboards and reporting."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime

from .domain import DialectTag, SubmissionState
from .store import Repository


class BadRange(Exception):
    """The requested time range has from > to."""


@dataclass(frozen=True)
class DialectStats:
    submissions: int = 0
    accepted: int = 0
    hours_accepted: float = 0.0

    def to_dict(self) -> dict:
        return {
            "submissions": self.submissions,
            "accepted": self.accepted,
            "hours_accepted": self.hours_accepted,
        }


@dataclass(frozen=True)
class UserStats:
    submissions: int = 0
    accepted: int = 0
    rejected: int = 0

    def to_dict(self) -> dict:
        return {
            "submissions": self.submissions,
            "accepted": self.accepted,
            "rejected": self.rejected,
        }


@dataclass(frozen=True)
class StatsSnapshot:
    """Aggregates over submissions created in [range_from, range_to)."""

    range_from: datetime
    range_to: datetime
    totals: dict[SubmissionState, int]
    per_dialect: dict[DialectTag, DialectStats]
    acceptance_rate: float | None
    per_user: dict[str, UserStats] | None = field(default=None)

    def to_dict(self) -> dict:
        from .domain import format_timestamp

        body = {
            "range": {
                "from": format_timestamp(self.range_from),
                "to": format_timestamp(self.range_to),
            },
            "totals": {state.value: self.totals[state] for state in SubmissionState},
            "per_dialect": {
                tag.label: self.per_dialect[tag].to_dict()
                for tag in sorted(self.per_dialect, key=lambda t: t.label)
            },
            "acceptance_rate": self.acceptance_rate,
        }
        if self.per_user is not None:
            body["per_user"] = {
                user_id: self.per_user[user_id].to_dict()
                for user_id in sorted(self.per_user)
            }
        return body


def compute_stats(
    repo: Repository,
    range_from: datetime,
    range_to: datetime,
    include_per_user: bool = False,
) -> StatsSnapshot:
    """Single-pass aggregation over submissions created in [from, to).

    acceptance_rate = accepted / (accepted + rejected), or None when neither
    terminal verdict has occurred in the range.
    """
    if range_from > range_to:
        raise BadRange(f"{range_from} > {range_to}")
    rows = repo.submissions_in_range(range_from, range_to)

    totals = {state: 0 for state in SubmissionState}
    dialect_acc: dict[DialectTag, dict] = {}
    user_acc: dict[str, dict] = {}
    for row in rows:
        state: SubmissionState = row["state"]
        totals[state] += 1

        d = dialect_acc.setdefault(
            row["dialect"], {"submissions": 0, "accepted": 0, "seconds_accepted": 0.0}
        )
        d["submissions"] += 1
        if state is SubmissionState.ACCEPTED:
            d["accepted"] += 1
            d["seconds_accepted"] += row["duration_s"]

        u = user_acc.setdefault(
            row["user_id"], {"submissions": 0, "accepted": 0, "rejected": 0}
        )
        u["submissions"] += 1
        if state is SubmissionState.ACCEPTED:
            u["accepted"] += 1
        elif state is SubmissionState.REJECTED:
            u["rejected"] += 1

    accepted = totals[SubmissionState.ACCEPTED]
    rejected = totals[SubmissionState.REJECTED]
    rate = accepted / (accepted + rejected) if accepted + rejected > 0 else None

    per_dialect = {
        tag: DialectStats(
            submissions=acc["submissions"],
            accepted=acc["accepted"],
            hours_accepted=acc["seconds_accepted"] / 3600.0,
        )
        for tag, acc in dialect_acc.items()
    }
    per_user = (
        {user_id: UserStats(**acc) for user_id, acc in user_acc.items()}
        if include_per_user
        else None
    )
    return StatsSnapshot(
        range_from=range_from,
        range_to=range_to,
        totals=totals,
        per_dialect=per_dialect,
        acceptance_rate=rate,
        per_user=per_user,
    )
