"""Dashboard statistics. Everyone sees global aggregates plus their own
contribution counters; the per-user breakdown is admin-only."""

from __future__ import annotations

from datetime import datetime, timezone

from fastapi import APIRouter, Depends, Query

from ..domain import UserAccount
from ..stats import BadRange, compute_stats
from .context import ServiceContext, current_user, get_ctx
from .errors import ApiError
from .serialize import parse_timestamp_param

router = APIRouter()

_RANGE_MIN = datetime(1970, 1, 1, tzinfo=timezone.utc)
_RANGE_MAX = datetime(9999, 1, 1, tzinfo=timezone.utc)


@router.get("/stats")
def get_stats(
    from_ts: str | None = Query(default=None, alias="from"),
    to_ts: str | None = Query(default=None, alias="to"),
    user: UserAccount = Depends(current_user),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    start = parse_timestamp_param(from_ts, "from") if from_ts else _RANGE_MIN
    end = parse_timestamp_param(to_ts, "to") if to_ts else _RANGE_MAX
    try:
        snapshot = compute_stats(ctx.repo, start, end, include_per_user=True)
    except BadRange as exc:
        raise ApiError("bad_range", str(exc))
    body = snapshot.to_dict()
    per_user = body.pop("per_user", {})
    mine = per_user.get(user.user_id, {"submissions": 0, "accepted": 0, "rejected": 0})
    body["mine"] = mine
    if user.is_admin:
        body["per_user"] = per_user
    return body
