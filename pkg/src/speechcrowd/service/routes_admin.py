"""Curation endpoints: task creation, bulk prompt upload, submission
inspection and deletion, and user management. All require the admin role."""

from __future__ import annotations

from fastapi import APIRouter, Depends, Query, Request
from pydantic import BaseModel
from starlette.concurrency import run_in_threadpool

from ..domain import (
    DialectTag,
    IllegalTransition,
    Role,
    SubmissionEvent,
    SubmissionState,
    TaskKind,
    TaskStatus,
    TerminalState,
    UserAccount,
)
from ..qa import normalize_arabic
from ..store import DuplicatePrompt, NotFound, StoreError
from .context import ServiceContext, get_ctx, require_admin
from .errors import ApiError
from .serialize import (
    parse_timestamp_param,
    prompt_view,
    submission_view,
    task_view,
    user_private,
)

router = APIRouter()


class CreateTaskBody(BaseModel):
    title: str
    kind: str = TaskKind.SPEECH_RECORDING.value
    dialects: list[str]
    status: str = TaskStatus.OPEN.value


@router.post("/admin/tasks", status_code=201)
def create_task(
    body: CreateTaskBody,
    admin: UserAccount = Depends(require_admin),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    try:
        kind = TaskKind(body.kind)
        status = TaskStatus(body.status)
        dialects = [DialectTag.from_label(d) for d in body.dialects]
    except ValueError as exc:
        raise ApiError("invalid_request", str(exc))
    if not dialects:
        raise ApiError("invalid_request", "a task needs at least one dialect")
    if not body.title.strip():
        raise ApiError("invalid_request", "title must be non-empty")
    task = ctx.repo.create_task(
        body.title.strip(), kind, dialects, created_by=admin.user_id, status=status
    )
    return task_view(task)


def _parse_tsv(raw: str) -> list[tuple[str, DialectTag, int]]:
    """Rows are text<TAB>country<TAB>city<TAB>target_recordings; city may be
    empty. Blank lines are skipped but keep their line numbers for errors."""
    rows: list[tuple[str, DialectTag, int]] = []
    for number, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ApiError(
                "malformed_row", f"row {number}: expected 4 tab-separated columns"
            )
        text, country, city, target_raw = fields
        if not text.strip():
            raise ApiError("malformed_row", f"row {number}: empty prompt text")
        try:
            dialect = DialectTag(country=country.strip(), city=city.strip() or None)
        except ValueError as exc:
            raise ApiError("malformed_row", f"row {number}: {exc}")
        try:
            target = int(target_raw.strip())
        except ValueError:
            raise ApiError(
                "malformed_row", f"row {number}: target_recordings is not an integer"
            )
        if target < 1:
            raise ApiError("malformed_row", f"row {number}: target_recordings must be >= 1")
        rows.append((text.strip(), dialect, target))
    return rows


@router.post("/admin/tasks/{task_id}/prompts", status_code=201)
async def upload_prompts(
    task_id: str,
    request: Request,
    admin: UserAccount = Depends(require_admin),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    raw = (await request.body()).decode("utf-8", errors="strict")
    rows = _parse_tsv(raw)
    try:
        prompts = await run_in_threadpool(
            ctx.repo.add_prompts, task_id, rows, normalize_arabic
        )
    except NotFound as exc:
        raise ApiError("unknown_task", str(exc))
    except DuplicatePrompt as exc:
        raise ApiError("duplicate_prompt", str(exc))
    return {"inserted": len(prompts), "prompts": [prompt_view(p) for p in prompts]}


@router.get("/admin/submissions")
def list_submissions(
    from_ts: str = Query(alias="from"),
    to_ts: str = Query(alias="to"),
    task: str | None = None,
    state: str | None = None,
    min_confidence: float | None = None,
    max_confidence: float | None = None,
    cursor: str | None = None,
    admin: UserAccount = Depends(require_admin),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    start = parse_timestamp_param(from_ts, "from")
    end = parse_timestamp_param(to_ts, "to")
    if start > end:
        raise ApiError("bad_range", "from must be <= to")
    state_filter = None
    if state is not None:
        try:
            state_filter = SubmissionState(state)
        except ValueError:
            raise ApiError("invalid_request", f"unknown state {state!r}")
    try:
        records, next_cursor = ctx.repo.admin_list_submissions(
            start,
            end,
            task_id=task,
            state=state_filter,
            min_confidence=min_confidence,
            max_confidence=max_confidence,
            cursor=cursor,
        )
    except StoreError as exc:
        raise ApiError("invalid_request", str(exc))
    items = []
    for record in records:
        prompt = ctx.repo.get_prompt(record.submission.prompt_id)
        items.append(
            submission_view(record.submission, prompt=prompt, flagged=record.flagged_for_admin)
        )
    return {"items": items, "next_cursor": next_cursor}


@router.delete("/admin/submissions/{submission_id}")
def delete_submission(
    submission_id: str,
    admin: UserAccount = Depends(require_admin),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    try:
        updated = ctx.repo.apply_event(submission_id, SubmissionEvent.ADMIN_DELETE)
    except NotFound as exc:
        raise ApiError("not_found", str(exc))
    except (TerminalState, IllegalTransition) as exc:
        raise ApiError("wrong_state", str(exc))
    return {"ok": True, "submission": submission_view(updated)}


@router.get("/admin/users")
def list_users(
    admin: UserAccount = Depends(require_admin), ctx: ServiceContext = Depends(get_ctx)
) -> dict:
    return {"users": [user_private(u) for u in ctx.repo.list_users()]}


@router.get("/admin/users/{user_id}")
def user_detail(
    user_id: str,
    admin: UserAccount = Depends(require_admin),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    try:
        target = ctx.repo.get_user(user_id)
    except NotFound as exc:
        raise ApiError("not_found", str(exc))
    counts = ctx.repo.user_submission_counts(user_id)
    return {
        "user": user_private(target),
        "submissions_by_state": counts,
        "total_submissions": sum(counts.values()),
    }


class BlockBody(BaseModel):
    delete_submissions: bool = False


@router.post("/admin/users/{user_id}/block")
def block_user(
    user_id: str,
    body: BlockBody,
    admin: UserAccount = Depends(require_admin),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    if user_id == admin.user_id:
        raise ApiError("self_block", "an admin cannot block themself")
    try:
        ctx.repo.set_blocked(user_id, True)
    except NotFound as exc:
        raise ApiError("not_found", str(exc))
    deleted = 0
    if body.delete_submissions:
        deleted = ctx.repo.cascade_delete_user(user_id, admin)
    return {"ok": True, "deleted_submissions": deleted}


@router.post("/admin/users/{user_id}/grant-admin")
def grant_admin(
    user_id: str,
    admin: UserAccount = Depends(require_admin),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    try:
        updated = ctx.repo.add_role(user_id, Role.ADMIN)
    except NotFound as exc:
        raise ApiError("not_found", str(exc))
    return {"ok": True, "user": user_private(updated)}
