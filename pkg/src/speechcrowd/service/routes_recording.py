"""Contributor flow: browse tasks, fetch a prompt, upload a take (QA runs
inside the request), review one's own takes, and stream stored audio."""

from __future__ import annotations

import re

from fastapi import APIRouter, Depends, File, Form, Request, Response, UploadFile
from pydantic import BaseModel

from ..asr import AsrRequest, safe_transcribe
from ..domain import (
    IllegalTransition,
    Role,
    Submission,
    SubmissionEvent,
    SubmissionState,
    TaskStatus,
    TerminalState,
    UserAccount,
    Verdict,
    new_id,
)
from ..qa import ASR_UNAVAILABLE, AudioError, decode_wav, run_qa
from ..store import (
    BlobMissing,
    DuplicateLiveSubmission,
    NotFound,
    StaleState,
    TaskClosed,
)
from .context import ServiceContext, current_user, get_ctx
from .errors import ApiError
from .serialize import (
    parse_dialect_param,
    prompt_view,
    submission_view,
    task_view,
)

router = APIRouter()

_DIGEST_RE = re.compile(r"^[0-9a-f]{64}$")


@router.get("/tasks")
def list_tasks(
    user: UserAccount = Depends(current_user), ctx: ServiceContext = Depends(get_ctx)
) -> dict:
    tasks = ctx.repo.list_tasks(status=TaskStatus.OPEN)
    return {"tasks": [task_view(t) for t in tasks]}


@router.get("/tasks/{task_id}/next-prompt")
def next_prompt(
    task_id: str,
    dialect: str,
    user: UserAccount = Depends(current_user),
    ctx: ServiceContext = Depends(get_ctx),
):
    tag = parse_dialect_param(dialect)
    try:
        prompt = ctx.repo.next_prompt_for(user.user_id, task_id, tag)
    except NotFound as exc:
        raise ApiError("unknown_task", str(exc))
    except TaskClosed as exc:
        raise ApiError("task_closed", str(exc))
    if prompt is None:
        return Response(status_code=204)
    return prompt_view(prompt)


@router.post("/submissions", status_code=201)
def upload_submission(
    prompt_id: str = Form(...),
    audio: UploadFile = File(...),
    user: UserAccount = Depends(current_user),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    with ctx.uploads.hold(user.user_id):
        return _handle_upload(ctx, user, prompt_id, audio)


def _handle_upload(
    ctx: ServiceContext, user: UserAccount, prompt_id: str, audio: UploadFile
) -> dict:
    limit = ctx.config.max_upload_bytes
    data = audio.file.read(limit + 1)
    if len(data) > limit:
        raise ApiError("too_large", f"audio exceeds {limit} bytes")

    try:
        prompt = ctx.repo.get_prompt(prompt_id)
    except NotFound as exc:
        raise ApiError("not_found", str(exc))
    if not prompt.active:
        raise ApiError("prompt_inactive", f"prompt {prompt_id} is no longer recordable")
    if ctx.repo.live_pair_exists(prompt_id, user.user_id):
        raise ApiError(
            "duplicate_live_submission",
            "you already have a live recording for this prompt",
        )

    try:
        buffer = decode_wav(data)
    except AudioError as exc:
        raise ApiError("malformed_audio", str(exc))

    digest = ctx.repo.blobs.store(data)
    request = AsrRequest(
        audio_ref=digest, dialect=prompt.dialect, timeout_s=ctx.config.asr.timeout_s
    )
    hypothesis = safe_transcribe(ctx.asr_client, request, buffer)
    notes = () if hypothesis is not None else (ASR_UNAVAILABLE,)
    report = run_qa(
        buffer,
        prompt.text,
        asr_hypothesis=hypothesis,
        params=ctx.config.vad,
        thresholds=ctx.config.qa,
        notes=notes,
    )
    state = (
        SubmissionState.QA_PASSED
        if report.verdict is Verdict.PASS
        else SubmissionState.QA_FAILED
    )
    submission = Submission(
        submission_id=new_id("s"),
        prompt_id=prompt_id,
        user_id=user.user_id,
        audio_ref=digest,
        duration_s=buffer.duration_s,
        sample_rate_hz=buffer.sample_rate_hz,
        state=state,
        qa=report,
    )
    try:
        ctx.repo.insert_submission(submission)
    except DuplicateLiveSubmission as exc:
        raise ApiError("duplicate_live_submission", str(exc))
    return submission_view(submission, prompt=prompt)


@router.get("/me/recordings")
def my_recordings(
    state: str | None = None,
    user: UserAccount = Depends(current_user),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    states = None
    if state is not None:
        try:
            states = [SubmissionState(state)]
        except ValueError:
            raise ApiError("invalid_request", f"unknown state {state!r}")
    submissions = ctx.repo.list_user_submissions(user.user_id, states=states)
    items = []
    for submission in submissions:
        prompt = ctx.repo.get_prompt(submission.prompt_id)
        items.append(submission_view(submission, prompt=prompt))
    return {"recordings": items}


class SelfReviewBody(BaseModel):
    decision: str


@router.post("/submissions/{submission_id}/self-review")
def self_review(
    submission_id: str,
    body: SelfReviewBody,
    user: UserAccount = Depends(current_user),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    events = {
        "submit": SubmissionEvent.SEND_TO_VALIDATION,
        "redo": SubmissionEvent.REDO,
    }
    event = events.get(body.decision)
    if event is None:
        raise ApiError("invalid_request", "decision must be 'submit' or 'redo'")
    try:
        submission = ctx.repo.get_submission(submission_id)
    except NotFound as exc:
        raise ApiError("not_found", str(exc))
    if submission.user_id != user.user_id:
        raise ApiError("not_owner", "only the contributor may decide this")
    try:
        updated = ctx.repo.transition_atomically(
            submission_id, SubmissionState.QA_PASSED, event
        )
    except (StaleState, IllegalTransition, TerminalState):
        raise ApiError(
            "wrong_state", f"submission is not awaiting self-review ({submission.state.value})"
        )
    prompt = ctx.repo.get_prompt(updated.prompt_id)
    return submission_view(updated, prompt=prompt)


def _may_stream(ctx: ServiceContext, user: UserAccount, digest: str) -> bool:
    if user.is_admin:
        return True
    referencing = ctx.repo.submissions_for_digest(digest)
    if any(s.user_id == user.user_id for s in referencing):
        return True
    if user.has_role(Role.ANNOTATOR):
        return any(s.state is SubmissionState.PENDING_VALIDATION for s in referencing)
    return False


def _parse_range(header: str, size: int) -> tuple[int, int]:
    match = re.fullmatch(r"bytes=(\d*)-(\d*)", header.strip())
    if not match or (not match.group(1) and not match.group(2)):
        raise ApiError("range_not_satisfiable", f"cannot satisfy range {header!r}",
                       headers={"Content-Range": f"bytes */{size}"})
    start_s, end_s = match.group(1), match.group(2)
    if start_s:
        start = int(start_s)
        end = int(end_s) if end_s else size - 1
    else:
        # suffix form: last N bytes
        length = int(end_s)
        if length == 0:
            raise ApiError("range_not_satisfiable", "zero-length suffix range",
                           headers={"Content-Range": f"bytes */{size}"})
        start = max(size - length, 0)
        end = size - 1
    end = min(end, size - 1)
    if start > end or start >= size:
        raise ApiError("range_not_satisfiable", f"cannot satisfy range {header!r}",
                       headers={"Content-Range": f"bytes */{size}"})
    return start, end


@router.get("/audio/{digest}")
def stream_audio(
    digest: str,
    request: Request,
    user: UserAccount = Depends(current_user),
    ctx: ServiceContext = Depends(get_ctx),
) -> Response:
    if not _DIGEST_RE.fullmatch(digest):
        raise ApiError("not_found", "no such audio")
    if not _may_stream(ctx, user, digest):
        raise ApiError("forbidden", "no accessible recording uses this audio")
    try:
        data = ctx.repo.blobs.read(digest)
    except BlobMissing:
        raise ApiError("not_found", "no such audio")

    base_headers = {"Accept-Ranges": "bytes"}
    range_header = request.headers.get("range")
    if range_header is None:
        return Response(content=data, media_type="audio/wav", headers=base_headers)
    start, end = _parse_range(range_header, len(data))
    return Response(
        content=data[start : end + 1],
        status_code=206,
        media_type="audio/wav",
        headers={
            **base_headers,
            "Content-Range": f"bytes {start}-{end}/{len(data)}",
        },
    )
