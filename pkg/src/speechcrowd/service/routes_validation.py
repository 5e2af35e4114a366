"""Peer validation: fetch reviewable submissions and file verdicts."""

from __future__ import annotations

from fastapi import APIRouter, Depends
from pydantic import BaseModel

from ..domain import DuplicateReview, ReviewVerdict, UserAccount
from ..store import PAGE_SIZE, CannotReview, NotFound
from .context import ServiceContext, get_ctx, require_reviewer
from .errors import ApiError
from .serialize import parse_dialect_param, review_view, submission_view

router = APIRouter()


@router.get("/validation/queue")
def validation_queue(
    dialect: str | None = None,
    limit: int = PAGE_SIZE,
    user: UserAccount = Depends(require_reviewer),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    tag = parse_dialect_param(dialect) if dialect is not None else None
    limit = max(1, min(limit, PAGE_SIZE))
    submissions = ctx.repo.validation_queue(user.user_id, dialect=tag, limit=limit)
    items = []
    for submission in submissions:
        prompt = ctx.repo.get_prompt(submission.prompt_id)
        items.append(submission_view(submission, prompt=prompt))
    return {"queue": items}


class ReviewBody(BaseModel):
    verdict: str
    annotation: str | None = None
    feedback: str | None = None


@router.post("/submissions/{submission_id}/reviews", status_code=201)
def post_review(
    submission_id: str,
    body: ReviewBody,
    user: UserAccount = Depends(require_reviewer),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    try:
        verdict = ReviewVerdict(body.verdict)
    except ValueError:
        raise ApiError("invalid_request", f"unknown verdict {body.verdict!r}")
    try:
        review, outcome = ctx.repo.post_review(
            submission_id,
            user,
            verdict,
            annotation=body.annotation,
            feedback=body.feedback,
            quorum=ctx.config.quorum,
        )
    except NotFound as exc:
        raise ApiError("not_found", str(exc))
    except CannotReview as exc:
        raise ApiError("cannot_review", str(exc))
    except DuplicateReview as exc:
        raise ApiError("duplicate_review", str(exc))
    body_out = review_view(review)
    body_out["submission"] = submission_view(outcome.submission)
    return body_out
