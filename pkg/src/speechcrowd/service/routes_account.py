"""Registration, login, session introspection, and role self-activation."""

from __future__ import annotations

from datetime import timedelta

from fastapi import APIRouter, Depends, Request
from pydantic import BaseModel

from ..domain import Role, UserAccount, format_timestamp, utcnow
from ..store import EmailTaken
from .context import ServiceContext, current_user, get_ctx
from .errors import ApiError
from .security import (
    MIN_PASSWORD_LENGTH,
    hash_password,
    new_session_token,
    token_digest,
    verify_password,
)
from .serialize import user_private

router = APIRouter()


class RegisterBody(BaseModel):
    handle: str
    email: str
    password: str


class LoginBody(BaseModel):
    email: str
    password: str


def _issue_session(ctx: ServiceContext, user: UserAccount) -> dict:
    token = new_session_token()
    expires_at = utcnow() + timedelta(hours=ctx.config.session_ttl_hours)
    ctx.repo.create_session(token_digest(token), user.user_id, expires_at)
    return {
        "token": token,
        "expires_at": format_timestamp(expires_at),
        "user": user_private(user),
    }


@router.post("/auth/register")
def register(body: RegisterBody, ctx: ServiceContext = Depends(get_ctx)) -> dict:
    handle = body.handle.strip()
    email = body.email.strip().lower()
    if not handle:
        raise ApiError("invalid_request", "handle must be non-empty")
    if "@" not in email or any(c.isspace() for c in email):
        raise ApiError("invalid_request", "email is not a valid address")
    if len(body.password) < MIN_PASSWORD_LENGTH:
        raise ApiError(
            "weak_password", f"password must be at least {MIN_PASSWORD_LENGTH} characters"
        )
    try:
        user = ctx.repo.create_user(handle, email, hash_password(body.password))
    except EmailTaken:
        raise ApiError("email_taken", f"an account already uses {email}")
    return _issue_session(ctx, user)


@router.post("/auth/login")
def login(body: LoginBody, ctx: ServiceContext = Depends(get_ctx)) -> dict:
    found = ctx.repo.find_credentials(body.email)
    if found is None:
        raise ApiError("bad_credentials", "unknown email or wrong password")
    user, stored_hash = found
    if not verify_password(body.password, stored_hash):
        raise ApiError("bad_credentials", "unknown email or wrong password")
    if user.blocked:
        raise ApiError("user_blocked", "account is blocked")
    return _issue_session(ctx, user)


@router.post("/auth/logout")
def logout(
    request: Request,
    user: UserAccount = Depends(current_user),
    ctx: ServiceContext = Depends(get_ctx),
) -> dict:
    token = request.headers["authorization"][7:].strip()
    ctx.repo.delete_session(token_digest(token))
    return {"ok": True}


@router.get("/me")
def me(user: UserAccount = Depends(current_user)) -> dict:
    return user_private(user)


@router.post("/me/roles/annotator")
def activate_annotator(
    user: UserAccount = Depends(current_user), ctx: ServiceContext = Depends(get_ctx)
) -> dict:
    updated = ctx.repo.add_role(user.user_id, Role.ANNOTATOR)
    return user_private(updated)
