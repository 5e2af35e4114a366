"""Per-application wiring shared by all request handlers, plus the
authentication and authorization dependencies."""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass, field

from fastapi import Depends, Request

from ..asr import AsrClient
from ..domain import Role, UserAccount, utcnow
from ..store import Repository
from .config import AppConfig
from .errors import ApiError
from .security import token_digest


class UploadGuard:
    """At most one in-flight upload per user across all worker threads."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._active: set[str] = set()

    @contextmanager
    def hold(self, user_id: str):
        with self._lock:
            if user_id in self._active:
                raise ApiError("upload_in_flight", "finish the current upload first")
            self._active.add(user_id)
        try:
            yield
        finally:
            with self._lock:
                self._active.discard(user_id)


@dataclass
class ServiceContext:
    config: AppConfig
    repo: Repository
    asr_client: AsrClient
    uploads: UploadGuard = field(default_factory=UploadGuard)


def get_ctx(request: Request) -> ServiceContext:
    return request.app.state.ctx


def current_user(request: Request, ctx: ServiceContext = Depends(get_ctx)) -> UserAccount:
    """Resolve the bearer token to an account. Blocked accounts authenticate
    but are refused everywhere, so the client sees user_blocked rather than a
    generic 401."""
    header = request.headers.get("authorization", "")
    if not header.lower().startswith("bearer "):
        raise ApiError("unauthenticated", "missing bearer token")
    token = header[7:].strip()
    found = ctx.repo.find_session(token_digest(token))
    if found is None:
        raise ApiError("unauthenticated", "unknown session token")
    user, expires_at = found
    if expires_at <= utcnow():
        raise ApiError("unauthenticated", "session expired")
    if user.blocked:
        raise ApiError("user_blocked", "account is blocked")
    return user


def require_admin(user: UserAccount = Depends(current_user)) -> UserAccount:
    if not user.is_admin:
        raise ApiError("forbidden", "admin role required")
    return user


def require_reviewer(user: UserAccount = Depends(current_user)) -> UserAccount:
    if not (user.has_role(Role.ANNOTATOR) or user.is_admin):
        raise ApiError("forbidden", "annotator or admin role required")
    return user
