"""The published API error vocabulary and its JSON envelope.

Every error body is {"error": {"code": ..., "message": ...}} with a code from
ERROR_CODES; clients can switch on the code without parsing messages.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

ERROR_CODES: dict[str, int] = {
    "invalid_request": 400,
    "bad_dialect": 400,
    "bad_range": 400,
    "malformed_audio": 400,
    "malformed_row": 400,
    "weak_password": 400,
    "unauthenticated": 401,
    "bad_credentials": 401,
    "forbidden": 403,
    "user_blocked": 403,
    "not_owner": 403,
    "cannot_review": 403,
    "not_found": 404,
    "unknown_task": 404,
    "email_taken": 409,
    "duplicate_live_submission": 409,
    "duplicate_review": 409,
    "duplicate_prompt": 409,
    "wrong_state": 409,
    "self_block": 409,
    "task_closed": 409,
    "prompt_inactive": 409,
    "too_large": 413,
    "range_not_satisfiable": 416,
    "upload_in_flight": 429,
    "internal_error": 500,
}


class ApiError(Exception):
    """Raised by handlers; converted to the JSON error envelope."""

    def __init__(self, code: str, message: str, headers: dict[str, str] | None = None):
        if code not in ERROR_CODES:
            raise ValueError(f"unknown error code {code!r}")
        super().__init__(message)
        self.code = code
        self.http_status = ERROR_CODES[code]
        self.message = message
        self.headers = headers or {}


def _envelope(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


def install_error_handlers(app: FastAPI) -> None:
    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.http_status,
            content=_envelope(exc.code, exc.message),
            headers=exc.headers,
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        detail = "; ".join(
            f"{'.'.join(str(p) for p in err.get('loc', ()))}: {err.get('msg', 'invalid')}"
            for err in exc.errors()
        )
        return JSONResponse(status_code=400, content=_envelope("invalid_request", detail))

    @app.exception_handler(StarletteHTTPException)
    async def on_http_error(request: Request, exc: StarletteHTTPException) -> JSONResponse:
        code = "not_found" if exc.status_code == 404 else "invalid_request"
        if exc.status_code == 405:
            code = "invalid_request"
        return JSONResponse(
            status_code=exc.status_code, content=_envelope(code, str(exc.detail))
        )
