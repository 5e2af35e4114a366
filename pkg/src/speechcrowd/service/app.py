"""Application factory: wires configuration, storage, and the recognizer
client into a FastAPI app. Handlers are plain functions executed on worker
threads, so sqlite access never blocks the event loop."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI

from .. import __version__
from ..asr import AsrClient, HttpAsrClient, StubAsrClient
from ..store import BlobStore, Database, Repository
from .config import AppConfig
from .context import ServiceContext
from .errors import install_error_handlers
from . import (
    routes_account,
    routes_admin,
    routes_recording,
    routes_stats,
    routes_validation,
)


def build_repository(config: AppConfig) -> Repository:
    db_path = Path(config.database_path)
    db_path.parent.mkdir(parents=True, exist_ok=True)
    db = Database(db_path)
    db.migrate()
    return Repository(db, BlobStore(config.blob_dir))


def default_asr_client(config: AppConfig) -> AsrClient:
    if config.asr.endpoint:
        return HttpAsrClient(
            endpoint=config.asr.endpoint,
            auth_token=config.asr.auth_token,
            max_concurrent=config.asr.max_concurrent,
        )
    return StubAsrClient()


def create_app(
    config: AppConfig,
    asr_client: AsrClient | None = None,
    repo: Repository | None = None,
) -> FastAPI:
    app = FastAPI(title="speechcrowd", version=__version__, docs_url="/docs")
    app.state.ctx = ServiceContext(
        config=config,
        repo=repo if repo is not None else build_repository(config),
        asr_client=asr_client if asr_client is not None else default_asr_client(config),
    )
    install_error_handlers(app)
    app.include_router(routes_account.router)
    app.include_router(routes_recording.router)
    app.include_router(routes_validation.router)
    app.include_router(routes_admin.router)
    app.include_router(routes_stats.router)

    @app.get("/healthz")
    def healthz() -> dict:
        return {"ok": True, "version": __version__}

    return app
