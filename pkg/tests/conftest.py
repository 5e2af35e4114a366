from __future__ import annotations

import warnings

import pytest
from fastapi.testclient import TestClient

from speechcrowd.asr import StubAsrClient
from speechcrowd.domain import Role
from speechcrowd.service import AppConfig, create_app
from speechcrowd.service.app import build_repository
from speechcrowd.service.security import hash_password
from speechcrowd.store import BlobStore, Database, Repository

warnings.filterwarnings("ignore", message="Using `httpx` with `starlette.testclient`")

ADMIN_PASSWORD = "admin-password-1"
USER_PASSWORD = "user-password-12"


@pytest.fixture
def repo(tmp_path) -> Repository:
    db = Database(tmp_path / "store.db")
    db.migrate()
    return Repository(db, BlobStore(tmp_path / "blobs"))


class Harness:
    """One app instance plus helpers to mint users and authed clients."""

    def __init__(self, tmp_path, stub_hypotheses=None, quorum=1, **overrides):
        self.config = AppConfig(
            database_path=str(tmp_path / "store.db"),
            blob_dir=str(tmp_path / "blobs"),
            quorum=quorum,
            **overrides,
        )
        self.repo = build_repository(self.config)
        self.stub = StubAsrClient(stub_hypotheses or {})
        self.app = create_app(self.config, asr_client=self.stub, repo=self.repo)
        self.client = TestClient(self.app)
        self._counter = 0

    def add_stub(self, digest: str, hypothesis: str) -> None:
        self.stub._hypotheses[digest] = hypothesis

    def register(self, handle: str | None = None, password: str = USER_PASSWORD) -> dict:
        self._counter += 1
        handle = handle or f"user{self._counter}"
        response = self.client.post(
            "/auth/register",
            json={
                "handle": handle,
                "email": f"{handle}@example.com",
                "password": password,
            },
        )
        assert response.status_code == 200, response.text
        return response.json()

    def make_admin(self, handle: str = "root") -> dict:
        user = self.repo.create_user(
            handle,
            f"{handle}@example.com",
            hash_password(ADMIN_PASSWORD),
            roles=(Role.CONTRIBUTOR, Role.ANNOTATOR, Role.ADMIN),
        )
        response = self.client.post(
            "/auth/login", json={"email": user.email, "password": ADMIN_PASSWORD}
        )
        assert response.status_code == 200, response.text
        return response.json()

    @staticmethod
    def auth(session: dict) -> dict:
        return {"Authorization": f"Bearer {session['token']}"}

    def annotator(self, handle: str | None = None) -> dict:
        session = self.register(handle)
        response = self.client.post("/me/roles/annotator", headers=self.auth(session))
        assert response.status_code == 200, response.text
        session["user"] = response.json()
        return session


@pytest.fixture
def harness(tmp_path) -> Harness:
    return Harness(tmp_path)
