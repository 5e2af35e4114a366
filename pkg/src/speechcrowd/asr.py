"""Client contract for the external speech recognizer used in confidence scoring.

The recognizer itself is external; this module ships the HTTP client for a
live endpoint and a deterministic stub for tests and ASR-less deployments.
Any client failure means "skip the confidence gate", never "fail the upload".
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Mapping, Protocol

import httpx

from .domain import DialectTag
from .qa.audio import AudioBuffer, encode_wav


class AsrError(Exception):
    """Base class; callers degrade to confidence-gate-skipped on any of these."""


class AsrTimeout(AsrError):
    pass


class EndpointUnavailable(AsrError):
    pass


class MalformedResponse(AsrError):
    pass


@dataclass(frozen=True)
class AsrRequest:
    audio_ref: str
    dialect: DialectTag
    timeout_s: float = 30.0

    def __post_init__(self) -> None:
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be > 0")


@dataclass(frozen=True)
class AsrResult:
    hypothesis: str
    model_id: str
    latency_ms: int

    def __post_init__(self) -> None:
        if self.latency_ms < 0:
            raise ValueError("latency_ms must be >= 0")


class AsrClient(Protocol):
    def transcribe(self, request: AsrRequest, audio: AudioBuffer) -> AsrResult: ...


class StubAsrClient:
    """Deterministic, side-effect-free recognizer keyed by audio content hash.

    Unknown hashes transcribe to the empty string.
    """

    model_id = "stub"

    def __init__(self, hypotheses: Mapping[str, str] | None = None) -> None:
        self._hypotheses = dict(hypotheses or {})

    def transcribe(self, request: AsrRequest, audio: AudioBuffer) -> AsrResult:
        return AsrResult(
            hypothesis=self._hypotheses.get(request.audio_ref, ""),
            model_id=self.model_id,
            latency_ms=0,
        )


class HttpAsrClient:
    """POSTs audio to ``{endpoint}/transcribe`` and expects ``{"text": ...}``.

    At most ``max_concurrent`` requests are in flight toward the endpoint at
    any time; excess callers wait on the semaphore.
    """

    def __init__(
        self,
        endpoint: str,
        auth_token: str | None = None,
        max_concurrent: int = 4,
    ) -> None:
        if max_concurrent < 1:
            raise ValueError("max_concurrent must be >= 1")
        self._endpoint = endpoint.rstrip("/")
        self._auth_token = auth_token
        self._slots = threading.Semaphore(max_concurrent)

    def transcribe(self, request: AsrRequest, audio: AudioBuffer) -> AsrResult:
        headers = {}
        if self._auth_token:
            headers["Authorization"] = f"Bearer {self._auth_token}"
        started = time.monotonic()
        with self._slots:
            try:
                response = httpx.post(
                    f"{self._endpoint}/transcribe",
                    files={"audio": ("audio.wav", encode_wav(audio), "audio/wav")},
                    data={"dialect": request.dialect.label},
                    headers=headers,
                    timeout=request.timeout_s,
                )
            except httpx.TimeoutException as exc:
                raise AsrTimeout(str(exc)) from exc
            except httpx.TransportError as exc:
                raise EndpointUnavailable(str(exc)) from exc
        latency_ms = int((time.monotonic() - started) * 1000)
        if response.status_code != 200:
            raise EndpointUnavailable(f"recognizer returned HTTP {response.status_code}")
        try:
            body = response.json()
            hypothesis = body["text"]
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedResponse(f"expected JSON object with 'text': {exc}") from exc
        if not isinstance(hypothesis, str):
            raise MalformedResponse("'text' is not a string")
        model_id = body.get("model_id", "remote")
        return AsrResult(hypothesis=hypothesis, model_id=str(model_id), latency_ms=latency_ms)


def safe_transcribe(client: AsrClient, request: AsrRequest, audio: AudioBuffer) -> str | None:
    """Hypothesis, or None when the recognizer fails; callers degrade to
    transcript-free quality checks rather than blocking on the recognizer."""
    try:
        return client.transcribe(request, audio).hypothesis
    except AsrError:
        return None
