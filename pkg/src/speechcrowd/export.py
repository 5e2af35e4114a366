"""Dataset release exporter: accepted audio plus a JSON-lines manifest.

A release is reproducible: given the same store contents and release key,
manifest.jsonl is byte-identical across runs. Speakers appear only as keyed
pseudonyms; the key itself is never written, only its fingerprint.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .domain import DialectTag, QAReport, format_timestamp, utcnow
from .store import Repository


class ExportError(Exception):
    pass


class NonEmptyOutput(ExportError):
    """The output directory already has contents; refusing to mix releases."""


@dataclass(frozen=True)
class ReleaseSummary:
    records: int
    total_hours: float


def speaker_pseudonym(release_key: bytes, user_id: str) -> str:
    """Stable keyed pseudonym: same user and key give the same id, and the id
    reveals nothing about the real user_id without the key."""
    digest = hmac.new(release_key, user_id.encode("utf-8"), hashlib.sha256).hexdigest()
    return f"spk_{digest[:32]}"


def key_fingerprint(release_key: bytes) -> str:
    return hashlib.sha256(release_key).hexdigest()[:16]


def _qa_summary(qa: QAReport | None) -> dict | None:
    if qa is None:
        return None
    return {
        "verdict": qa.verdict.value,
        "speech_s": qa.speech_s,
        "clipping_ratio": qa.clipping_ratio,
        "fail_reasons": list(qa.fail_reasons),
    }


def _manifest_record(
    audio_path: str, text: str, dialect: DialectTag, duration_s: float,
    speaker_id: str, confidence: float | None, qa: QAReport | None,
) -> dict:
    # Field order is fixed; json.dumps preserves insertion order.
    return {
        "audio_path": audio_path,
        "text": text,
        "dialect": dialect.label,
        "duration_s": duration_s,
        "speaker_id": speaker_id,
        "confidence": confidence,
        "qa": _qa_summary(qa),
    }


def export_dataset(
    repo: Repository,
    output_dir: str | os.PathLike,
    release_key: bytes,
    task_id: str | None = None,
    dialect: DialectTag | None = None,
) -> ReleaseSummary:
    """Copy every accepted submission's WAV into output_dir/audio/ and write
    manifest.jsonl (sorted, LF, UTF-8) plus release.json metadata.

    The submission rows are read in a single snapshot, so writes racing the
    export cannot produce a half-updated release.
    """
    out = Path(output_dir)
    if out.exists() and any(out.iterdir()):
        raise NonEmptyOutput(str(out))
    rows = repo.accepted_for_export(task_id=task_id, dialect=dialect)

    (out / "audio").mkdir(parents=True, exist_ok=True)
    records: list[dict] = []
    total_seconds = 0.0
    copied: set[str] = set()
    for row in rows:
        submission = row["submission"]
        digest = submission.audio_ref
        audio_path = f"audio/{digest}.wav"
        if digest not in copied:
            (out / audio_path).write_bytes(repo.blobs.read(digest))
            copied.add(digest)
        records.append(
            _manifest_record(
                audio_path=audio_path,
                text=row["prompt_text"],
                dialect=row["dialect"],
                duration_s=submission.duration_s,
                speaker_id=speaker_pseudonym(release_key, submission.user_id),
                confidence=submission.qa.confidence if submission.qa else None,
                qa=submission.qa,
            )
        )
        total_seconds += submission.duration_s

    records.sort(key=lambda r: (r["audio_path"], r["speaker_id"], r["text"]))
    with open(out / "manifest.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")

    release = {
        "records": len(records),
        "total_hours": total_seconds / 3600.0,
        "filters": {
            "task_id": task_id,
            "dialect": dialect.label if dialect else None,
        },
        "created_at": format_timestamp(utcnow()),
        "tool_version": __version__,
        "key_fingerprint": key_fingerprint(release_key),
    }
    with open(out / "release.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(release, fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    return ReleaseSummary(records=len(records), total_hours=total_seconds / 3600.0)
