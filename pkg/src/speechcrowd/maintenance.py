"""Operational commands that run against a live store: QA rescoring after an
outage or threshold change, and physical removal of unreferenced audio."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

from .asr import AsrClient, AsrRequest, safe_transcribe
from .domain import SubmissionState, Verdict
from .qa import ASR_UNAVAILABLE, QaThresholds, VadParams, decode_wav, run_qa
from .store import BlobMissing, Repository

log = logging.getLogger(__name__)

# Only states on the pre-validation side of the workflow may move during a
# rescore; later states keep their reviewed outcome and just get fresh reports.
_RESCORABLE = frozenset(
    {SubmissionState.RECORDED, SubmissionState.QA_PASSED, SubmissionState.QA_FAILED}
)


@dataclass(frozen=True)
class BackfillResult:
    rescored: int
    failed: int


def backfill_qa(
    repo: Repository,
    asr_client: AsrClient,
    states: Iterable[SubmissionState],
    params: VadParams | None = None,
    thresholds: QaThresholds | None = None,
) -> BackfillResult:
    """Re-run quality checks over every submission in the given states.

    Per-item failures (missing blob, undecodable audio) are logged and
    counted, never fatal.
    """
    params = params or VadParams()
    thresholds = thresholds or QaThresholds()
    rescored = 0
    failed = 0
    for row in repo.submissions_with_prompts(states):
        submission = row["submission"]
        prompt = row["prompt"]
        try:
            audio = decode_wav(repo.blobs.read(submission.audio_ref))
            request = AsrRequest(audio_ref=submission.audio_ref, dialect=prompt.dialect)
            hypothesis = safe_transcribe(asr_client, request, audio)
            notes = () if hypothesis is not None else (ASR_UNAVAILABLE,)
            report = run_qa(
                audio,
                prompt.text,
                asr_hypothesis=hypothesis,
                params=params,
                thresholds=thresholds,
                notes=notes,
            )
            new_state = None
            if submission.state in _RESCORABLE:
                new_state = (
                    SubmissionState.QA_PASSED
                    if report.verdict is Verdict.PASS
                    else SubmissionState.QA_FAILED
                )
            repo.update_qa(submission.submission_id, report, new_state=new_state)
            rescored += 1
        except Exception as exc:
            log.warning("rescore failed for %s: %s", submission.submission_id, exc)
            failed += 1
    return BackfillResult(rescored=rescored, failed=failed)


def gc_blobs(repo: Repository) -> int:
    """Delete stored audio referenced only by deleted submissions (or by
    nothing at all). Returns the number of blobs removed."""
    keep = repo.referenced_digests(include_deleted=False)
    removed = 0
    for digest in list(repo.blobs.iter_digests()):
        if digest not in keep:
            try:
                repo.blobs.delete(digest)
                removed += 1
            except BlobMissing:
                pass
    return removed
