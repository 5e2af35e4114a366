"""QA rescoring over a live store and physical garbage collection of audio."""

from __future__ import annotations

import pytest

from speechcrowd.asr import AsrError, EndpointUnavailable, StubAsrClient
from speechcrowd.domain import Role, SubmissionState, Verdict
from speechcrowd.maintenance import BackfillResult, backfill_qa, gc_blobs
from speechcrowd.qa import ASR_UNAVAILABLE, LOW_CONFIDENCE, QaThresholds
from speechcrowd.qa.textnorm import normalize_arabic
from synth import clean_take, digest_of
from test_repository import EG, make_task, make_user
from test_stats_export import DAY0, seeded_submission

PROMPT = "مرحبا يا عالم"


class FailingAsr:
    def transcribe(self, request, audio):
        raise EndpointUnavailable("asr is down")


@pytest.fixture
def store(repo):
    admin = make_user(repo, "root", roles=(Role.CONTRIBUTOR, Role.ADMIN))
    user = make_user(repo, "aya")
    task = make_task(repo, admin)
    prompts = repo.add_prompts(
        task.task_id,
        [(f"{PROMPT} {i}", EG, 5) for i in range(6)],
        normalize_arabic,
    )
    return repo, user, prompts


def seed_take(repo, prompt, user, state, seed):
    data = clean_take(seed)
    digest = repo.blobs.store(data)
    submission = seeded_submission(
        prompt, user, state, 3.0, DAY0, confidence=0.5, audio_ref=digest
    )
    repo.insert_submission(submission)
    return submission, digest


class TestBackfillQa:
    def test_failed_take_passes_once_asr_recovers(self, store):
        """A take that failed only because ASR was down gets promoted when the
        rescore can hear it."""
        repo, user, prompts = store
        submission, digest = seed_take(
            repo, prompts[0], user, SubmissionState.QA_FAILED, seed=1
        )
        asr = StubAsrClient({digest: prompts[0].text})
        result = backfill_qa(repo, asr, [SubmissionState.QA_FAILED])
        assert result == BackfillResult(rescored=1, failed=0)
        fresh = repo.get_submission(submission.submission_id)
        assert fresh.state is SubmissionState.QA_PASSED
        assert fresh.qa.verdict is Verdict.PASS
        assert fresh.qa.confidence == pytest.approx(1.0)

    def test_passed_take_fails_under_stricter_thresholds(self, store):
        repo, user, prompts = store
        submission, digest = seed_take(
            repo, prompts[0], user, SubmissionState.QA_PASSED, seed=2
        )
        asr = StubAsrClient({digest: "كلام مختلف تماما عن المطلوب"})
        result = backfill_qa(
            repo, asr, [SubmissionState.QA_PASSED],
            thresholds=QaThresholds(min_confidence=0.9),
        )
        assert result == BackfillResult(rescored=1, failed=0)
        fresh = repo.get_submission(submission.submission_id)
        assert fresh.state is SubmissionState.QA_FAILED
        assert LOW_CONFIDENCE in fresh.qa.fail_reasons

    def test_reviewed_states_keep_their_outcome(self, store):
        """Accepted and rejected takes get fresh reports but never move."""
        repo, user, prompts = store
        submission, digest = seed_take(
            repo, prompts[0], user, SubmissionState.ACCEPTED, seed=3
        )
        asr = StubAsrClient({digest: "كلام لا يمت للنص بصلة"})
        result = backfill_qa(repo, asr, [SubmissionState.ACCEPTED])
        assert result == BackfillResult(rescored=1, failed=0)
        fresh = repo.get_submission(submission.submission_id)
        assert fresh.state is SubmissionState.ACCEPTED
        assert fresh.qa.verdict is Verdict.FAIL

    def test_outage_during_rescore_skips_confidence_gate(self, store):
        repo, user, prompts = store
        submission, _ = seed_take(
            repo, prompts[0], user, SubmissionState.QA_FAILED, seed=4
        )
        result = backfill_qa(repo, FailingAsr(), [SubmissionState.QA_FAILED])
        assert result == BackfillResult(rescored=1, failed=0)
        fresh = repo.get_submission(submission.submission_id)
        assert fresh.state is SubmissionState.QA_PASSED
        assert fresh.qa.confidence is None
        assert ASR_UNAVAILABLE in fresh.qa.notes

    def test_broken_items_are_counted_not_fatal(self, store):
        repo, user, prompts = store
        healthy, digest = seed_take(
            repo, prompts[0], user, SubmissionState.QA_FAILED, seed=5
        )
        # blob vanished from disk
        missing = seeded_submission(
            prompts[1], user, SubmissionState.QA_FAILED, 3.0, DAY0,
            audio_ref="0" * 64,
        )
        repo.insert_submission(missing)
        # blob exists but is not audio
        garbage_ref = repo.blobs.store(b"definitely not a wav file")
        undecodable = seeded_submission(
            prompts[2], user, SubmissionState.QA_FAILED, 3.0, DAY0,
            audio_ref=garbage_ref,
        )
        repo.insert_submission(undecodable)

        asr = StubAsrClient({digest: prompts[0].text})
        result = backfill_qa(repo, asr, [SubmissionState.QA_FAILED])
        assert result == BackfillResult(rescored=1, failed=2)
        assert (
            repo.get_submission(healthy.submission_id).state
            is SubmissionState.QA_PASSED
        )

    def test_only_requested_states_are_touched(self, store):
        repo, user, prompts = store
        passed, _ = seed_take(repo, prompts[0], user, SubmissionState.QA_PASSED, seed=6)
        failed, digest = seed_take(
            repo, prompts[1], user, SubmissionState.QA_FAILED, seed=7
        )
        asr = StubAsrClient({digest: prompts[1].text})
        result = backfill_qa(repo, asr, [SubmissionState.QA_FAILED])
        assert result.rescored == 1
        assert repo.get_submission(passed.submission_id).qa.confidence == 0.5


class TestGcBlobs:
    def test_removes_orphans_and_deleted_only_audio(self, store):
        repo, user, prompts = store
        live, live_digest = seed_take(
            repo, prompts[0], user, SubmissionState.QA_PASSED, seed=10
        )
        _, dead_digest = seed_take(
            repo, prompts[1], user, SubmissionState.DELETED, seed=11
        )
        orphan_digest = repo.blobs.store(clean_take(12))

        removed = gc_blobs(repo)
        assert removed == 2
        digests = set(repo.blobs.iter_digests())
        assert digests == {live_digest}
        assert gc_blobs(repo) == 0  # idempotent

    def test_blob_shared_with_live_submission_survives(self, store):
        repo, user, prompts = store
        data = clean_take(13)
        digest = repo.blobs.store(data)
        keep = seeded_submission(
            prompts[0], user, SubmissionState.ACCEPTED, 3.0, DAY0, audio_ref=digest
        )
        gone = seeded_submission(
            prompts[1], user, SubmissionState.DELETED, 3.0, DAY0, audio_ref=digest
        )
        repo.insert_submission(keep)
        repo.insert_submission(gone)
        assert gc_blobs(repo) == 0
        assert digest in set(repo.blobs.iter_digests())

    def test_every_non_deleted_state_protects_its_audio(self, store):
        repo, user, prompts = store
        protected = [s for s in SubmissionState if s is not SubmissionState.DELETED]
        digests = []
        for i, state in enumerate(protected):
            _, digest = seed_take(repo, prompts[i], user, state, seed=20 + i)
            digests.append(digest)
        assert gc_blobs(repo) == 0
        assert set(repo.blobs.iter_digests()) == set(digests)
