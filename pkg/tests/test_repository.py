"""Repository behaviour against a real SQLite file.

The prompt-assignment test checks the SQL against a brute-force Python
oracle over randomized stores; the CAS test races real threads.
"""

from __future__ import annotations

import random
import threading
from datetime import datetime, timedelta, timezone

import pytest

from speechcrowd.domain import (
    DialectTag,
    DuplicateReview,
    IllegalTransition,
    LIVE_STATES,
    QAReport,
    ReviewVerdict,
    Role,
    Submission,
    SubmissionEvent,
    SubmissionState,
    TaskKind,
    TaskStatus,
    TerminalState,
    Verdict,
    new_id,
    utcnow,
)
from speechcrowd.qa.textnorm import normalize_arabic
from speechcrowd.store import (
    CannotReview,
    DuplicateLiveSubmission,
    DuplicatePrompt,
    EmailTaken,
    NotFound,
    StaleState,
    TaskClosed,
    Unauthorized,
    UserBlocked,
)

EG = DialectTag(country="EG")
EG_CAIRO = DialectTag(country="EG", city="Cairo")
SA = DialectTag(country="SA")

PASS_REPORT = QAReport(
    speech_segments=((0.5, 2.5),),
    speech_ratio=2.0 / 3.0,
    clipping_ratio=0.0,
    verdict=Verdict.PASS,
)


def make_user(repo, handle, roles=(Role.CONTRIBUTOR,), email=None):
    return repo.create_user(
        handle=handle,
        email=email or f"{handle}@example.com",
        password_hash="scrypt$x",
        roles=roles,
    )


def make_task(repo, admin, dialects=(EG,), status=TaskStatus.OPEN):
    return repo.create_task(
        title="Read prompts aloud",
        kind=TaskKind.SPEECH_RECORDING,
        dialects=dialects,
        created_by=admin.user_id,
        status=status,
    )


def add_prompt(repo, task, text, dialect=EG, target=2):
    return repo.add_prompts(task.task_id, [(text, dialect, target)], normalize_arabic)[0]


def make_submission(
    prompt,
    user,
    state=SubmissionState.PENDING_VALIDATION,
    confidence=None,
    created_at=None,
    audio_ref=None,
):
    qa = None
    if state not in (SubmissionState.RECORDED, SubmissionState.DELETED):
        qa = QAReport(
            speech_segments=PASS_REPORT.speech_segments,
            speech_ratio=PASS_REPORT.speech_ratio,
            clipping_ratio=0.0,
            verdict=Verdict.PASS,
            confidence=confidence,
        )
    return Submission(
        submission_id=new_id("s"),
        prompt_id=prompt.prompt_id,
        user_id=user.user_id,
        audio_ref=audio_ref or new_id("blob"),
        duration_s=3.0,
        sample_rate_hz=16000,
        state=state,
        qa=qa,
        created_at=created_at or utcnow(),
    )


@pytest.fixture
def admin(repo):
    return make_user(repo, "root", roles=(Role.CONTRIBUTOR, Role.ANNOTATOR, Role.ADMIN))


class TestUsers:
    def test_create_and_get_round_trip(self, repo):
        user = make_user(repo, "aya")
        loaded = repo.get_user(user.user_id)
        assert loaded == user
        assert loaded.roles == frozenset({Role.CONTRIBUTOR})
        assert not loaded.blocked
        assert loaded.created_at.tzinfo is not None

    def test_duplicate_email_rejected(self, repo):
        make_user(repo, "aya", email="same@example.com")
        with pytest.raises(EmailTaken):
            make_user(repo, "other", email="same@example.com")

    def test_get_unknown_user(self, repo):
        with pytest.raises(NotFound):
            repo.get_user("u_missing")

    def test_find_credentials(self, repo):
        user = make_user(repo, "aya", email="aya@example.com")
        found = repo.find_credentials("  AYA@example.com ")
        assert found is not None
        assert found[0] == user
        assert found[1] == "scrypt$x"
        assert repo.find_credentials("nobody@example.com") is None

    def test_list_users_ordered_by_creation(self, repo):
        names = ["aya", "badr", "coco"]
        created = [make_user(repo, n) for n in names]
        assert repo.list_users() == created

    def test_set_blocked(self, repo):
        user = make_user(repo, "aya")
        repo.set_blocked(user.user_id, True)
        assert repo.get_user(user.user_id).blocked
        repo.set_blocked(user.user_id, False)
        assert not repo.get_user(user.user_id).blocked
        with pytest.raises(NotFound):
            repo.set_blocked("u_missing", True)

    def test_add_role(self, repo):
        user = make_user(repo, "aya")
        updated = repo.add_role(user.user_id, Role.ANNOTATOR)
        assert updated.roles == frozenset({Role.CONTRIBUTOR, Role.ANNOTATOR})
        again = repo.add_role(user.user_id, Role.ANNOTATOR)
        assert again.roles == updated.roles

    def test_user_submission_counts(self, repo, admin):
        user = make_user(repo, "aya")
        task = make_task(repo, admin)
        p1 = add_prompt(repo, task, "نص اول")
        p2 = add_prompt(repo, task, "نص ثاني")
        repo.insert_submission(make_submission(p1, user, SubmissionState.ACCEPTED))
        repo.insert_submission(make_submission(p2, user, SubmissionState.QA_FAILED))
        counts = repo.user_submission_counts(user.user_id)
        assert counts["accepted"] == 1
        assert counts["qa_failed"] == 1
        assert counts["rejected"] == 0
        assert set(counts) == {s.value for s in SubmissionState}


class TestSessions:
    def test_round_trip(self, repo):
        user = make_user(repo, "aya")
        expires = utcnow() + timedelta(hours=24)
        repo.create_session("hash-1", user.user_id, expires)
        found = repo.find_session("hash-1")
        assert found is not None
        assert found[0] == user
        assert found[1] == expires

    def test_unknown_token(self, repo):
        assert repo.find_session("nope") is None

    def test_delete_session(self, repo):
        user = make_user(repo, "aya")
        repo.create_session("hash-1", user.user_id, utcnow())
        repo.delete_session("hash-1")
        assert repo.find_session("hash-1") is None

    def test_delete_sessions_for_user(self, repo):
        user = make_user(repo, "aya")
        repo.create_session("hash-1", user.user_id, utcnow())
        repo.create_session("hash-2", user.user_id, utcnow())
        repo.delete_sessions_for(user.user_id)
        assert repo.find_session("hash-1") is None
        assert repo.find_session("hash-2") is None


class TestTasksAndPrompts:
    def test_task_round_trip(self, repo, admin):
        task = make_task(repo, admin, dialects=(EG, SA))
        assert repo.get_task(task.task_id) == task

    def test_list_tasks_by_status(self, repo, admin):
        open_task = make_task(repo, admin)
        closed = make_task(repo, admin, status=TaskStatus.CLOSED)
        assert repo.list_tasks(TaskStatus.OPEN) == [open_task]
        assert set(t.task_id for t in repo.list_tasks()) == {open_task.task_id, closed.task_id}

    def test_add_prompts_batch(self, repo, admin):
        task = make_task(repo, admin)
        prompts = repo.add_prompts(
            task.task_id,
            [("نص اول", EG, 2), ("نص ثاني", EG_CAIRO, 3)],
            normalize_arabic,
        )
        assert len(prompts) == 2
        assert repo.get_prompt(prompts[1].prompt_id).dialect == EG_CAIRO

    def test_batch_is_all_or_nothing(self, repo, admin):
        task = make_task(repo, admin)
        with pytest.raises(DuplicatePrompt) as exc:
            repo.add_prompts(
                task.task_id,
                [("نص اول", EG, 2), ("نص ثاني", EG, 2), ("نص اول", EG, 2)],
                normalize_arabic,
            )
        assert "row 3" in str(exc.value)
        assert repo.list_prompts(task.task_id) == []

    def test_duplicate_against_existing_prompt(self, repo, admin):
        task = make_task(repo, admin)
        add_prompt(repo, task, "نص اول")
        with pytest.raises(DuplicatePrompt) as exc:
            repo.add_prompts(task.task_id, [("نص اول", EG, 2)], normalize_arabic)
        assert "row 1" in str(exc.value)

    def test_duplicate_detection_uses_normalized_text(self, repo, admin):
        task = make_task(repo, admin)
        add_prompt(repo, task, "محمد")
        with pytest.raises(DuplicatePrompt):
            # same text after diacritics are stripped
            repo.add_prompts(task.task_id, [("مُحَمَّد", EG, 2)], normalize_arabic)

    def test_same_text_other_dialect_or_task_is_fine(self, repo, admin):
        task = make_task(repo, admin)
        other = make_task(repo, admin)
        add_prompt(repo, task, "نص اول", dialect=EG)
        add_prompt(repo, task, "نص اول", dialect=SA)
        add_prompt(repo, other, "نص اول", dialect=EG)

    def test_add_prompts_unknown_task(self, repo):
        with pytest.raises(NotFound):
            repo.add_prompts("t_missing", [("نص", EG, 1)], normalize_arabic)


class TestNextPrompt:
    def oracle(self, prompts, submissions, user_id, dialect):
        """Brute-force restatement of the assignment rule."""
        live = [s for s in submissions if s.state in LIVE_STATES]
        best = None
        for p in sorted(prompts, key=lambda p: p.prompt_id):
            if not p.active or p.dialect != dialect:
                continue
            count = sum(1 for s in live if s.prompt_id == p.prompt_id)
            if count >= p.target_recordings:
                continue
            if any(s.user_id == user_id and s.prompt_id == p.prompt_id for s in live):
                continue
            if best is None or count < best[0]:
                best = (count, p)
        return best[1] if best else None

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_matches_brute_force_oracle(self, repo, admin, seed):
        rng = random.Random(seed)
        task = make_task(repo, admin)
        users = [make_user(repo, f"user{seed}{i}") for i in range(3)]
        prompts = [
            add_prompt(repo, task, f"نص {i}", target=rng.randint(1, 3)) for i in range(8)
        ]
        inserted: list[Submission] = []
        states = [
            SubmissionState.QA_PASSED,
            SubmissionState.QA_FAILED,
            SubmissionState.PENDING_VALIDATION,
            SubmissionState.ACCEPTED,
            SubmissionState.REJECTED,
        ]
        for _ in range(40):
            user = rng.choice(users)
            got = repo.next_prompt_for(user.user_id, task.task_id, EG)
            want = self.oracle(prompts, inserted, user.user_id, EG)
            assert (got.prompt_id if got else None) == (want.prompt_id if want else None)
            if got is None:
                break
            sub = make_submission(got, user, rng.choice(states))
            repo.insert_submission(sub)
            inserted.append(sub)

    def test_exhausted_returns_none(self, repo, admin):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص", target=1)
        recorder = make_user(repo, "rec")
        repo.insert_submission(make_submission(prompt, recorder, SubmissionState.ACCEPTED))
        other = make_user(repo, "other")
        assert repo.next_prompt_for(other.user_id, task.task_id, EG) is None

    def test_failed_take_frees_the_prompt_for_the_same_user(self, repo, admin):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص", target=2)
        user = make_user(repo, "aya")
        repo.insert_submission(make_submission(prompt, user, SubmissionState.QA_FAILED))
        got = repo.next_prompt_for(user.user_id, task.task_id, EG)
        assert got is not None and got.prompt_id == prompt.prompt_id

    def test_live_take_hides_the_prompt_from_the_same_user(self, repo, admin):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص", target=5)
        user = make_user(repo, "aya")
        repo.insert_submission(make_submission(prompt, user, SubmissionState.QA_PASSED))
        assert repo.next_prompt_for(user.user_id, task.task_id, EG) is None

    def test_dialect_must_match_exactly(self, repo, admin):
        task = make_task(repo, admin)
        add_prompt(repo, task, "نص قاهري", dialect=EG_CAIRO)
        user = make_user(repo, "aya")
        # a country-level request does not match a city-tagged prompt
        assert repo.next_prompt_for(user.user_id, task.task_id, EG) is None
        got = repo.next_prompt_for(user.user_id, task.task_id, EG_CAIRO)
        assert got is not None

    def test_blocked_user_rejected(self, repo, admin):
        task = make_task(repo, admin)
        user = make_user(repo, "aya")
        repo.set_blocked(user.user_id, True)
        with pytest.raises(UserBlocked):
            repo.next_prompt_for(user.user_id, task.task_id, EG)

    @pytest.mark.parametrize("status", [TaskStatus.PAUSED, TaskStatus.CLOSED])
    def test_non_open_task_rejected(self, repo, admin, status):
        task = make_task(repo, admin, status=status)
        user = make_user(repo, "aya")
        with pytest.raises(TaskClosed):
            repo.next_prompt_for(user.user_id, task.task_id, EG)


class TestSubmissionCrud:
    def test_round_trip_with_report(self, repo, admin):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص")
        user = make_user(repo, "aya")
        sub = make_submission(prompt, user, SubmissionState.QA_PASSED, confidence=0.9)
        repo.insert_submission(sub)
        record = repo.get_submission_record(sub.submission_id)
        assert record.submission == sub
        assert record.flagged_for_admin is False

    def test_live_pair_rejected(self, repo, admin):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص")
        user = make_user(repo, "aya")
        repo.insert_submission(make_submission(prompt, user, SubmissionState.QA_PASSED))
        with pytest.raises(DuplicateLiveSubmission):
            repo.insert_submission(make_submission(prompt, user, SubmissionState.QA_PASSED))
        assert repo.live_pair_exists(prompt.prompt_id, user.user_id)

    def test_non_live_pair_allows_rerecord(self, repo, admin):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص")
        user = make_user(repo, "aya")
        repo.insert_submission(make_submission(prompt, user, SubmissionState.QA_FAILED))
        assert not repo.live_pair_exists(prompt.prompt_id, user.user_id)
        repo.insert_submission(make_submission(prompt, user, SubmissionState.QA_PASSED))

    def test_list_user_submissions_state_filter(self, repo, admin):
        task = make_task(repo, admin)
        p1 = add_prompt(repo, task, "نص اول")
        p2 = add_prompt(repo, task, "نص ثاني")
        user = make_user(repo, "aya")
        base = utcnow()
        first = make_submission(
            p1, user, SubmissionState.QA_FAILED, created_at=base - timedelta(minutes=1)
        )
        second = make_submission(p2, user, SubmissionState.ACCEPTED, created_at=base)
        repo.insert_submission(first)
        repo.insert_submission(second)
        assert [s.submission_id for s in repo.list_user_submissions(user.user_id)] == [
            first.submission_id,
            second.submission_id,
        ]
        only = repo.list_user_submissions(user.user_id, states=[SubmissionState.ACCEPTED])
        assert [s.submission_id for s in only] == [second.submission_id]

    def test_submissions_for_digest(self, repo, admin):
        task = make_task(repo, admin)
        p1 = add_prompt(repo, task, "نص اول")
        user = make_user(repo, "aya")
        sub = make_submission(p1, user, SubmissionState.ACCEPTED, audio_ref="d" * 64)
        repo.insert_submission(sub)
        assert [s.submission_id for s in repo.submissions_for_digest("d" * 64)] == [
            sub.submission_id
        ]
        assert repo.submissions_for_digest("0" * 64) == []

    def test_get_unknown_submission(self, repo):
        with pytest.raises(NotFound):
            repo.get_submission("s_missing")


class TestTransitions:
    def _pending_sub(self, repo, admin, state=SubmissionState.QA_PASSED):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص")
        user = make_user(repo, f"aya{new_id('x')[:6]}")
        sub = make_submission(prompt, user, state)
        repo.insert_submission(sub)
        return sub

    def test_cas_happy_path_persists(self, repo, admin):
        sub = self._pending_sub(repo, admin)
        updated = repo.transition_atomically(
            sub.submission_id, SubmissionState.QA_PASSED, SubmissionEvent.SEND_TO_VALIDATION
        )
        assert updated.state is SubmissionState.PENDING_VALIDATION
        assert repo.get_submission(sub.submission_id).state is SubmissionState.PENDING_VALIDATION

    def test_cas_with_wrong_expected_state(self, repo, admin):
        sub = self._pending_sub(repo, admin)
        with pytest.raises(StaleState):
            repo.transition_atomically(
                sub.submission_id,
                SubmissionState.PENDING_VALIDATION,
                SubmissionEvent.APPROVE,
            )

    def test_cas_unknown_submission(self, repo):
        with pytest.raises(NotFound):
            repo.transition_atomically(
                "s_missing", SubmissionState.QA_PASSED, SubmissionEvent.REDO
            )

    def test_illegal_event_propagates(self, repo, admin):
        sub = self._pending_sub(repo, admin)
        with pytest.raises(IllegalTransition):
            repo.transition_atomically(
                sub.submission_id, SubmissionState.QA_PASSED, SubmissionEvent.APPROVE
            )
        assert repo.get_submission(sub.submission_id).state is SubmissionState.QA_PASSED

    def test_concurrent_cas_has_exactly_one_winner(self, repo, admin):
        for _ in range(20):
            sub = self._pending_sub(repo, admin)
            results = []

            def attempt():
                try:
                    repo.transition_atomically(
                        sub.submission_id,
                        SubmissionState.QA_PASSED,
                        SubmissionEvent.SEND_TO_VALIDATION,
                    )
                    results.append("won")
                except StaleState:
                    results.append("lost")

            threads = [threading.Thread(target=attempt) for _ in range(2)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            assert sorted(results) == ["lost", "won"]

    def test_apply_event_admin_delete_then_terminal(self, repo, admin):
        sub = self._pending_sub(repo, admin)
        deleted = repo.apply_event(sub.submission_id, SubmissionEvent.ADMIN_DELETE)
        assert deleted.state is SubmissionState.DELETED
        with pytest.raises(TerminalState):
            repo.apply_event(sub.submission_id, SubmissionEvent.ADMIN_DELETE)


class TestCascadeDelete:
    def test_requires_admin(self, repo, admin):
        target = make_user(repo, "target")
        outsider = make_user(repo, "outsider")
        with pytest.raises(Unauthorized):
            repo.cascade_delete_user(target.user_id, outsider)

    def test_tombstones_submissions_and_marks_reviews(self, repo, admin):
        task = make_task(repo, admin)
        p1 = add_prompt(repo, task, "نص اول")
        p2 = add_prompt(repo, task, "نص ثاني")
        p3 = add_prompt(repo, task, "نص ثالث")
        target = make_user(repo, "target", roles=(Role.CONTRIBUTOR, Role.ANNOTATOR))
        other = make_user(repo, "other")
        s1 = make_submission(p1, target, SubmissionState.ACCEPTED)
        s2 = make_submission(p2, target, SubmissionState.QA_FAILED)
        theirs = make_submission(p3, other, SubmissionState.PENDING_VALIDATION)
        for sub in (s1, s2, theirs):
            repo.insert_submission(sub)
        repo.post_review(theirs.submission_id, target, ReviewVerdict.FLAG, None, None, quorum=2)

        deleted = repo.cascade_delete_user(target.user_id, admin)
        assert deleted == 2
        assert repo.get_submission(s1.submission_id).state is SubmissionState.DELETED
        assert repo.get_submission(s2.submission_id).state is SubmissionState.DELETED
        # the other user's submission is untouched
        assert (
            repo.get_submission(theirs.submission_id).state
            is SubmissionState.PENDING_VALIDATION
        )
        with repo.db.transaction() as conn:
            flag = conn.execute(
                "SELECT reviewer_removed FROM reviews WHERE reviewer_id = ?",
                (target.user_id,),
            ).fetchone()[0]
        assert flag == 1
        # second cascade is a no-op
        assert repo.cascade_delete_user(target.user_id, admin) == 0

    def test_unknown_target(self, repo, admin):
        with pytest.raises(NotFound):
            repo.cascade_delete_user("u_missing", admin)


class TestPostReview:
    def _pending(self, repo, admin, owner_name="owner"):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, f"نص {owner_name}")
        owner = make_user(repo, owner_name)
        sub = make_submission(prompt, owner, SubmissionState.PENDING_VALIDATION)
        repo.insert_submission(sub)
        return sub

    def _annotator(self, repo, name):
        return make_user(repo, name, roles=(Role.CONTRIBUTOR, Role.ANNOTATOR))

    def test_quorum_one_approve_accepts(self, repo, admin):
        sub = self._pending(repo, admin)
        reviewer = self._annotator(repo, "rev1")
        review, outcome = repo.post_review(
            sub.submission_id, reviewer, ReviewVerdict.APPROVE, "تمام", None, quorum=1
        )
        assert outcome.submission.state is SubmissionState.ACCEPTED
        assert not outcome.admin_attention
        assert repo.get_submission(sub.submission_id).state is SubmissionState.ACCEPTED
        stored = repo.reviews_for(sub.submission_id)
        assert [r.review_id for r in stored] == [review.review_id]
        assert stored[0].annotation == "تمام"

    def test_quorum_two_needs_two_approvals(self, repo, admin):
        sub = self._pending(repo, admin)
        first = self._annotator(repo, "rev1")
        second = self._annotator(repo, "rev2")
        _, outcome = repo.post_review(
            sub.submission_id, first, ReviewVerdict.APPROVE, None, None, quorum=2
        )
        assert outcome.submission.state is SubmissionState.PENDING_VALIDATION
        _, outcome = repo.post_review(
            sub.submission_id, second, ReviewVerdict.APPROVE, None, None, quorum=2
        )
        assert outcome.submission.state is SubmissionState.ACCEPTED

    def test_reject_at_quorum(self, repo, admin):
        sub = self._pending(repo, admin)
        reviewer = self._annotator(repo, "rev1")
        _, outcome = repo.post_review(
            sub.submission_id, reviewer, ReviewVerdict.REJECT, None, "غير واضح", quorum=1
        )
        assert outcome.submission.state is SubmissionState.REJECTED

    def test_flag_parks_for_admin(self, repo, admin):
        sub = self._pending(repo, admin)
        reviewer = self._annotator(repo, "rev1")
        _, outcome = repo.post_review(
            sub.submission_id, reviewer, ReviewVerdict.FLAG, None, None, quorum=1
        )
        assert outcome.submission.state is SubmissionState.PENDING_VALIDATION
        assert outcome.admin_attention
        record = repo.get_submission_record(sub.submission_id)
        assert record.flagged_for_admin

    def test_duplicate_reviewer_rejected(self, repo, admin):
        sub = self._pending(repo, admin)
        reviewer = self._annotator(repo, "rev1")
        repo.post_review(sub.submission_id, reviewer, ReviewVerdict.FLAG, None, None, quorum=2)
        with pytest.raises(DuplicateReview):
            repo.post_review(
                sub.submission_id, reviewer, ReviewVerdict.APPROVE, None, None, quorum=2
            )

    def test_owner_cannot_review_own(self, repo, admin):
        sub = self._pending(repo, admin)
        owner = repo.add_role(sub.user_id, Role.ANNOTATOR)
        with pytest.raises(CannotReview):
            repo.post_review(sub.submission_id, owner, ReviewVerdict.APPROVE, None, None, 1)

    def test_plain_contributor_cannot_review(self, repo, admin):
        sub = self._pending(repo, admin)
        contributor = make_user(repo, "plain")
        with pytest.raises(CannotReview):
            repo.post_review(
                sub.submission_id, contributor, ReviewVerdict.APPROVE, None, None, 1
            )

    def test_non_pending_submission_cannot_be_reviewed(self, repo, admin):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص")
        owner = make_user(repo, "owner")
        sub = make_submission(prompt, owner, SubmissionState.QA_PASSED)
        repo.insert_submission(sub)
        reviewer = self._annotator(repo, "rev1")
        with pytest.raises(CannotReview):
            repo.post_review(sub.submission_id, reviewer, ReviewVerdict.APPROVE, None, None, 1)

    def test_unknown_submission(self, repo, admin):
        with pytest.raises(NotFound):
            repo.post_review("s_missing", admin, ReviewVerdict.APPROVE, None, None, 1)


class TestValidationQueue:
    def test_excludes_own_and_already_reviewed(self, repo, admin):
        task = make_task(repo, admin)
        p1 = add_prompt(repo, task, "نص اول")
        p2 = add_prompt(repo, task, "نص ثاني")
        p3 = add_prompt(repo, task, "نص ثالث")
        reviewer = make_user(repo, "rev", roles=(Role.CONTRIBUTOR, Role.ANNOTATOR))
        other = make_user(repo, "other")
        base = utcnow()
        mine = make_submission(
            p1, reviewer, SubmissionState.PENDING_VALIDATION, created_at=base
        )
        fresh = make_submission(
            p2, other, SubmissionState.PENDING_VALIDATION, created_at=base + timedelta(seconds=1)
        )
        seen = make_submission(
            p3, other, SubmissionState.PENDING_VALIDATION, created_at=base + timedelta(seconds=2)
        )
        for sub in (mine, fresh, seen):
            repo.insert_submission(sub)
        repo.post_review(seen.submission_id, reviewer, ReviewVerdict.FLAG, None, None, quorum=2)
        queue = repo.validation_queue(reviewer.user_id)
        assert [s.submission_id for s in queue] == [fresh.submission_id]

    def test_only_pending_states_appear(self, repo, admin):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص")
        other = make_user(repo, "other")
        repo.insert_submission(make_submission(prompt, other, SubmissionState.QA_PASSED))
        reviewer = make_user(repo, "rev")
        assert repo.validation_queue(reviewer.user_id) == []

    def test_country_filter_includes_city_variants(self, repo, admin):
        task = make_task(repo, admin)
        p_eg = add_prompt(repo, task, "نص مصري", dialect=EG)
        p_cairo = add_prompt(repo, task, "نص قاهري", dialect=EG_CAIRO)
        p_sa = add_prompt(repo, task, "نص سعودي", dialect=SA)
        other = make_user(repo, "other")
        base = utcnow()
        subs = {}
        for i, p in enumerate((p_eg, p_cairo, p_sa)):
            sub = make_submission(
                p, other, SubmissionState.PENDING_VALIDATION,
                created_at=base + timedelta(seconds=i),
            )
            repo.insert_submission(sub)
            subs[p.prompt_id] = sub
        reviewer = make_user(repo, "rev")
        country_wide = repo.validation_queue(reviewer.user_id, dialect=EG)
        assert {s.prompt_id for s in country_wide} == {p_eg.prompt_id, p_cairo.prompt_id}
        city_only = repo.validation_queue(reviewer.user_id, dialect=EG_CAIRO)
        assert {s.prompt_id for s in city_only} == {p_cairo.prompt_id}

    def test_limit_and_order(self, repo, admin):
        task = make_task(repo, admin)
        other = make_user(repo, "other")
        base = utcnow()
        created = []
        for i in range(5):
            p = add_prompt(repo, task, f"نص {i}")
            sub = make_submission(
                p, other, SubmissionState.PENDING_VALIDATION,
                created_at=base + timedelta(seconds=i),
            )
            repo.insert_submission(sub)
            created.append(sub.submission_id)
        reviewer = make_user(repo, "rev")
        queue = repo.validation_queue(reviewer.user_id, limit=3)
        assert [s.submission_id for s in queue] == created[:3]


class TestAdminListing:
    @pytest.fixture
    def seeded(self, repo, admin):
        task_a = make_task(repo, admin)
        task_b = make_task(repo, admin)
        user = make_user(repo, "aya")
        base = datetime(2026, 1, 1, tzinfo=timezone.utc)
        rows = []
        specs = [
            (task_a, SubmissionState.ACCEPTED, 0.2, 0),
            (task_a, SubmissionState.ACCEPTED, 0.9, 1),
            (task_a, SubmissionState.QA_FAILED, 0.3, 2),
            (task_b, SubmissionState.PENDING_VALIDATION, None, 3),
            (task_b, SubmissionState.REJECTED, 0.5, 4),
        ]
        for i, (task, state, conf, offset) in enumerate(specs):
            prompt = add_prompt(repo, task, f"نص {i}")
            sub = make_submission(
                prompt, user, state, confidence=conf,
                created_at=base + timedelta(days=offset),
            )
            repo.insert_submission(sub)
            rows.append((sub, task))
        return base, rows

    def test_time_range_is_half_open(self, repo, seeded):
        base, rows = seeded
        records, _ = repo.admin_list_submissions(base, base + timedelta(days=2))
        assert [r.submission.submission_id for r in records] == [
            rows[0][0].submission_id,
            rows[1][0].submission_id,
        ]

    def test_state_and_task_filters(self, repo, seeded):
        base, rows = seeded
        records, _ = repo.admin_list_submissions(
            base, base + timedelta(days=10), state=SubmissionState.ACCEPTED
        )
        assert {r.submission.submission_id for r in records} == {
            rows[0][0].submission_id,
            rows[1][0].submission_id,
        }
        task_b = rows[3][1]
        records, _ = repo.admin_list_submissions(
            base, base + timedelta(days=10), task_id=task_b.task_id
        )
        assert {r.submission.submission_id for r in records} == {
            rows[3][0].submission_id,
            rows[4][0].submission_id,
        }

    def test_confidence_filters_exclude_nulls(self, repo, seeded):
        base, rows = seeded
        records, _ = repo.admin_list_submissions(
            base, base + timedelta(days=10), max_confidence=0.3
        )
        got = {r.submission.submission_id for r in records}
        assert got == {rows[0][0].submission_id, rows[2][0].submission_id}
        records, _ = repo.admin_list_submissions(
            base, base + timedelta(days=10), min_confidence=0.5
        )
        got = {r.submission.submission_id for r in records}
        assert got == {rows[1][0].submission_id, rows[4][0].submission_id}

    def test_cursor_pagination_visits_everything_once(self, repo, seeded):
        base, rows = seeded
        seen: list[str] = []
        cursor = None
        pages = 0
        while True:
            records, cursor = repo.admin_list_submissions(
                base, base + timedelta(days=10), cursor=cursor, page_size=2
            )
            seen.extend(r.submission.submission_id for r in records)
            pages += 1
            if cursor is None:
                break
        assert pages == 3
        assert seen == [r[0].submission_id for r in rows]


class TestAggregateReads:
    def test_submissions_in_range_shape(self, repo, admin):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص", dialect=EG_CAIRO)
        user = make_user(repo, "aya")
        at = datetime(2026, 2, 1, tzinfo=timezone.utc)
        repo.insert_submission(
            make_submission(prompt, user, SubmissionState.ACCEPTED, created_at=at)
        )
        rows = repo.submissions_in_range(at, at + timedelta(days=1))
        assert rows == [
            {
                "state": SubmissionState.ACCEPTED,
                "duration_s": 3.0,
                "user_id": user.user_id,
                "dialect": EG_CAIRO,
            }
        ]
        assert repo.submissions_in_range(at + timedelta(days=1), at + timedelta(days=2)) == []

    def test_accepted_for_export_filters(self, repo, admin):
        task_a = make_task(repo, admin)
        task_b = make_task(repo, admin)
        user = make_user(repo, "aya")
        p_eg = add_prompt(repo, task_a, "نص مصري", dialect=EG)
        p_cairo = add_prompt(repo, task_a, "نص قاهري", dialect=EG_CAIRO)
        p_b = add_prompt(repo, task_b, "نص آخر", dialect=SA)
        accepted = [
            make_submission(p_eg, user, SubmissionState.ACCEPTED),
            make_submission(p_cairo, user, SubmissionState.ACCEPTED),
            make_submission(p_b, user, SubmissionState.ACCEPTED),
        ]
        for sub in accepted:
            repo.insert_submission(sub)
        # non-accepted states never export
        p_extra = add_prompt(repo, task_a, "نص رابع")
        repo.insert_submission(make_submission(p_extra, user, SubmissionState.PENDING_VALIDATION))

        everything = repo.accepted_for_export()
        assert [e["submission"].submission_id for e in everything] == sorted(
            s.submission_id for s in accepted
        )
        by_task = repo.accepted_for_export(task_id=task_a.task_id)
        assert {e["submission"].submission_id for e in by_task} == {
            accepted[0].submission_id,
            accepted[1].submission_id,
        }
        by_country = repo.accepted_for_export(dialect=EG)
        assert {e["prompt_text"] for e in by_country} == {"نص مصري", "نص قاهري"}
        by_city = repo.accepted_for_export(dialect=EG_CAIRO)
        assert [e["dialect"] for e in by_city] == [EG_CAIRO]

    def test_submissions_with_prompts(self, repo, admin):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص")
        user = make_user(repo, "aya")
        sub = make_submission(prompt, user, SubmissionState.QA_FAILED)
        repo.insert_submission(sub)
        rows = repo.submissions_with_prompts([SubmissionState.QA_FAILED])
        assert len(rows) == 1
        assert rows[0]["submission"].submission_id == sub.submission_id
        assert rows[0]["prompt"] == prompt
        assert repo.submissions_with_prompts([]) == []

    def test_update_qa(self, repo, admin):
        task = make_task(repo, admin)
        prompt = add_prompt(repo, task, "نص")
        user = make_user(repo, "aya")
        sub = make_submission(prompt, user, SubmissionState.QA_FAILED)
        repo.insert_submission(sub)
        better = QAReport(
            speech_segments=((0.5, 2.5),),
            speech_ratio=0.66,
            clipping_ratio=0.0,
            verdict=Verdict.PASS,
            confidence=0.95,
        )
        repo.update_qa(sub.submission_id, better, new_state=SubmissionState.QA_PASSED)
        reloaded = repo.get_submission(sub.submission_id)
        assert reloaded.state is SubmissionState.QA_PASSED
        assert reloaded.qa == better
        with pytest.raises(NotFound):
            repo.update_qa("s_missing", better)

    def test_referenced_digests(self, repo, admin):
        task = make_task(repo, admin)
        p1 = add_prompt(repo, task, "نص اول")
        p2 = add_prompt(repo, task, "نص ثاني")
        user = make_user(repo, "aya")
        live = make_submission(p1, user, SubmissionState.ACCEPTED, audio_ref="a" * 64)
        dead = make_submission(p2, user, SubmissionState.DELETED, audio_ref="b" * 64)
        repo.insert_submission(live)
        repo.insert_submission(dead)
        assert repo.referenced_digests() == {"a" * 64}
        assert repo.referenced_digests(include_deleted=True) == {"a" * 64, "b" * 64}
