import type {
  PromptView,
  QaReportView,
  SessionGrant,
  SubmissionView,
  UserPrivate,
} from "../../src/api/types";

export function userFixture(overrides: Partial<UserPrivate> = {}): UserPrivate {
  return {
    user_id: "u_1",
    handle: "aya",
    email: "aya@example.com",
    roles: ["contributor"],
    blocked: false,
    created_at: "2026-08-01T00:00:00Z",
    ...overrides,
  };
}

export function grantFixture(overrides: Partial<UserPrivate> = {}): SessionGrant {
  return {
    token: "tok-123",
    expires_at: "2026-08-15T00:00:00Z",
    user: userFixture(overrides),
  };
}

export function promptFixture(overrides: Partial<PromptView> = {}): PromptView {
  return {
    prompt_id: "p_1",
    task_id: "t_1",
    text: "مرحبا بالعالم",
    dialect: "EG",
    target_recordings: 1,
    active: true,
    ...overrides,
  };
}

export function qaFixture(overrides: Partial<QaReportView> = {}): QaReportView {
  return {
    speech_segments: [[0.5, 2.5]],
    speech_ratio: 0.66,
    clipping_ratio: 0,
    verdict: "pass",
    fail_reasons: [],
    asr_hypothesis: "مرحبا بالعالم",
    confidence: 1.0,
    notes: [],
    ...overrides,
  };
}

export function submissionFixture(overrides: Partial<SubmissionView> = {}): SubmissionView {
  return {
    submission_id: "s_1",
    prompt_id: "p_1",
    user_id: "u_1",
    audio_ref: "a".repeat(64),
    duration_s: 3.0,
    sample_rate_hz: 16_000,
    state: "qa_passed",
    qa: qaFixture(),
    created_at: "2026-08-10T00:00:00Z",
    prompt: { prompt_id: "p_1", text: "مرحبا بالعالم", dialect: "EG" },
    ...overrides,
  };
}

export function fakeStorage(): Pick<Storage, "getItem" | "setItem" | "removeItem"> {
  const store = new Map<string, string>();
  return {
    getItem: (key) => store.get(key) ?? null,
    setItem: (key, value) => void store.set(key, value),
    removeItem: (key) => void store.delete(key),
  };
}
