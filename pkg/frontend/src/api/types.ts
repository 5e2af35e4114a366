// Wire shapes of the speechcrowd HTTP API. Field names mirror the server's
// JSON exactly; optional fields appear only in the responses noted.

export type Role = "contributor" | "annotator" | "admin";

export type SubmissionState =
  | "recorded"
  | "qa_passed"
  | "qa_failed"
  | "pending_validation"
  | "accepted"
  | "rejected"
  | "deleted";

export const SUBMISSION_STATES: SubmissionState[] = [
  "recorded",
  "qa_passed",
  "qa_failed",
  "pending_validation",
  "accepted",
  "rejected",
  "deleted",
];

export type FailReason =
  | "too_long"
  | "too_little_speech"
  | "mostly_silence"
  | "clipped"
  | "low_confidence";

export interface UserPrivate {
  user_id: string;
  handle: string;
  email: string;
  roles: Role[];
  blocked: boolean;
  created_at: string;
}

export interface SessionGrant {
  token: string;
  expires_at: string;
  user: UserPrivate;
}

export interface TaskView {
  task_id: string;
  title: string;
  kind: string;
  dialects: string[];
  status: string;
  created_at: string;
}

export interface PromptView {
  prompt_id: string;
  task_id: string;
  text: string;
  dialect: string;
  target_recordings: number;
  active: boolean;
}

export interface QaReportView {
  speech_segments: [number, number][];
  speech_ratio: number;
  clipping_ratio: number;
  verdict: "pass" | "fail";
  fail_reasons: FailReason[];
  asr_hypothesis: string | null;
  confidence: number | null;
  notes: string[];
}

export interface PromptSummary {
  prompt_id: string;
  text: string;
  dialect: string;
}

export interface SubmissionView {
  submission_id: string;
  prompt_id: string;
  user_id: string;
  audio_ref: string;
  duration_s: number;
  sample_rate_hz: number;
  state: SubmissionState;
  qa: QaReportView | null;
  created_at: string;
  prompt?: PromptSummary;
  flagged_for_admin?: boolean;
}

export type ReviewVerdict = "approve" | "reject" | "flag";

export interface ReviewResponse {
  review_id: string;
  submission_id: string;
  reviewer_id: string;
  verdict: ReviewVerdict;
  annotation: string | null;
  feedback: string | null;
  created_at: string;
  submission: SubmissionView;
}

export interface DialectStats {
  submissions: number;
  accepted: number;
  hours_accepted: number;
}

export interface UserStats {
  submissions: number;
  accepted: number;
  rejected: number;
}

export interface StatsResponse {
  range: { from: string; to: string };
  totals: Record<SubmissionState, number>;
  per_dialect: Record<string, DialectStats>;
  acceptance_rate: number | null;
  mine: UserStats;
  per_user?: Record<string, UserStats>;
}

export interface PromptUploadResponse {
  inserted: number;
  prompts: PromptView[];
}

export interface AdminSubmissionsPage {
  items: SubmissionView[];
  next_cursor: string | null;
}

export interface UserDetailResponse {
  user: UserPrivate;
  submissions_by_state: Record<SubmissionState, number>;
  total_submissions: number;
}

export interface BlockResponse {
  ok: boolean;
  deleted_submissions: number;
}

export interface ErrorEnvelope {
  error: { code: string; message: string };
}
