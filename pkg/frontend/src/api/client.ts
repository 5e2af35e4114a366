// Thin typed wrapper over fetch. The client never decides authorization
// itself: every call is attempted and rendered from the server's answer.

import type {
  AdminSubmissionsPage,
  BlockResponse,
  ErrorEnvelope,
  PromptUploadResponse,
  PromptView,
  ReviewResponse,
  ReviewVerdict,
  SessionGrant,
  StatsResponse,
  SubmissionState,
  SubmissionView,
  TaskView,
  UserDetailResponse,
  UserPrivate,
} from "./types";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
  }
}

type FetchLike = typeof fetch;

export interface ApiClientOptions {
  baseUrl?: string;
  getToken?: () => string | null;
  onAuthLost?: () => void;
  fetchFn?: FetchLike;
}

interface RequestOptions {
  query?: Record<string, string | number | undefined>;
  json?: unknown;
  body?: BodyInit;
  contentType?: string;
  accept?: "json" | "blob";
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly getToken: () => string | null;
  private readonly onAuthLost: () => void;
  private readonly fetchFn: FetchLike;

  constructor(options: ApiClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.getToken = options.getToken ?? (() => null);
    this.onAuthLost = options.onAuthLost ?? (() => {});
    this.fetchFn = options.fetchFn ?? ((...args) => fetch(...args));
  }

  private url(path: string, query?: RequestOptions["query"]): string {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(query ?? {})) {
      if (value !== undefined) params.set(key, String(value));
    }
    const qs = params.toString();
    return this.baseUrl + path + (qs ? `?${qs}` : "");
  }

  private async request(
    method: string,
    path: string,
    options: RequestOptions = {},
  ): Promise<Response> {
    const headers: Record<string, string> = {};
    const token = this.getToken();
    if (token) headers["authorization"] = `Bearer ${token}`;
    let body = options.body;
    if (options.json !== undefined) {
      headers["content-type"] = "application/json";
      body = JSON.stringify(options.json);
    } else if (options.contentType) {
      headers["content-type"] = options.contentType;
    }
    const response = await this.fetchFn(this.url(path, options.query), {
      method,
      headers,
      body,
    });
    if (!response.ok) {
      let code = "internal_error";
      let message = `HTTP ${response.status}`;
      try {
        const envelope = (await response.json()) as ErrorEnvelope;
        code = envelope.error.code;
        message = envelope.error.message;
      } catch {
        // non-JSON error body: keep the fallback code
      }
      if (response.status === 401) this.onAuthLost();
      throw new ApiError(response.status, code, message);
    }
    return response;
  }

  private async json<T>(method: string, path: string, options: RequestOptions = {}): Promise<T> {
    const response = await this.request(method, path, options);
    return (await response.json()) as T;
  }

  // accounts

  register(handle: string, email: string, password: string): Promise<SessionGrant> {
    return this.json("POST", "/auth/register", { json: { handle, email, password } });
  }

  login(email: string, password: string): Promise<SessionGrant> {
    return this.json("POST", "/auth/login", { json: { email, password } });
  }

  logout(): Promise<{ ok: boolean }> {
    return this.json("POST", "/auth/logout");
  }

  me(): Promise<UserPrivate> {
    return this.json("GET", "/me");
  }

  activateAnnotator(): Promise<UserPrivate> {
    return this.json("POST", "/me/roles/annotator");
  }

  // recording

  listTasks(): Promise<{ tasks: TaskView[] }> {
    return this.json("GET", "/tasks");
  }

  /** Next prompt for the dialect, or null when the pool is exhausted (204). */
  async nextPrompt(taskId: string, dialect: string): Promise<PromptView | null> {
    const response = await this.request("GET", `/tasks/${taskId}/next-prompt`, {
      query: { dialect },
    });
    if (response.status === 204) return null;
    return (await response.json()) as PromptView;
  }

  uploadTake(promptId: string, wav: Blob): Promise<SubmissionView> {
    const form = new FormData();
    form.set("prompt_id", promptId);
    form.set("audio", wav, "take.wav");
    return this.json("POST", "/submissions", { body: form });
  }

  myRecordings(state?: SubmissionState): Promise<{ recordings: SubmissionView[] }> {
    return this.json("GET", "/me/recordings", { query: { state } });
  }

  selfReview(submissionId: string, decision: "submit" | "redo"): Promise<SubmissionView> {
    return this.json("POST", `/submissions/${submissionId}/self-review`, {
      json: { decision },
    });
  }

  async fetchAudio(audioRef: string): Promise<Blob> {
    const response = await this.request("GET", `/audio/${audioRef}`);
    return await response.blob();
  }

  // validation

  validationQueue(dialect?: string, limit?: number): Promise<{ queue: SubmissionView[] }> {
    return this.json("GET", "/validation/queue", { query: { dialect, limit } });
  }

  postReview(
    submissionId: string,
    verdict: ReviewVerdict,
    fields: { annotation?: string; feedback?: string } = {},
  ): Promise<ReviewResponse> {
    return this.json("POST", `/submissions/${submissionId}/reviews`, {
      json: { verdict, ...fields },
    });
  }

  // stats

  stats(range: { from?: string; to?: string } = {}): Promise<StatsResponse> {
    return this.json("GET", "/stats", { query: range });
  }

  // admin

  createTask(title: string, dialects: string[], kind = "speech_recording"): Promise<TaskView> {
    return this.json("POST", "/admin/tasks", { json: { title, kind, dialects } });
  }

  uploadPrompts(taskId: string, tsv: string): Promise<PromptUploadResponse> {
    return this.json("POST", `/admin/tasks/${taskId}/prompts`, {
      body: tsv,
      contentType: "text/tab-separated-values; charset=utf-8",
    });
  }

  adminSubmissions(params: {
    from: string;
    to: string;
    task?: string;
    state?: SubmissionState;
    min_confidence?: number;
    max_confidence?: number;
    cursor?: string;
  }): Promise<AdminSubmissionsPage> {
    return this.json("GET", "/admin/submissions", { query: params });
  }

  deleteSubmission(submissionId: string): Promise<{ ok: boolean; submission: SubmissionView }> {
    return this.json("DELETE", `/admin/submissions/${submissionId}`);
  }

  listUsers(): Promise<{ users: UserPrivate[] }> {
    return this.json("GET", "/admin/users");
  }

  userDetail(userId: string): Promise<UserDetailResponse> {
    return this.json("GET", `/admin/users/${userId}`);
  }

  blockUser(userId: string, deleteSubmissions: boolean): Promise<BlockResponse> {
    return this.json("POST", `/admin/users/${userId}/block`, {
      json: { delete_submissions: deleteSubmissions },
    });
  }

  grantAdmin(userId: string): Promise<{ ok: boolean; user: UserPrivate }> {
    return this.json("POST", `/admin/users/${userId}/grant-admin`);
  }

  healthz(): Promise<{ ok: boolean; version: string }> {
    return this.json("GET", "/healthz");
  }
}
