/**
 * Typed client for the scribeloop review service. All requests go through
 * one fetch wrapper that turns the service's uniform error bodies
 * ({error_code, message, details}) into ApiError instances.
 */

export type Choice = "keep_asr" | "accept_llm" | "manual";

export interface DecisionRecord {
  choice: Choice;
  text: string | null;
  note: string | null;
  decided_at: string;
}

export interface SentenceView {
  index: number;
  asr_text: string;
  suggestion_text: string;
  rationale: string[];
  decision: DecisionRecord | null;
}

export interface SessionSummary {
  session_id: string;
  recording_id: string;
  status: "in_progress" | "finalized";
  sentence_count: number;
  decided_count: number;
  created_at: string;
  updated_at: string;
}

export interface SuggestionRecord {
  sentence_index: number;
  original_text: string;
  corrected_text: string;
  rationale: string[];
  provider_meta: Record<string, unknown>;
}

export interface SessionRecord {
  schema_version: number;
  session_id: string;
  recording_id: string;
  audio_path: string | null;
  sentences: { index: number; text: string }[];
  suggestions: SuggestionRecord[];
  decisions: Record<string, DecisionRecord>;
  status: "in_progress" | "finalized";
  final_text: string | null;
  created_at: string;
  updated_at: string;
}

export interface MetricsRowView {
  recording: string;
  method: string;
  wer: number;
  kmter: number | null;
  s: number;
  d: number;
  i: number;
  n: number;
}

export interface MetricsView {
  recording_id: string;
  rows: MetricsRowView[];
  csv: string;
}

export interface FinalizeResult {
  final_text: string;
  status: string;
}

export interface CreateSessionBody {
  recording_id: string;
  asr_transcript?: string;
  asr_fetch?: { audio_ref: string };
  run_llm?: boolean;
}

export interface DecisionBody {
  choice: Choice;
  text?: string;
  note?: string;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly errorCode: string,
    message: string,
    public readonly details: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function toApiError(response: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`;
  let details: Record<string, unknown> = {};
  try {
    const body = (await response.json()) as {
      error_code?: string;
      message?: string;
      details?: Record<string, unknown>;
    };
    if (body.error_code) code = body.error_code;
    if (body.message) message = body.message;
    if (body.details) details = body.details;
  } catch {
    // non-JSON error body; keep the status-line message
  }
  return new ApiError(response.status, code, message, details);
}

export class ReviewApi {
  constructor(public readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      throw await toApiError(response);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body ?? {}),
    });
  }

  health(): Promise<{ status: string; version: string }> {
    return this.request("/health");
  }

  listSessions(): Promise<{ sessions: SessionSummary[] }> {
    return this.request("/sessions");
  }

  createSession(body: CreateSessionBody): Promise<SessionRecord> {
    return this.post("/sessions", body);
  }

  getSession(sessionId: string): Promise<SessionRecord> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  getSentences(sessionId: string): Promise<{ sentences: SentenceView[] }> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/sentences`);
  }

  postDecision(
    sessionId: string,
    index: number,
    body: DecisionBody,
  ): Promise<SentenceView> {
    return this.post(
      `/sessions/${encodeURIComponent(sessionId)}/sentences/${index}/decision`,
      body,
    );
  }

  finalize(sessionId: string): Promise<FinalizeResult> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/finalize`, {});
  }

  getMetrics(sessionId: string): Promise<MetricsView> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/metrics`);
  }

  audioUrl(recordingId: string): string {
    return `${this.baseUrl}/audio/${encodeURIComponent(recordingId)}`;
  }
}
