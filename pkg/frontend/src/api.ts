/** Typed client for the annotation service HTTP+JSON API.
 *
 * The UI adds no semantics on top of these calls: every mutation the
 * page performs maps 1:1 onto one endpoint, so a session driven
 * through the UI is indistinguishable from raw API traffic.
 */

export type ClassName = "expert" | "non_expert" | "out_of_scope";

export const CLASS_NAMES: ClassName[] = ["expert", "non_expert", "out_of_scope"];

export interface Criterion {
  id: string;
  text: string;
}

export interface CriteriaCatalog {
  version: number;
  expert_minimum: number;
  expert: Criterion[];
  non_expert: Criterion[];
  out_of_scope: Criterion[];
}

export interface SessionSnapshot {
  id: string;
  state: string;
  coder_a: string;
  coder_b: string;
  sample_size: number;
  warmup_size: number;
  n_rounds: number;
  current_round: {
    index: number;
    n_items: number;
    n_labelled: number;
    closed: boolean;
  };
  pending_adjudications: string[];
}

export interface NextItem {
  comment_id: string | null;
  state: string;
  round_index: number;
  remaining_in_round?: number;
  body?: string | null;
  post_title?: string | null;
}

export interface RoundCloseResult {
  round_index: number;
  kappa: number | null;
  gate_passed: boolean;
  state: string;
}

export interface AgreementRound {
  index: number;
  n_items: number;
  kappa: number | null;
  closed: boolean;
  duration_s: number | null;
}

export interface AgreementReport {
  state: string;
  gate_threshold: number;
  gate_passed: boolean;
  rounds: AgreementRound[];
  overlap_agreement: number | null;
  pending_adjudications: string[];
}

export interface LabelSubmission {
  coder: string;
  comment_id: string;
  classes: ClassName[];
  criteria: string[];
}

/** Structured service rejection ({"error": {code, message}}). */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface AnnotateClient {
  criteria(): Promise<CriteriaCatalog>;
  session(id: string): Promise<SessionSnapshot>;
  next(id: string, coder: string): Promise<NextItem>;
  submitLabel(id: string, body: LabelSubmission): Promise<{ recorded: ClassName }>;
  closeRound(id: string): Promise<RoundCloseResult>;
  agreement(id: string): Promise<AgreementReport>;
  adjudicate(
    id: string,
    body: { comment_id: string; final_class: ClassName; note?: string },
  ): Promise<{ consensus: ClassName; state: string }>;
  exportLabels(id: string): Promise<string>;
}

export class AnnotateApi implements AnnotateClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    if (!response.ok) {
      let code = "http_error";
      let message = text || response.statusText;
      try {
        const payload = JSON.parse(text);
        if (payload?.error) {
          code = payload.error.code ?? code;
          message = payload.error.message ?? message;
        } else if (payload?.detail) {
          message = JSON.stringify(payload.detail);
        }
      } catch {
        // non-json error body; keep raw text
      }
      throw new ApiError(response.status, code, message);
    }
    return JSON.parse(text) as T;
  }

  criteria(): Promise<CriteriaCatalog> {
    return this.request("GET", "/criteria");
  }

  createSession(body: {
    sample_ids: string[];
    coder_a: string;
    coder_b: string;
    warmup_size?: number;
  }): Promise<SessionSnapshot> {
    return this.request("POST", "/sessions", body);
  }

  session(id: string): Promise<SessionSnapshot> {
    return this.request("GET", `/sessions/${id}`);
  }

  next(id: string, coder: string): Promise<NextItem> {
    return this.request("GET", `/sessions/${id}/next?coder=${encodeURIComponent(coder)}`);
  }

  submitLabel(id: string, body: LabelSubmission): Promise<{ recorded: ClassName }> {
    return this.request("POST", `/sessions/${id}/labels`, body);
  }

  closeRound(id: string): Promise<RoundCloseResult> {
    return this.request("POST", `/sessions/${id}/rounds/close`);
  }

  agreement(id: string): Promise<AgreementReport> {
    return this.request("GET", `/sessions/${id}/agreement`);
  }

  adjudicate(
    id: string,
    body: { comment_id: string; final_class: ClassName; note?: string },
  ): Promise<{ consensus: ClassName; state: string }> {
    return this.request("POST", `/sessions/${id}/adjudications`, {
      note: "",
      ...body,
    });
  }

  async exportLabels(id: string): Promise<string> {
    const response = await this.fetchFn(`${this.baseUrl}/sessions/${id}/export`);
    const text = await response.text();
    if (!response.ok) {
      throw new ApiError(response.status, "export_failed", text);
    }
    return text;
  }
}
