/**
 * Thin typed client over the hatescan JSON API.
 *
 * Server-reported failures become ApiError (status + machine code);
 * network-level failures (server unreachable) become OfflineError so the
 * curation view can keep its local queue and offer a retry.
 */

import type {
  Category,
  CommitAck,
  DecisionAck,
  MentionsPage,
  NextSuggestions,
  ReportPayload,
  SessionPayload,
  Verdict,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class OfflineError extends Error {
  constructor(cause: unknown) {
    super(`API unreachable: ${cause}`);
    this.name = "OfflineError";
  }
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = await response.json();
    return new ApiError(body.status ?? response.status, body.code ?? "error",
      body.message ?? response.statusText);
  } catch {
    return new ApiError(response.status, "error", response.statusText);
  }
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.base + path, init);
    } catch (err) {
      throw new OfflineError(err);
    }
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  getReport(): Promise<ReportPayload> {
    return this.request<ReportPayload>("/api/report");
  }

  getMentions(
    targetId: string,
    opts: { category?: Category; offset?: number; limit?: number } = {},
  ): Promise<MentionsPage> {
    const params = new URLSearchParams();
    if (opts.category) params.set("category", opts.category);
    if (opts.offset !== undefined) params.set("offset", String(opts.offset));
    if (opts.limit !== undefined) params.set("limit", String(opts.limit));
    const query = params.toString();
    return this.request<MentionsPage>(
      `/api/targets/${encodeURIComponent(targetId)}/mentions${query ? "?" + query : ""}`,
    );
  }

  openSession(category: string, k?: number): Promise<SessionPayload> {
    return this.post<SessionPayload>("/api/sessions",
      k === undefined ? { category } : { category, k });
  }

  getNext(sessionId: string, n: number): Promise<NextSuggestions> {
    return this.request<NextSuggestions>(
      `/api/sessions/${encodeURIComponent(sessionId)}/next?n=${n}`);
  }

  postDecision(sessionId: string, term: string, verdict: Verdict): Promise<DecisionAck> {
    return this.post<DecisionAck>(
      `/api/sessions/${encodeURIComponent(sessionId)}/decisions`, { term, verdict });
  }

  commitSession(sessionId: string): Promise<CommitAck> {
    return this.post<CommitAck>(
      `/api/sessions/${encodeURIComponent(sessionId)}/commit`);
  }
}
