import type { ApiErrorBody, OutcomeResponse, Report, SessionSummary, SuggestResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiErrorBody,
  ) {
    super(body.message);
  }
}

export interface ClientOptions {
  baseUrl?: string;
  token?: string;
}

/** Thin typed client for the session service. */
export class SessionApi {
  private readonly base: string;
  private readonly headers: Record<string, string>;

  constructor(opts: ClientOptions = {}) {
    this.base = (opts.baseUrl ?? "").replace(/\/$/, "");
    this.headers = { "content-type": "application/json" };
    if (opts.token) this.headers["x-auth-token"] = opts.token;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.base + path, { headers: this.headers, ...init });
    const body = await res.json().catch(() => ({ code: "bad_json", message: "invalid JSON from server" }));
    if (!res.ok) throw new ApiError(res.status, body as ApiErrorBody);
    return body as T;
  }

  listSessions(): Promise<SessionSummary[]> {
    return this.request("/sessions");
  }

  createSession(strategy: object, transform: object | string | null = null): Promise<SessionSummary> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify({ strategy, transform }),
    });
  }

  suggest(id: string): Promise<SuggestResponse> {
    return this.request(`/sessions/${id}/suggest`, { method: "POST" });
  }

  recordOutcome(id: string, label: -1 | 1): Promise<OutcomeResponse> {
    return this.request(`/sessions/${id}/outcome`, {
      method: "POST",
      body: JSON.stringify({ label }),
    });
  }

  report(id: string, dims: [number, number], grid: number, fixed: number[]): Promise<Report> {
    const params = new URLSearchParams({
      slice_dims: dims.join(","),
      grid: String(grid),
      fixed: fixed.join(","),
    });
    return this.request(`/sessions/${id}/report?${params}`);
  }
}
