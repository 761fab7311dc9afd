/** Thin fetch client for the debug service; the only network surface. */

import type { SelectionListing, SessionState, WireError } from "./types.js";

export class ServiceRequestError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly httpStatus: number,
  ) {
    super(message);
    this.name = "ServiceRequestError";
  }
}

export type FetchLike = (
  url: string,
  init: { method: string; headers: Record<string, string>; body: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ApiClient {
  /** Every request made, for end-to-end verification that the UI only
   *  talks through documented endpoints. */
  readonly log: { endpoint: string; payload: Record<string, unknown> }[] = [];

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async post<T>(endpoint: string, payload: Record<string, unknown>): Promise<T> {
    this.log.push({ endpoint, payload });
    const response = await this.fetchImpl(`${this.baseUrl}${endpoint}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    const body = (await response.json()) as T | WireError;
    if (typeof body === "object" && body !== null && "error" in body) {
      const err = (body as WireError).error;
      throw new ServiceRequestError(err.code, err.message, response.status);
    }
    if (response.status >= 400) {
      throw new ServiceRequestError("HTTP_ERROR", `status ${response.status}`, response.status);
    }
    return body as T;
  }

  createSession(sentence: string, grammar: string): Promise<SessionState> {
    return this.post("/create-session", { sentence, grammar });
  }

  listSelections(session: string, offset = 0, cap = 50): Promise<SelectionListing> {
    return this.post("/list-selections", { session, offset, cap });
  }

  chooseSelection(session: string, index: number): Promise<SessionState> {
    return this.post("/choose-selection", { session, index });
  }

  candidates(session: string): Promise<{ session: string; candidates: SessionState["candidates"] }> {
    return this.post("/candidates", { session });
  }

  merge(session: string, a: string, b: string): Promise<SessionState> {
    return this.post("/merge", { session, a, b });
  }

  undo(session: string): Promise<SessionState> {
    return this.post("/undo", { session });
  }

  state(session: string): Promise<SessionState> {
    return this.post("/state", { session });
  }

  deleteSession(session: string): Promise<{ deleted: string }> {
    return this.post("/delete-session", { session });
  }
}
