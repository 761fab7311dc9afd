/** Session controller: wires user actions to service endpoints.
 *
 * Optimistic updates are deliberately disabled — every action
 * round-trips and the view is rebuilt from the response, so the UI can
 * never drift from the service.  Service errors become toasts and leave
 * the last good view untouched.
 */

import { ApiClient, ServiceRequestError } from "./client.js";
import { emptyView, render, type ViewModel } from "./render.js";
import type { SelectionListing, SessionState } from "./types.js";

export class SessionController {
  private lastState: SessionState | null = null;
  private toasts: string[] = [];
  view: ViewModel = emptyView();

  constructor(
    private readonly client: ApiClient,
    private readonly onChange: (view: ViewModel) => void = () => {},
  ) {}

  get sessionId(): string | null {
    return this.lastState?.session ?? null;
  }

  private rebuild(): void {
    this.view = this.lastState === null ? { ...emptyView(), toasts: this.toasts } : render(this.lastState, this.toasts);
    this.onChange(this.view);
  }

  private async act(action: () => Promise<SessionState>): Promise<void> {
    this.toasts = [];
    try {
      this.lastState = await action();
    } catch (error) {
      if (error instanceof ServiceRequestError) {
        this.toasts = [`${error.code}: ${error.message}`];
      } else {
        this.toasts = [String(error)];
      }
    }
    this.rebuild();
  }

  start(sentence: string, grammar: string): Promise<void> {
    return this.act(() => this.client.createSession(sentence, grammar));
  }

  async selections(offset = 0, cap = 50): Promise<SelectionListing | null> {
    if (this.sessionId === null) return null;
    try {
      return await this.client.listSelections(this.sessionId, offset, cap);
    } catch (error) {
      this.toasts = error instanceof ServiceRequestError ? [`${error.code}: ${error.message}`] : [String(error)];
      this.rebuild();
      return null;
    }
  }

  choose(index: number): Promise<void> {
    return this.act(() => this.client.chooseSelection(this.sessionId ?? "", index));
  }

  merge(a: string, b: string): Promise<void> {
    return this.act(() => this.client.merge(this.sessionId ?? "", a, b));
  }

  undo(): Promise<void> {
    return this.act(() => this.client.undo(this.sessionId ?? ""));
  }

  refresh(): Promise<void> {
    return this.act(() => this.client.state(this.sessionId ?? ""));
  }

  async close(): Promise<void> {
    if (this.sessionId !== null) {
      try {
        await this.client.deleteSession(this.sessionId);
      } catch {
        // the session may already have expired; closing is best-effort
      }
      this.lastState = null;
      this.rebuild();
    }
  }
}
