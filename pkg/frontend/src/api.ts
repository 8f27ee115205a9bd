// Thin HTTP client for the engine. Domain failures come back as
// `{ok: false, error}` bodies rather than thrown exceptions, so screens
// can show the engine's verdict verbatim.

import type {
  ActionResponse,
  DegreeSymbol,
  EventRecord,
  LevelRecord,
  SessionSnapshot,
} from './types.js';

export class EngineClient {
  constructor(readonly baseUrl: string) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`);
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    return (await response.json()) as T;
  }

  async levels(): Promise<LevelRecord[]> {
    const body = await this.getJson<{ ok: boolean; levels: LevelRecord[] }>('/levels');
    return body.levels;
  }

  async symbols(): Promise<DegreeSymbol[]> {
    const body = await this.getJson<{ ok: boolean; symbols: DegreeSymbol[] }>('/symbols');
    return body.symbols;
  }

  async createSession(now?: number): Promise<SessionSnapshot> {
    const body = await this.postJson<{ ok: boolean; session: SessionSnapshot }>(
      '/sessions',
      now === undefined ? {} : { now },
    );
    return body.session;
  }

  async snapshot(sessionId: string): Promise<SessionSnapshot> {
    const body = await this.getJson<{ ok: boolean; session: SessionSnapshot }>(
      `/sessions/${sessionId}`,
    );
    return body.session;
  }

  async act(sessionId: string, action: Record<string, unknown>): Promise<ActionResponse> {
    return this.postJson<ActionResponse>(`/sessions/${sessionId}/actions`, action);
  }

  async eventsSince(sessionId: string, after: number): Promise<EventRecord[]> {
    const body = await this.getJson<{ ok: boolean; events: EventRecord[] }>(
      `/sessions/${sessionId}/events.json?after=${after}`,
    );
    return body.events;
  }

  renderUrl(): string {
    return `${this.baseUrl}/render`;
  }

  /**
   * Live event feed. Uses EventSource in the browser; elsewhere (tests,
   * node) falls back to polling the incremental JSON endpoint.
   * Returns a function that stops the subscription.
   */
  subscribeEvents(
    sessionId: string,
    onEvent: (event: EventRecord) => void,
    after = -1,
  ): () => void {
    if (typeof EventSource !== 'undefined') {
      const source = new EventSource(
        `${this.baseUrl}/sessions/${sessionId}/events?after=${after}&wait=3600`,
      );
      const handler = (message: MessageEvent) => {
        onEvent(JSON.parse(message.data as string) as EventRecord);
      };
      // Named SSE events carry the record type; a catch-all keeps us honest.
      source.onmessage = handler;
      for (const type of [
        'session_started', 'level_started', 'step_advanced', 'snap', 'attached',
        'attach_failed', 'seed_placed', 'detached', 'puzzle_placed', 'puzzle_cleared',
        'reconstruction_rejected', 'level_completed', 'creation_entered',
        'block_assembled', 'composition_finalized', 'playback', 'hint',
      ]) {
        source.addEventListener(type, handler as EventListener);
      }
      return () => source.close();
    }
    let cursor = after;
    let stopped = false;
    const poll = async () => {
      while (!stopped) {
        const events = await this.eventsSince(sessionId, cursor);
        for (const event of events) {
          cursor = Math.max(cursor, event.seq);
          onEvent(event);
        }
        await new Promise((resolve) => setTimeout(resolve, 200));
      }
    };
    void poll();
    return () => {
      stopped = true;
    };
  }
}
