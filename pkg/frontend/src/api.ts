/** HTTP + server-sent-events client for the alert gateway.
 *
 * The stream reader is built on fetch rather than EventSource so the exact
 * same code path runs in the browser and under Node-based tests.
 */

import type {
  BlocklistResponse,
  DecisionResponse,
  EventDoc,
  StreamFrame,
  TicketDoc,
} from "./types.js";

export class GatewayError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
    this.name = "GatewayError";
  }
}

/** 409: somebody else resolved the ticket first. */
export class ConflictError extends GatewayError {
  constructor(message: string) {
    super(message, 409);
    this.name = "ConflictError";
  }
}

/** Incremental text/event-stream parser; frames may arrive split anywhere. */
export class SseParser {
  private buffer = "";

  push(chunk: string): StreamFrame[] {
    this.buffer += chunk.replace(/\r\n/g, "\n");
    const frames: StreamFrame[] = [];
    let end;
    while ((end = this.buffer.indexOf("\n\n")) !== -1) {
      const raw = this.buffer.slice(0, end);
      this.buffer = this.buffer.slice(end + 2);
      let kind = "message";
      const data: string[] = [];
      for (const line of raw.split("\n")) {
        if (line.startsWith(":")) continue; // comment / keepalive
        const colon = line.indexOf(":");
        const field = colon === -1 ? line : line.slice(0, colon);
        let value = colon === -1 ? "" : line.slice(colon + 1);
        if (value.startsWith(" ")) value = value.slice(1);
        if (field === "event") kind = value;
        else if (field === "data") data.push(value);
      }
      if (data.length > 0) frames.push({ kind, data: data.join("\n") });
    }
    return frames;
  }
}

export type StreamStatus = "connecting" | "open" | "lost" | "closed";

export interface Subscription {
  close(): void;
}

function abortableDelay(ms: number, signal: AbortSignal): Promise<void> {
  return new Promise((resolve) => {
    if (signal.aborted) return resolve();
    const timer = setTimeout(done, ms);
    signal.addEventListener("abort", done, { once: true });
    function done() {
      clearTimeout(timer);
      signal.removeEventListener("abort", done);
      resolve();
    }
  });
}

export class GatewayClient {
  readonly baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private url(path: string): string {
    return this.baseUrl + path;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.url(path), init);
    if (!res.ok) {
      let detail = `${res.status} ${res.statusText}`;
      try {
        const body: unknown = await res.json();
        if (
          typeof body === "object" &&
          body !== null &&
          typeof (body as { detail?: unknown }).detail === "string"
        ) {
          detail = (body as { detail: string }).detail;
        }
      } catch {
        // non-JSON error body: keep the status line
      }
      if (res.status === 409) throw new ConflictError(detail);
      throw new GatewayError(detail, res.status);
    }
    return (await res.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("/healthz");
  }

  pendingAlerts(): Promise<TicketDoc[]> {
    return this.request("/alerts/pending");
  }

  getAlert(ticketId: string): Promise<TicketDoc> {
    return this.request(`/alerts/${encodeURIComponent(ticketId)}`);
  }

  decide(ticketId: string, choice: "allow" | "block"): Promise<DecisionResponse> {
    return this.request(`/alerts/${encodeURIComponent(ticketId)}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ decision: choice }),
    });
  }

  injectEvent(event: EventDoc): Promise<{ accepted: boolean; event_id: string }> {
    return this.request("/simulate/event", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(event),
    });
  }

  blocklist(): Promise<BlocklistResponse> {
    return this.request("/blocklist");
  }

  /** Follow /events/stream, reconnecting with a fixed backoff until closed. */
  subscribe(
    onFrame: (frame: StreamFrame) => void,
    onStatus: (status: StreamStatus) => void = () => undefined,
    retryMs = 2000,
  ): Subscription {
    const abort = new AbortController();
    let closed = false;

    const loop = async (): Promise<void> => {
      while (!closed) {
        onStatus("connecting");
        try {
          const res = await fetch(this.url("/events/stream"), {
            headers: { Accept: "text/event-stream" },
            signal: abort.signal,
          });
          if (!res.ok || res.body === null) {
            throw new GatewayError(`stream returned ${res.status}`, res.status);
          }
          onStatus("open");
          const reader = res.body.getReader();
          const decoder = new TextDecoder();
          const parser = new SseParser();
          for (;;) {
            const { value, done } = await reader.read();
            if (done) break;
            for (const frame of parser.push(decoder.decode(value, { stream: true }))) {
              onFrame(frame);
            }
          }
        } catch {
          // fall through to the retry delay (or exit, if we were closed)
        }
        if (closed) break;
        onStatus("lost");
        await abortableDelay(retryMs, abort.signal);
      }
      onStatus("closed");
    };

    void loop();
    return {
      close() {
        closed = true;
        abort.abort();
      },
    };
  }
}
