/** Console state as a pure reducer over gateway facts.
 *
 * Every field shown in the UI originates from gateway JSON: snapshots and
 * ticket lifecycle frames from the stream, plus decision responses.  The
 * reducer is idempotent where the transport can race (a decision response
 * and the matching ticket_resolved frame may arrive in either order).
 */

import type { StreamStatus } from "./api.js";
import type { SnapshotPayload, TicketDoc, TicketResolvedPayload } from "./types.js";

export interface State {
  connection: StreamStatus;
  pending: TicketDoc[]; // newest first
  history: TicketDoc[]; // newest resolution first
  blocklistSize: number;
  /** ticket ids with a decision POST outstanding (button guard) */
  inFlight: string[];
  toast: string | null;
}

export type Action =
  | { type: "stream_status"; status: StreamStatus }
  | { type: "snapshot"; payload: SnapshotPayload }
  | { type: "ticket_created"; ticket: TicketDoc }
  | { type: "ticket_resolved"; payload: TicketResolvedPayload }
  | { type: "decision_started"; ticketId: string }
  | { type: "decision_failed"; ticketId: string; message: string }
  | { type: "toast"; message: string }
  | { type: "toast_cleared" };

export function initialState(): State {
  return {
    connection: "connecting",
    pending: [],
    history: [],
    blocklistSize: 0,
    inFlight: [],
    toast: null,
  };
}

function newestFirst(tickets: TicketDoc[]): TicketDoc[] {
  return [...tickets].sort((a, b) => b.created_at - a.created_at);
}

function without(ids: string[], id: string): string[] {
  return ids.filter((x) => x !== id);
}

export function reduce(state: State, action: Action): State {
  switch (action.type) {
    case "stream_status":
      return { ...state, connection: action.status };

    case "snapshot": {
      // stream truth replaces the pending pane; history is local memory
      const pendingIds = new Set(action.payload.pending.map((t) => t.ticket_id));
      return {
        ...state,
        pending: newestFirst(action.payload.pending),
        blocklistSize: action.payload.blocklist_size,
        inFlight: state.inFlight.filter((id) => pendingIds.has(id)),
      };
    }

    case "ticket_created": {
      if (state.pending.some((t) => t.ticket_id === action.ticket.ticket_id)) {
        return state;
      }
      return {
        ...state,
        pending: newestFirst([action.ticket, ...state.pending]),
      };
    }

    case "ticket_resolved": {
      const { ticket, blocklist_size } = action.payload;
      const pending = state.pending.filter((t) => t.ticket_id !== ticket.ticket_id);
      const history = state.history.some((t) => t.ticket_id === ticket.ticket_id)
        ? state.history.map((t) => (t.ticket_id === ticket.ticket_id ? ticket : t))
        : [ticket, ...state.history];
      return {
        ...state,
        pending,
        history,
        blocklistSize: blocklist_size,
        inFlight: without(state.inFlight, ticket.ticket_id),
      };
    }

    case "decision_started": {
      if (state.inFlight.includes(action.ticketId)) return state;
      return { ...state, inFlight: [...state.inFlight, action.ticketId] };
    }

    case "decision_failed":
      return {
        ...state,
        inFlight: without(state.inFlight, action.ticketId),
        toast: action.message,
      };

    case "toast":
      return { ...state, toast: action.message };

    case "toast_cleared":
      return { ...state, toast: null };
  }
}

export type Listener = (state: State) => void;

/** Minimal observable wrapper so the UI re-renders on every change. */
export class Store {
  private state: State = initialState();
  private listeners: Listener[] = [];

  getState(): State {
    return this.state;
  }

  dispatch(action: Action): void {
    const next = reduce(this.state, action);
    if (next === this.state) return;
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}
