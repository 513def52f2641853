/** Glue between the gateway client and the store.
 *
 * The round-trip test drives this class headlessly; the page drives it from
 * button clicks.  Either way the state transitions are identical.
 */

import { ConflictError, GatewayClient, Subscription } from "./api.js";
import { Store } from "./store.js";
import type {
  SnapshotPayload,
  StreamFrame,
  TicketCreatedPayload,
  TicketResolvedPayload,
} from "./types.js";

export class Console {
  constructor(
    private readonly client: GatewayClient,
    readonly store: Store,
  ) {}

  /** Open the event stream; keep the store in sync until closed. */
  start(): Subscription {
    return this.client.subscribe(
      (frame) => this.handleFrame(frame),
      (status) => this.store.dispatch({ type: "stream_status", status }),
    );
  }

  handleFrame(frame: StreamFrame): void {
    let payload: unknown;
    try {
      payload = JSON.parse(frame.data);
    } catch {
      return; // not ours to interpret
    }
    switch (frame.kind) {
      case "snapshot":
        this.store.dispatch({
          type: "snapshot",
          payload: payload as SnapshotPayload,
        });
        break;
      case "ticket_created":
        this.store.dispatch({
          type: "ticket_created",
          ticket: (payload as TicketCreatedPayload).ticket,
        });
        break;
      case "ticket_resolved":
        this.store.dispatch({
          type: "ticket_resolved",
          payload: payload as TicketResolvedPayload,
        });
        break;
      default:
        break; // unknown frame kinds are ignored, never invented into state
    }
  }

  /** Submit allow/block for a pending ticket.  Double submissions and
   * decisions on cards that already left the pending pane are no-ops. */
  async decide(ticketId: string, choice: "allow" | "block"): Promise<void> {
    const state = this.store.getState();
    if (state.inFlight.includes(ticketId)) return;
    if (!state.pending.some((t) => t.ticket_id === ticketId)) return;
    this.store.dispatch({ type: "decision_started", ticketId });
    try {
      const res = await this.client.decide(ticketId, choice);
      // the stream frame usually lands first; fetching the resolved doc makes
      // the card move even if that frame is still in flight (idempotent)
      const doc = await this.client.getAlert(ticketId);
      this.store.dispatch({
        type: "ticket_resolved",
        payload: { ticket: doc, blocklist_size: res.blocklist_size },
      });
    } catch (err) {
      if (err instanceof ConflictError) {
        await this.reconcile(ticketId);
        this.store.dispatch({
          type: "decision_failed",
          ticketId,
          message: `Ticket ${ticketId} was already resolved elsewhere.`,
        });
      } else {
        this.store.dispatch({
          type: "decision_failed",
          ticketId,
          message: err instanceof Error ? err.message : String(err),
        });
      }
    }
  }

  /** After a conflict, pull the ticket's actual state so the card shows
   * the truth instead of the rejected wish. */
  private async reconcile(ticketId: string): Promise<void> {
    try {
      const doc = await this.client.getAlert(ticketId);
      const blocklist = await this.client.blocklist();
      if (doc.state !== "Pending") {
        this.store.dispatch({
          type: "ticket_resolved",
          payload: { ticket: doc, blocklist_size: blocklist.count },
        });
      }
    } catch {
      // stream truth will still arrive; nothing to corrupt locally
    }
  }
}
