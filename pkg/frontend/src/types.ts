/** JSON documents exactly as the gateway serves them. */

export interface EventDoc {
  event_id: string;
  app_name: string;
  object_name: string;
  website_name: string;
  ip: string | null;
  location: string | null;
  permissions: string;
  requested_apis: string[];
  timestamp: number;
}

export type TicketState = "Pending" | "Allowed" | "Blocked" | "Expired";

export interface TicketDoc {
  ticket_id: string;
  event: EventDoc;
  sensitive_apis: string[];
  classifier_verdict: string;
  score: number;
  state: TicketState;
  created_at: number;
  resolved_at: number | null;
}

export interface SnapshotPayload {
  pending: TicketDoc[];
  blocklist_size: number;
}

export interface TicketCreatedPayload {
  ticket: TicketDoc;
}

export interface TicketResolvedPayload {
  ticket: TicketDoc;
  blocklist_size: number;
}

export interface DecisionResponse {
  ticket_id: string;
  state: TicketState;
  blocklist_size: number;
}

export interface BlocklistEntry {
  timestamp: number;
  website_name: string;
  object_name: string;
}

export interface BlocklistResponse {
  count: number;
  entries: BlocklistEntry[];
}

/** One parsed frame off the event stream. */
export interface StreamFrame {
  kind: string;
  data: string;
}
