/** DOM rendering: two panes (pending / history), a blocklist counter, a
 * connection badge and a conflict toast.
 *
 * All text lands via textContent — ticket fields are attacker-influenced
 * (website names!) and must never be interpreted as markup.
 */

import type { State } from "./store.js";
import type { TicketDoc } from "./types.js";

export interface Handlers {
  onDecide(ticketId: string, choice: "allow" | "block"): void;
  onDismissToast(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function formatAge(createdAt: number, nowSeconds: number): string {
  const age = Math.max(0, Math.round(nowSeconds - createdAt));
  if (age < 60) return `${age}s ago`;
  if (age < 3600) return `${Math.floor(age / 60)}m ago`;
  return `${Math.floor(age / 3600)}h ago`;
}

function pendingCard(
  doc: Document,
  ticket: TicketDoc,
  busy: boolean,
  nowSeconds: number,
  handlers: Handlers,
): HTMLElement {
  const card = el(doc, "article", "card pending-card");
  card.dataset.ticketId = ticket.ticket_id;

  const head = el(doc, "header", "card-head");
  head.appendChild(el(doc, "strong", "card-site", ticket.event.website_name));
  head.appendChild(el(doc, "span", "card-object", ticket.event.object_name));
  head.appendChild(
    el(doc, "span", "card-age", formatAge(ticket.created_at, nowSeconds)),
  );
  card.appendChild(head);

  card.appendChild(
    el(
      doc,
      "p",
      "card-apis",
      `Sensitive APIs: ${ticket.sensitive_apis.join(", ") || "(none listed)"}`,
    ),
  );
  card.appendChild(
    el(doc, "p", "card-score", `Classifier score: ${ticket.score.toFixed(2)}`),
  );

  const actions = el(doc, "div", "card-actions");
  for (const choice of ["allow", "block"] as const) {
    const button = el(doc, "button", `btn btn-${choice}`, choice === "allow" ? "Allow" : "Block");
    button.disabled = busy;
    button.addEventListener("click", () => handlers.onDecide(ticket.ticket_id, choice));
    actions.appendChild(button);
  }
  card.appendChild(actions);
  return card;
}

function historyRow(doc: Document, ticket: TicketDoc): HTMLElement {
  const row = el(doc, "article", "card history-row");
  row.dataset.ticketId = ticket.ticket_id;
  row.appendChild(
    el(doc, "span", `badge badge-${ticket.state.toLowerCase()}`, ticket.state),
  );
  row.appendChild(el(doc, "strong", "card-site", ticket.event.website_name));
  row.appendChild(el(doc, "span", "card-object", ticket.event.object_name));
  return row;
}

export interface View {
  render(state: State, nowSeconds?: number): void;
}

/** Build the static skeleton under `root` and return a render function. */
export function mount(root: HTMLElement, handlers: Handlers): View {
  const doc = root.ownerDocument;
  root.textContent = "";

  const header = el(doc, "header", "topbar");
  header.appendChild(el(doc, "h1", "title", "Bridge alert console"));
  const connection = el(doc, "span", "connection", "connecting");
  header.appendChild(connection);
  const blocklist = el(doc, "span", "blocklist-count", "Blocklist: 0");
  header.appendChild(blocklist);
  root.appendChild(header);

  const toast = el(doc, "div", "toast hidden");
  const toastText = el(doc, "span", "toast-text");
  toast.appendChild(toastText);
  const dismiss = el(doc, "button", "toast-dismiss", "Dismiss");
  dismiss.addEventListener("click", () => handlers.onDismissToast());
  toast.appendChild(dismiss);
  root.appendChild(toast);

  const panes = el(doc, "main", "panes");
  const pendingPane = el(doc, "section", "pane pane-pending");
  pendingPane.appendChild(el(doc, "h2", undefined, "Pending"));
  const pendingList = el(doc, "div", "pending-list");
  pendingPane.appendChild(pendingList);
  const historyPane = el(doc, "section", "pane pane-history");
  historyPane.appendChild(el(doc, "h2", undefined, "History"));
  const historyList = el(doc, "div", "history-list");
  historyPane.appendChild(historyList);
  panes.appendChild(pendingPane);
  panes.appendChild(historyPane);
  root.appendChild(panes);

  return {
    render(state: State, nowSeconds: number = Date.now() / 1000): void {
      connection.textContent = state.connection;
      connection.className = `connection connection-${state.connection}`;
      blocklist.textContent = `Blocklist: ${state.blocklistSize}`;

      toast.className = state.toast === null ? "toast hidden" : "toast";
      toastText.textContent = state.toast ?? "";

      pendingList.textContent = "";
      if (state.pending.length === 0) {
        pendingList.appendChild(
          el(doc, "p", "empty-state", "No pending alerts."),
        );
      } else {
        for (const ticket of state.pending) {
          pendingList.appendChild(
            pendingCard(
              doc,
              ticket,
              state.inFlight.includes(ticket.ticket_id),
              nowSeconds,
              handlers,
            ),
          );
        }
      }

      historyList.textContent = "";
      if (state.history.length === 0) {
        historyList.appendChild(el(doc, "p", "empty-state", "Nothing decided yet."));
      } else {
        for (const ticket of state.history) {
          historyList.appendChild(historyRow(doc, ticket));
        }
      }
    },
  };
}
