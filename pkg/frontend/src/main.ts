/** Page entry point: read the gateway base URL, wire store + stream + DOM. */

import { GatewayClient } from "./api.js";
import { Console } from "./controller.js";
import { Store } from "./store.js";
import { mount } from "./ui.js";

function gatewayBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("gateway");
  if (fromQuery) return fromQuery;
  return "http://127.0.0.1:8787";
}

function boot(): void {
  const root = document.getElementById("app");
  if (root === null) throw new Error("missing #app container");

  const store = new Store();
  const client = new GatewayClient(gatewayBaseUrl());
  const console_ = new Console(client, store);

  const view = mount(root, {
    onDecide: (ticketId, choice) => void console_.decide(ticketId, choice),
    onDismissToast: () => store.dispatch({ type: "toast_cleared" }),
  });

  store.subscribe((state) => view.render(state));
  view.render(store.getState());
  // ages tick even when no frames arrive
  setInterval(() => view.render(store.getState()), 5000);

  console_.start();
}

boot();
