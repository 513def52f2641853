"""Scenario replay and the live HTTP service in front of the engine.

Replay drives the engine from a JSONL scenario under a logical tick clock,
so logs and blocklist files are byte-reproducible.  Serve exposes the same
engine over HTTP/JSON for the alert console: pending tickets, decision
submission, an SSE lifecycle stream, event injection, and the blocklist.
"""

from __future__ import annotations

import json
import queue
import threading
import time
from dataclasses import dataclass, field

from .catalog import BridgeEvent, CatalogError, SensitiveApiCatalog
from .engine import BlockList, PreventionEngine

EVENT_FIELDS = {
    "event_id",
    "app_name",
    "object_name",
    "website_name",
    "ip",
    "location",
    "permissions",
    "requested_apis",
    "timestamp",
}
_REQUIRED_FIELDS = EVENT_FIELDS - {"permissions", "timestamp"}

POLICIES = ("always_allow", "always_block", "flag_sensitive")


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def event_to_doc(event: BridgeEvent) -> dict:
    return {
        "event_id": event.event_id,
        "app_name": event.app_name,
        "object_name": event.object_name,
        "website_name": event.website_name,
        "ip": event.ip,
        "location": event.location,
        "permissions": event.permissions,
        "requested_apis": list(event.requested_apis),
        "timestamp": event.timestamp,
    }


def event_from_doc(doc: dict, line: int | None = None) -> BridgeEvent:
    if not isinstance(doc, dict):
        raise ScenarioError("event record must be a JSON object", line)
    unknown = set(doc) - EVENT_FIELDS
    if unknown:
        raise ScenarioError(f"unknown event field(s) {sorted(unknown)}", line)
    missing = _REQUIRED_FIELDS - set(doc)
    if missing:
        raise ScenarioError(f"missing event field(s) {sorted(missing)}", line)
    permissions = doc.get("permissions", "")
    if isinstance(permissions, list):
        permissions = BridgeEvent.join_permissions(permissions)
    try:
        return BridgeEvent(
            event_id=str(doc["event_id"]),
            app_name=str(doc["app_name"]),
            object_name=str(doc["object_name"]),
            website_name=str(doc["website_name"]),
            ip=str(doc["ip"]),
            location=str(doc["location"]),
            permissions=permissions,
            requested_apis=tuple(doc["requested_apis"]),
            timestamp=int(doc.get("timestamp", 0)),
        )
    except (CatalogError, TypeError, ValueError) as exc:
        raise ScenarioError(str(exc), line) from exc


def ticket_to_doc(ticket) -> dict:
    return {
        "ticket_id": ticket.ticket_id,
        "event": event_to_doc(ticket.event),
        "sensitive_apis": list(ticket.sensitive_apis),
        "classifier_verdict": ticket.classifier_verdict,
        "score": ticket.score,
        "state": ticket.state,
        "created_at": ticket.created_at,
        "resolved_at": ticket.resolved_at,
    }


@dataclass
class Scenario:
    events: list[BridgeEvent]
    name: str = "unnamed"
    seed: int | None = None


def load_scenario(path) -> Scenario:
    """Line-delimited JSON, one event per line; optional leading meta line.

    Any malformed line aborts the load with its line number; timestamps must
    be non-decreasing in file order.
    """
    name = "unnamed"
    seed = None
    events: list[BridgeEvent] = []
    last_ts = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ScenarioError(f"bad JSON ({exc.msg})", lineno) from exc
            if isinstance(doc, dict) and "meta" in doc:
                if events or lineno > 1:
                    raise ScenarioError("meta line must come first", lineno)
                meta = doc["meta"]
                name = meta.get("name", name)
                seed = meta.get("seed", seed)
                continue
            event = event_from_doc(doc, lineno)
            if last_ts is not None and event.timestamp < last_ts:
                raise ScenarioError(
                    f"timestamp {event.timestamp} decreases (previous {last_ts})",
                    lineno,
                )
            last_ts = event.timestamp
            events.append(event)
    return Scenario(events=events, name=name, seed=seed)


def write_scenario(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        meta = {"name": scenario.name}
        if scenario.seed is not None:
            meta["seed"] = scenario.seed
        fh.write(json.dumps({"meta": meta}) + "\n")
        for event in scenario.events:
            fh.write(json.dumps(event_to_doc(event)) + "\n")


@dataclass
class LogRecord:
    event_id: str
    decision: str
    reason: str
    latency: float


@dataclass
class SessionLog:
    scenario: str
    policy: str
    records: list[LogRecord] = field(default_factory=list)

    def counts(self) -> dict[tuple[str, str], int]:
        out: dict[tuple[str, str], int] = {}
        for r in self.records:
            key = (r.decision, r.reason)
            out[key] = out.get(key, 0) + 1
        return out

    def to_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(
                json.dumps({"meta": {"scenario": self.scenario, "policy": self.policy}})
                + "\n"
            )
            for r in self.records:
                fh.write(
                    json.dumps(
                        {
                            "event_id": r.event_id,
                            "decision": r.decision,
                            "reason": r.reason,
                            "latency": r.latency,
                        }
                    )
                    + "\n"
                )


class TickClock:
    """Logical clock pinned to the scenario timeline."""

    def __init__(self, start: float = 0.0):
        self.now = float(start)

    def __call__(self) -> float:
        return self.now


def _policy_provider(policy):
    if callable(policy):
        return policy
    if isinstance(policy, dict):
        return lambda ticket: policy.get(ticket.event.event_id)
    if policy == "always_allow":
        return lambda ticket: "allow"
    if policy == "always_block":
        return lambda ticket: "block"
    if policy == "flag_sensitive":
        return lambda ticket: "block" if ticket.sensitive_apis else "allow"
    raise ScenarioError(
        f"unknown policy {policy!r}; expected one of {POLICIES}, a dict, or a callable"
    )


def replay(
    scenario: Scenario,
    model,
    policy="flag_sensitive",
    blocklist: BlockList | None = None,
    blocklist_path=None,
    catalog: SensitiveApiCatalog | None = None,
) -> SessionLog:
    """Feed every scenario event through the engine under a scripted policy.

    The engine clock is the event timeline, so two replays with identical
    inputs produce identical logs and blocklist bytes.
    """
    provider = _policy_provider(policy)
    clock = TickClock()
    if blocklist is None:
        blocklist = BlockList(path=blocklist_path, clock=clock)
    else:
        blocklist.clock = clock
    engine = PreventionEngine(
        model=model, blocklist=blocklist, catalog=catalog, clock=clock
    )
    log = SessionLog(
        scenario=scenario.name,
        policy=policy if isinstance(policy, str) else "scripted",
    )
    for event in scenario.events:
        clock.now = float(event.timestamp)
        started = clock()
        verdict = engine.intercept(event, provider)
        log.records.append(
            LogRecord(
                event_id=event.event_id,
                decision=verdict.decision,
                reason=verdict.reason,
                latency=clock() - started,
            )
        )
    return log


# --- live service -------------------------------------------------------------


class _Broadcast:
    """Fan-out of lifecycle events to every connected stream."""

    def __init__(self):
        self._lock = threading.Lock()
        self._subscribers: set[queue.Queue] = set()

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self._lock:
            self._subscribers.add(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            self._subscribers.discard(q)

    def publish(self, kind: str, payload: dict) -> None:
        with self._lock:
            targets = list(self._subscribers)
        for q in targets:
            q.put((kind, payload))


def build_app(engine: PreventionEngine, session_records: list | None = None):
    """FastAPI app over a live engine; decisions flow through per-ticket gates."""
    from fastapi import Body, FastAPI, HTTPException
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import StreamingResponse

    app = FastAPI(title="bridgeguard gateway")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    broadcast = _Broadcast()
    waiters: dict[str, dict] = {}
    waiters_lock = threading.Lock()

    def listener(kind: str, ticket) -> None:
        if kind == "created":
            with waiters_lock:
                waiters[ticket.ticket_id] = {
                    "answer": None,
                    "asked": threading.Event(),
                    "resolved": threading.Event(),
                }
            broadcast.publish("ticket_created", {"ticket": ticket_to_doc(ticket)})
        elif kind == "resolved":
            broadcast.publish(
                "ticket_resolved",
                {
                    "ticket": ticket_to_doc(ticket),
                    "blocklist_size": len(engine.blocklist),
                },
            )
            with waiters_lock:
                waiter = waiters.get(ticket.ticket_id)
            if waiter is not None:
                waiter["resolved"].set()

    engine.ticket_listener = listener

    def provider(ticket):
        with waiters_lock:
            waiter = waiters[ticket.ticket_id]
        waiter["asked"].wait(engine.timeout)
        return waiter["answer"]

    def run_intercept(event: BridgeEvent) -> None:
        started = time.perf_counter()
        verdict = engine.intercept(event, provider)
        if session_records is not None:
            session_records.append(
                LogRecord(
                    event_id=event.event_id,
                    decision=verdict.decision,
                    reason=verdict.reason,
                    latency=(time.perf_counter() - started) * 1000.0,
                )
            )

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/alerts/pending")
    def alerts_pending() -> list:
        return [ticket_to_doc(t) for t in engine.pending_tickets()]

    @app.get("/alerts/{ticket_id}")
    def alert_detail(ticket_id: str) -> dict:
        ticket = engine.get_ticket(ticket_id)
        if ticket is None:
            raise HTTPException(status_code=404, detail="no such ticket")
        return ticket_to_doc(ticket)

    @app.post("/alerts/{ticket_id}/decision")
    def alert_decision(ticket_id: str, payload: dict = Body(...)) -> dict:
        decision = str(payload.get("decision", "")).lower()
        if decision not in ("allow", "block"):
            raise HTTPException(
                status_code=400, detail="decision must be allow or block"
            )
        ticket = engine.get_ticket(ticket_id)
        if ticket is None:
            raise HTTPException(status_code=404, detail="no such ticket")
        with waiters_lock:
            waiter = waiters.get(ticket_id)
            conflict = (
                ticket.state != "Pending"
                or waiter is None
                or waiter["answer"] is not None
                or waiter["asked"].is_set()
            )
            if not conflict:
                waiter["answer"] = decision
                waiter["asked"].set()
        if conflict:
            raise HTTPException(
                status_code=409, detail=f"ticket already {ticket.state}"
            )
        waiter["resolved"].wait(10.0)
        return {
            "ticket_id": ticket_id,
            "state": ticket.state,
            "blocklist_size": len(engine.blocklist),
        }

    @app.post("/simulate/event", status_code=202)
    def simulate_event(payload: dict = Body(...)) -> dict:
        try:
            event = event_from_doc(payload)
        except ScenarioError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        threading.Thread(target=run_intercept, args=(event,), daemon=True).start()
        return {"accepted": True, "event_id": event.event_id}

    @app.get("/blocklist")
    def blocklist() -> dict:
        entries = [
            {"timestamp": ts, "website_name": w, "object_name": o}
            for ts, w, o in engine.blocklist.entries()
        ]
        return {"count": len(entries), "entries": entries}

    @app.get("/events/stream")
    def events_stream() -> StreamingResponse:
        def stream():
            q = broadcast.subscribe()
            try:
                pending = [ticket_to_doc(t) for t in engine.pending_tickets()]
                yield (
                    "event: snapshot\ndata: "
                    + json.dumps(
                        {
                            "pending": pending,
                            "blocklist_size": len(engine.blocklist),
                        }
                    )
                    + "\n\n"
                )
                while True:
                    try:
                        kind, payload = q.get(timeout=15.0)
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    yield f"event: {kind}\ndata: {json.dumps(payload)}\n\n"
            finally:
                broadcast.unsubscribe(q)

        return StreamingResponse(
            stream(),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    return app


def serve(
    model,
    host: str = "127.0.0.1",
    port: int = 8787,
    blocklist_path=None,
    timeout: float = 120.0,
    catalog: SensitiveApiCatalog | None = None,
) -> None:
    """Run the gateway until interrupted."""
    import uvicorn

    engine = PreventionEngine(
        model=model,
        blocklist=BlockList(path=blocklist_path),
        catalog=catalog,
        timeout=timeout,
    )
    app = build_app(engine)
    uvicorn.run(app, host=host, port=port, log_level="warning")
