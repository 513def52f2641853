"""Interception engine: classify bridge registrations, enforce allow/block.

`intercept` is the bridge chokepoint.  A known-bad (website, object) pair is
denied without consulting the model; otherwise the event's feature row is
classified, benign events register silently, and flagged events open an
AlertTicket and wait on a decision provider.  Every Block lands in the
persistent blocklist before intercept returns.  Timeouts and absent
providers fall back to Block: the engine never fails open.
"""

from __future__ import annotations

import os
import threading
import time
import warnings
from dataclasses import dataclass, field

from .catalog import BridgeEvent, SensitiveApiCatalog
from .datagen import Sample

PENDING = "Pending"
ALLOWED = "Allowed"
BLOCKED = "Blocked"
EXPIRED = "Expired"

ALLOW = "Allow"
BLOCK = "Block"

AUTO_BENIGN = "AutoBenign"
AUTO_BLOCKLISTED = "AutoBlocklisted"
USER_ALLOWED = "UserAllowed"
USER_BLOCKED = "UserBlocked"
POLICY_DEFAULT = "PolicyDefault"

DEFAULT_TIMEOUT = 120.0


class EngineError(RuntimeError):
    pass


@dataclass(frozen=True)
class Verdict:
    decision: str  # Allow | Block
    reason: str
    persisted: bool = True  # False when a Block could not be made durable


@dataclass
class AlertTicket:
    """One pending human adjudication of a flagged registration."""

    ticket_id: str
    event: BridgeEvent
    sensitive_apis: list[str]
    classifier_verdict: str
    score: float
    created_at: float
    state: str = PENDING
    resolved_at: float | None = None

    def resolve(self, state: str, at: float) -> None:
        if self.state != PENDING:
            raise EngineError(
                f"ticket {self.ticket_id} already {self.state}, cannot {state}"
            )
        if state not in (ALLOWED, BLOCKED, EXPIRED):
            raise EngineError(f"bad ticket state {state!r}")
        self.state = state
        self.resolved_at = at


class BlockList:
    """(website, object) pairs denied on sight, persisted one per line.

    Store format is tab-separated `timestamp  website  object`.  Appends are
    flushed and fsynced before returning; loading skips and reports corrupt
    lines instead of refusing the whole store.  With no path the list is
    memory-only.
    """

    def __init__(self, path=None, clock=time.time):
        self.path = path
        self.clock = clock
        self.warnings: list[str] = []
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], float] = {}
        if path is not None:
            self._load()

    def _load(self) -> None:
        try:
            with open(self.path, encoding="utf-8") as fh:
                lines = fh.read().split("\n")
        except FileNotFoundError:
            return  # fresh store
        except OSError as exc:
            message = f"blocklist {self.path} unreadable ({exc}); starting empty"
            self.warnings.append(message)
            warnings.warn(message)
            return
        for lineno, line in enumerate(lines, start=1):
            if not line:
                continue
            parts = line.split("\t")
            ok = len(parts) == 3 and parts[1] and parts[2]
            if ok:
                try:
                    ts = float(parts[0])
                except ValueError:
                    ok = False
            if not ok:
                message = f"blocklist {self.path} line {lineno}: corrupt entry skipped"
                self.warnings.append(message)
                warnings.warn(message)
                continue
            self._entries.setdefault((parts[1], parts[2]), ts)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, pair: tuple[str, str]) -> bool:
        with self._lock:
            return pair in self._entries

    def entries(self) -> list[tuple[float, str, str]]:
        with self._lock:
            return [(ts, w, o) for (w, o), ts in self._entries.items()]

    def append(self, website: str, object_name: str) -> bool:
        """Record the pair; True when the record is durable (or a repeat)."""
        with self._lock:
            key = (website, object_name)
            if key in self._entries:
                return True
            ts = self.clock()
            self._entries[key] = ts
            if self.path is None:
                return True
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(f"{ts}\t{website}\t{object_name}\n")
                    fh.flush()
                    os.fsync(fh.fileno())
                return True
            except OSError as exc:
                message = f"blocklist {self.path} unwritable ({exc}); entry kept in memory"
                self.warnings.append(message)
                warnings.warn(message)
                return False


def extract_features(
    event: BridgeEvent, catalog: SensitiveApiCatalog | None = None
) -> Sample:
    """Six-feature row for an event; api_name prefers the first sensitive API.

    Sensitive names are canonicalized to the catalog spelling so live rows
    line up with the training vocabulary.
    """
    catalog = catalog or SensitiveApiCatalog.default()
    api_name = None
    for name in event.requested_apis:
        canonical = catalog.canonical(name)
        if canonical is not None:
            api_name = canonical
            break
    if api_name is None:
        api_name = event.requested_apis[0]
    return Sample(
        app_name=event.app_name,
        permissions=event.permissions,
        api_name=api_name,
        website_name=event.website_name,
        ip=event.ip,
        location=event.location,
        label=None,
    )


class PreventionEngine:
    """Serializes verdicts per event; tickets may be pending concurrently.

    `decision_provider(ticket)` must return "allow" or "block"; returning
    None or raising TimeoutError is treated as an expired prompt.  The
    registration side-effect `on_register(event)` fires only on Allow and
    never while the event's ticket is Pending.  `ticket_listener(kind,
    ticket)` observes "created"/"resolved" transitions.  `clock` supplies
    all timestamps, so replays with a logical clock are byte-reproducible.
    """

    def __init__(
        self,
        model=None,
        blocklist: BlockList | None = None,
        catalog: SensitiveApiCatalog | None = None,
        on_register=None,
        ticket_listener=None,
        timeout: float = DEFAULT_TIMEOUT,
        clock=time.time,
    ):
        self.model = model
        self.blocklist = blocklist if blocklist is not None else BlockList()
        self.catalog = catalog or SensitiveApiCatalog.default()
        self.on_register = on_register
        self.ticket_listener = ticket_listener
        self.timeout = timeout
        self.clock = clock
        self.classifier_calls = 0
        self._tickets: dict[str, AlertTicket] = {}
        self._lock = threading.Lock()
        self._serial = 0

    def pending_tickets(self) -> list[AlertTicket]:
        with self._lock:
            return [t for t in self._tickets.values() if t.state == PENDING]

    def get_ticket(self, ticket_id: str) -> AlertTicket | None:
        with self._lock:
            return self._tickets.get(ticket_id)

    def _notify(self, kind: str, ticket: AlertTicket) -> None:
        if self.ticket_listener is not None:
            self.ticket_listener(kind, ticket)

    def intercept(
        self, event: BridgeEvent, decision_provider=None, model=None
    ) -> Verdict:
        model = model if model is not None else self.model
        if model is None:
            raise EngineError("no model supplied")
        pair = (event.website_name, event.object_name)

        if pair in self.blocklist:
            return Verdict(decision=BLOCK, reason=AUTO_BLOCKLISTED)

        sample = extract_features(event, self.catalog)
        with self._lock:
            self.classifier_calls += 1
        score = float(model.score(sample))
        if score < 0.5:
            if self.on_register is not None:
                self.on_register(event)
            return Verdict(decision=ALLOW, reason=AUTO_BENIGN)

        with self._lock:
            self._serial += 1
            ticket = AlertTicket(
                ticket_id=f"t-{self._serial:06d}",
                event=event,
                sensitive_apis=self.catalog.sensitive_subset(event),
                classifier_verdict="Yes",
                score=score,
                created_at=self.clock(),
            )
            self._tickets[ticket.ticket_id] = ticket
        self._notify("created", ticket)

        answer = None
        if decision_provider is not None:
            try:
                answer = decision_provider(ticket)
            except TimeoutError:
                answer = None
        if answer is not None:
            answer = str(answer).lower()
            if answer not in ("allow", "block"):
                raise EngineError(f"decision provider answered {answer!r}")

        if answer == "allow":
            ticket.resolve(ALLOWED, self.clock())
            self._notify("resolved", ticket)
            if self.on_register is not None:
                self.on_register(event)
            return Verdict(decision=ALLOW, reason=USER_ALLOWED)

        reason = USER_BLOCKED if answer == "block" else POLICY_DEFAULT
        ticket.resolve(BLOCKED if answer == "block" else EXPIRED, self.clock())
        persisted = self.blocklist.append(*pair)
        self._notify("resolved", ticket)
        return Verdict(decision=BLOCK, reason=reason, persisted=persisted)
