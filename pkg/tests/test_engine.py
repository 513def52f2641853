"""Prevention engine: blocklist persistence and the intercept state machine."""

import pytest

from bridgeguard.catalog import BridgeEvent, SensitiveApiCatalog
from bridgeguard.engine import (
    ALLOW,
    ALLOWED,
    AUTO_BENIGN,
    AUTO_BLOCKLISTED,
    BLOCK,
    BLOCKED,
    EXPIRED,
    PENDING,
    POLICY_DEFAULT,
    USER_ALLOWED,
    USER_BLOCKED,
    AlertTicket,
    BlockList,
    EngineError,
    PreventionEngine,
    extract_features,
)


class StubModel:
    """Flags any event whose extracted api_name is in `flag_apis`."""

    def __init__(self, flag_apis=("getDeviceId",)):
        self.calls = 0
        self.flag_apis = set(flag_apis)

    def score(self, sample):
        self.calls += 1
        return 0.9 if sample.api_name in self.flag_apis else 0.1


def bridge_event(apis, site="evil.example", obj="NativeBridge", event_id="e-1", ts=0):
    return BridgeEvent(
        event_id=event_id,
        app_name="com.example.app",
        object_name=obj,
        website_name=site,
        ip="185.220.101.5",
        location="RU",
        permissions="INTERNET|READ_SMS",
        requested_apis=tuple(apis),
        timestamp=ts,
    )


class TestExtractFeatures:
    def test_prefers_first_sensitive_api(self):
        sample = extract_features(bridge_event(["log", "getAccounts", "getDeviceId"]))
        assert sample.api_name == "getAccounts"

    def test_falls_back_to_first_requested(self):
        assert extract_features(bridge_event(["log", "toString"])).api_name == "log"

    def test_canonicalizes_alias_spellings(self):
        assert extract_features(bridge_event(["getUserData"])).api_name == "getUserDate"

    def test_copies_event_fields_and_leaves_label_unset(self):
        event = bridge_event(["getDeviceId"])
        sample = extract_features(event)
        assert sample.website_name == "evil.example"
        assert sample.permissions == "INTERNET|READ_SMS"
        assert sample.ip == "185.220.101.5"
        assert sample.label is None


class TestBlockList:
    def test_memory_only_round_trip(self):
        bl = BlockList()
        assert len(bl) == 0
        assert bl.append("a.example", "Bridge")
        assert ("a.example", "Bridge") in bl
        assert ("a.example", "Other") not in bl

    def test_appends_persist_across_instances(self, tmp_path):
        path = tmp_path / "bl.tsv"
        first = BlockList(path, clock=lambda: 1.5)
        first.append("a.example", "Bridge")
        first.append("b.example", "Widget")
        second = BlockList(path)
        assert len(second) == 2
        assert ("a.example", "Bridge") in second
        assert second.entries()[0] == (1.5, "a.example", "Bridge")

    def test_duplicate_append_is_idempotent(self, tmp_path):
        path = tmp_path / "bl.tsv"
        bl = BlockList(path, clock=lambda: 2.0)
        assert bl.append("a.example", "Bridge")
        assert bl.append("a.example", "Bridge")  # repeat reports success
        assert len(bl) == 1
        assert len(path.read_text().splitlines()) == 1

    def test_corrupt_lines_skipped_with_warning(self, tmp_path):
        path = tmp_path / "bl.tsv"
        path.write_text("1.0\tgood.example\tBridge\nnot-a-real-line\n2.0\tonly-two\n")
        with pytest.warns(UserWarning):
            bl = BlockList(path)
        assert len(bl) == 1
        assert ("good.example", "Bridge") in bl
        assert len(bl.warnings) == 2

    def test_unreadable_store_starts_empty_with_warning(self, tmp_path):
        with pytest.warns(UserWarning):
            bl = BlockList(tmp_path)  # a directory is not readable as a file
        assert len(bl) == 0
        assert bl.warnings

    def test_unwritable_store_keeps_entry_in_memory(self, tmp_path):
        bl = BlockList(tmp_path / "missing-dir" / "bl.tsv")
        with pytest.warns(UserWarning):
            durable = bl.append("a.example", "Bridge")
        assert durable is False
        assert ("a.example", "Bridge") in bl

    def test_clock_supplies_timestamps(self, tmp_path):
        ticks = iter([10.0, 20.0])
        bl = BlockList(tmp_path / "bl.tsv", clock=lambda: next(ticks))
        bl.append("a.example", "A")
        bl.append("b.example", "B")
        stamps = sorted(ts for ts, _, _ in bl.entries())
        assert stamps == [10.0, 20.0]


class TestAlertTicket:
    def make(self):
        return AlertTicket(
            ticket_id="t-000001",
            event=bridge_event(["getDeviceId"]),
            sensitive_apis=["getDeviceId"],
            classifier_verdict="Yes",
            score=0.9,
            created_at=0.0,
        )

    def test_resolution_is_single_shot(self):
        ticket = self.make()
        ticket.resolve(BLOCKED, at=1.0)
        assert ticket.state == BLOCKED
        assert ticket.resolved_at == 1.0
        with pytest.raises(EngineError):
            ticket.resolve(ALLOWED, at=2.0)

    def test_bad_state_rejected(self):
        with pytest.raises(EngineError):
            self.make().resolve("Lost", at=1.0)


class TestIntercept:
    def test_benign_event_allows_without_ticket(self):
        model = StubModel()
        registered = []
        tickets = []
        engine = PreventionEngine(
            model=model,
            on_register=registered.append,
            ticket_listener=lambda kind, t: tickets.append((kind, t.ticket_id)),
        )
        verdict = engine.intercept(bridge_event(["log"]))
        assert (verdict.decision, verdict.reason) == (ALLOW, AUTO_BENIGN)
        assert registered == [bridge_event(["log"])]
        assert tickets == []
        assert model.calls == 1

    def test_flagged_block_appends_one_blocklist_entry(self, tmp_path):
        engine = PreventionEngine(
            model=StubModel(), blocklist=BlockList(tmp_path / "bl.tsv")
        )
        verdict = engine.intercept(
            bridge_event(["getDeviceId"]), decision_provider=lambda t: "block"
        )
        assert (verdict.decision, verdict.reason) == (BLOCK, USER_BLOCKED)
        assert verdict.persisted is True
        assert len(engine.blocklist) == 1
        assert ("evil.example", "NativeBridge") in engine.blocklist

    def test_blocklisted_pair_denied_without_classifier(self):
        model = StubModel()
        engine = PreventionEngine(model=model)
        engine.intercept(bridge_event(["getDeviceId"]), decision_provider=lambda t: "block")
        calls_before = engine.classifier_calls
        score_calls_before = model.calls
        verdict = engine.intercept(bridge_event(["getDeviceId"], event_id="e-2"))
        assert (verdict.decision, verdict.reason) == (BLOCK, AUTO_BLOCKLISTED)
        assert engine.classifier_calls == calls_before
        assert model.calls == score_calls_before

    def test_no_registration_while_ticket_pending(self):
        registered = []
        observed = {}

        def provider(ticket):
            observed["state"] = ticket.state
            observed["registered_during_prompt"] = list(registered)
            return "allow"

        engine = PreventionEngine(model=StubModel(), on_register=registered.append)
        event = bridge_event(["getDeviceId"])
        verdict = engine.intercept(event, decision_provider=provider)
        assert observed["state"] == PENDING
        assert observed["registered_during_prompt"] == []
        assert (verdict.decision, verdict.reason) == (ALLOW, USER_ALLOWED)
        assert registered == [event]

    def test_missing_provider_blocks_by_policy(self):
        engine = PreventionEngine(model=StubModel())
        verdict = engine.intercept(bridge_event(["getDeviceId"]))
        assert (verdict.decision, verdict.reason) == (BLOCK, POLICY_DEFAULT)
        ticket = engine.get_ticket("t-000001")
        assert ticket.state == EXPIRED
        assert ("evil.example", "NativeBridge") in engine.blocklist

    def test_provider_timeout_expires_ticket(self):
        def provider(ticket):
            raise TimeoutError("operator never answered")

        engine = PreventionEngine(model=StubModel())
        verdict = engine.intercept(bridge_event(["getDeviceId"]), decision_provider=provider)
        assert (verdict.decision, verdict.reason) == (BLOCK, POLICY_DEFAULT)
        assert engine.get_ticket("t-000001").state == EXPIRED

    def test_provider_answers_are_case_insensitive(self):
        engine = PreventionEngine(model=StubModel())
        verdict = engine.intercept(
            bridge_event(["getDeviceId"]), decision_provider=lambda t: "ALLOW"
        )
        assert verdict.reason == USER_ALLOWED

    def test_invalid_answer_rejected(self):
        engine = PreventionEngine(model=StubModel())
        with pytest.raises(EngineError):
            engine.intercept(
                bridge_event(["getDeviceId"]), decision_provider=lambda t: "maybe"
            )

    def test_missing_model_rejected(self):
        engine = PreventionEngine()
        with pytest.raises(EngineError):
            engine.intercept(bridge_event(["log"]))

    def test_per_call_model_override(self):
        fallback = StubModel(flag_apis=())
        override = StubModel()
        engine = PreventionEngine(model=fallback)
        verdict = engine.intercept(
            bridge_event(["getDeviceId"]),
            decision_provider=lambda t: "block",
            model=override,
        )
        assert verdict.reason == USER_BLOCKED
        assert override.calls == 1
        assert fallback.calls == 0

    def test_ticket_carries_sensitive_apis_and_score(self):
        captured = []
        engine = PreventionEngine(
            model=StubModel(),
            ticket_listener=lambda kind, t: captured.append((kind, t)),
        )
        engine.intercept(
            bridge_event(["toString", "getDeviceId", "getUserData"]),
            decision_provider=lambda t: "block",
        )
        kinds = [kind for kind, _ in captured]
        assert kinds == ["created", "resolved"]
        ticket = captured[0][1]
        assert ticket.sensitive_apis == ["getDeviceId", "getUserData"]
        assert ticket.score == pytest.approx(0.9)
        assert ticket.classifier_verdict == "Yes"

    def test_ticket_ids_are_sequential(self):
        engine = PreventionEngine(model=StubModel())
        engine.intercept(
            bridge_event(["getDeviceId"], site="a.example"),
            decision_provider=lambda t: "allow",
        )
        engine.intercept(
            bridge_event(["getDeviceId"], site="b.example"),
            decision_provider=lambda t: "allow",
        )
        assert engine.get_ticket("t-000001") is not None
        assert engine.get_ticket("t-000002") is not None
        assert engine.pending_tickets() == []

    def test_unpersisted_block_reports_nondurable_verdict(self, tmp_path):
        bl = BlockList(tmp_path / "no-such-dir" / "bl.tsv")
        engine = PreventionEngine(model=StubModel(), blocklist=bl)
        with pytest.warns(UserWarning):
            verdict = engine.intercept(
                bridge_event(["getDeviceId"]), decision_provider=lambda t: "block"
            )
        assert verdict.decision == BLOCK
        assert verdict.persisted is False

    def test_injected_clock_stamps_tickets(self):
        ticks = iter([100.0, 101.0])
        engine = PreventionEngine(model=StubModel(), clock=lambda: next(ticks))
        engine.intercept(bridge_event(["getDeviceId"]), decision_provider=lambda t: "allow")
        ticket = engine.get_ticket("t-000001")
        assert ticket.created_at == 100.0
        assert ticket.resolved_at == 101.0
