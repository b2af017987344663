import io
import json
from typing import Any

import pytest
from hypothesis import settings as hypothesis_settings
from hypothesis.stateful import RuleBasedStateMachine, invariant, rule

from redbench.core.world import AIR, STONE, BlockKind, BlockState
from redbench.packages.devices.constructors import build_for_task
from redbench.packages.gateway.errors import SessionClosedError
from redbench.packages.gateway.models import Tool, ToolRequest
from redbench.packages.gateway.server import serve
from redbench.packages.gateway.session import apply_device, handle, handle_line, open_session, replay, submit
from redbench.packages.tasks.generator import generate_task
from redbench.packages.tasks.models import Family, Level, TaskSpec
from redbench.settings import Settings, use_settings


def _spec() -> TaskSpec:
    return generate_task(Family.A, Level.L1)


def _request(request_id: str, tool: str, **params: Any) -> str:
    return json.dumps({"id": request_id, "tool": tool, "params": params})


def _call(session, request_id: str, tool: str, **params: Any) -> dict[str, Any]:
    return json.loads(handle_line(session, _request(request_id, tool, **params)))


def test_session_pins_the_button():
    spec = _spec()
    session = open_session(spec)
    assert session.world.get_block(spec.inputs.pos).kind == BlockKind.BUTTON
    assert session.world.get_block(spec.inputs.support) == STONE
    assert session.metrics() == {"trials_used": 0, "placements": 0, "revisions": 0}

    response = _call(session, "1", "get-block-state", pos=spec.inputs.pos.to_list())
    assert response["ok"] is True
    assert response["id"] == "1"
    assert response["result"]["kind"] == "button"
    assert response["result"]["pos"] == spec.inputs.pos.to_list()


def test_response_lines_are_compact_and_sorted():
    session = open_session(_spec())
    line = handle_line(session, _request("a", "get-block-state", pos=[1, 4, 1]))
    assert line.startswith('{"id":"a","ok":true,"result":')
    assert " " not in line
    assert "\n" not in line


def test_set_block_counts_placements_and_revisions():
    session = open_session(_spec())
    placed = _call(session, "1", "set-block", pos=[3, 4, 0], kind="minecraft:redstone_lamp")
    assert placed["ok"]
    assert placed["result"]["previous"]["kind"] == "air"
    assert placed["result"]["placed"]["kind"] == "lamp"

    replaced = _call(session, "2", "set-block", pos=[3, 4, 0], kind="wire")
    assert replaced["result"]["previous"]["kind"] == "lamp"
    assert session.metrics() == {"trials_used": 0, "placements": 2, "revisions": 1}


@pytest.mark.parametrize(
    "params, code",
    [
        ({"pos": [30, 4, 0], "kind": "minecraft:redstone_wire"}, "out-of-region"),
        ({"pos": [3, 4, 0], "kind": "minecraft:comparator"}, "out-of-palette"),
        ({"kind": "minecraft:redstone_wire"}, "bad-request"),
        ({"pos": [3, 4], "kind": "minecraft:redstone_wire"}, "bad-request"),
        ({"pos": [3, 4, 0]}, "bad-request"),
        ({"pos": [3, 4, 0], "kind": "minecraft:redstone_wire", "state": []}, "bad-request"),
        ({"pos": [3, 8, 0], "kind": "minecraft:redstone_wire"}, "unsupported-placement"),
    ],
)
def test_set_block_errors(params: dict, code: str):
    session = open_session(_spec())
    response = _call(session, "x", "set-block", **params)
    assert response["ok"] is False
    assert response["error"]["code"] == code
    assert response["error"]["message"]
    assert session.placements == 0


def test_unreadable_requests():
    session = open_session(_spec())
    response = json.loads(handle_line(session, "{not json"))
    assert response["id"] is None
    assert response["error"]["code"] == "bad-request"

    response = json.loads(handle_line(session, json.dumps({"id": 3, "tool": "get-block-state"})))
    assert response["id"] is None
    assert response["error"]["code"] == "bad-request"

    response = _call(session, "7", "break-block", pos=[0, 4, 0])
    assert response["id"] == "7"
    assert response["error"]["code"] == "unknown-tool"
    assert [x[0] for x in session.transcript] == [None, None, None]


def test_budget_runs_out_after_fifty_trials():
    spec = _spec()
    session = open_session(spec)
    apply_device(session, build_for_task(spec))
    codes = []
    for i in range(60):
        response = _call(session, str(i), "activate-button")
        codes.append("ok" if response["ok"] else response["error"]["code"])
    assert codes == ["ok"] * 50 + ["budget-exhausted"] * 10
    assert session.metrics()["trials_used"] == 50

    verdict, trace, metrics = submit(session)
    assert verdict.passed, verdict.to_json()
    assert trace is not None
    assert metrics["trials_used"] == 50


def test_activation_reports_raw_events():
    spec = _spec()
    session = open_session(spec)
    apply_device(session, build_for_task(spec))
    result = _call(session, "1", "activate-button")["result"]
    assert result["button"] == spec.inputs.pos.to_list()
    assert result["press_tick"] == 0
    assert result["trials_left"] == 49
    assert result["ticks"] >= session.world.config.button_pulse_ticks
    assert any(x["new"] == "lamp" and x["detail"]["lit"] for x in result["events"])
    assert "pass" not in result
    assert "verdict" not in result


def test_activation_needs_exactly_one_button():
    spec = _spec()
    session = open_session(spec)
    session.world.set_block(spec.inputs.pos, AIR)
    assert _call(session, "1", "activate-button")["error"]["code"] == "no-button"

    session.world.set_block(spec.inputs.pos, BlockState.button())
    session.world.set_block(spec.world.anchor.offset(5, 0, 5), STONE)
    session.world.set_block(spec.world.anchor.offset(5, 1, 5), BlockState.button())
    assert _call(session, "2", "activate-button")["error"]["code"] == "multiple-buttons"
    assert session.budget.used == 0


def test_submit_closes_the_session():
    session = open_session(_spec())
    verdict, trace, _ = submit(session)
    assert not verdict.passed
    assert trace is None
    with pytest.raises(SessionClosedError):
        submit(session)
    response = handle(session, ToolRequest("1", Tool.GET_BLOCK_STATE, {"pos": [0, 4, 0]}))
    assert response.error is not None
    assert response.error["code"] == "session-closed"


def test_event_stream_pages_with_a_cursor():
    use_settings(Settings(event_page_size=3))
    spec = _spec()
    session = open_session(spec)
    apply_device(session, build_for_task(spec))
    _call(session, "press", "activate-button")

    seen = []
    while True:
        result = _call(session, str(len(seen)), "get-event-stream", limit=10)["result"]
        assert len(result["events"]) <= 3
        seen.extend(result["events"])
        assert result["cursor"] == len(seen)
        if not result["more"]:
            break
    assert seen == [x.to_record() for x in session.world.events]
    assert _call(session, "end", "get-event-stream")["result"]["events"] == []


def test_scan_returns_components_in_the_region():
    spec = _spec()
    session = open_session(spec)
    _call(session, "1", "set-block", pos=[2, 4, 0], kind="minecraft:redstone_wire")
    _call(session, "2", "set-block", pos=[2, 4, 2], kind="minecraft:stone")
    blocks = _call(session, "3", "scan-redstone-area")["result"]["blocks"]
    assert sorted(x["kind"] for x in blocks) == ["button", "wire"]

    narrow = _call(session, "4", "scan-redstone-area", anchor=[2, 4, 0], radius=1)["result"]["blocks"]
    assert [x["pos"] for x in narrow] == [[2, 4, 0]]


TRANSCRIPTS = [
    [
        _request("1", "set-block", pos=[1, 4, 0], kind="minecraft:redstone_wire"),
        _request("2", "set-block", pos=[2, 4, 0], kind="minecraft:redstone_lamp"),
        _request("3", "activate-button"),
        _request("4", "get-event-stream"),
    ],
    [
        _request("1", "activate-button"),
        "",
        "{broken",
        _request("2", "scan-redstone-area"),
    ],
    [
        _request("1", "set-block", pos=[1, 4, 0], kind="minecraft:redstone_repeater", state={"facing": "east"}),
        _request("2", "set-block", pos=[2, 4, 0], kind="minecraft:redstone_lamp"),
        _request("3", "activate-button"),
        _request("4", "activate-button"),
        _request("5", "get-block-state", pos=[2, 4, 0]),
    ],
]


@pytest.mark.parametrize("lines", TRANSCRIPTS)
def test_replay_is_deterministic(lines: list[str]):
    spec = _spec()
    first = replay(spec, lines)
    assert first == replay(spec, lines)
    assert len(first) == len([x for x in lines if x.strip()])


def test_serve_answers_line_by_line():
    session = open_session(_spec())
    reader = io.StringIO(TRANSCRIPTS[0][0] + "\n\n" + TRANSCRIPTS[0][2] + "\n")
    writer = io.StringIO()
    assert serve(session, reader, writer) == 2
    lines = writer.getvalue().splitlines()
    assert [json.loads(x)["id"] for x in lines] == ["1", "3"]


class BudgetMachine(RuleBasedStateMachine):
    """
    Trials are only spent by successful activations and never exceed the limit.
    """

    LIMIT = 5

    def __init__(self):
        super().__init__()
        self.spec = _spec()
        self.session = open_session(self.spec, budget=self.LIMIT)
        self.activations = 0

    @rule()
    def activate(self):
        response = _call(self.session, "a", "activate-button")
        if self.activations < self.LIMIT:
            assert response["ok"]
            self.activations += 1
        else:
            assert response["error"]["code"] == "budget-exhausted"

    @rule()
    def remove_button(self):
        self.session.world.set_block(self.spec.inputs.pos, AIR)
        response = _call(self.session, "b", "activate-button")
        assert response["error"]["code"] == "no-button"
        self.session.world.set_block(self.spec.inputs.pos, BlockState.button())

    @rule()
    def look(self):
        assert _call(self.session, "c", "get-block-state", pos=self.spec.inputs.pos.to_list())["ok"]

    @invariant()
    def budget_matches(self):
        assert self.session.budget.used == self.activations
        assert self.session.budget.remaining == self.LIMIT - self.activations


TestBudget = BudgetMachine.TestCase
TestBudget.settings = hypothesis_settings(max_examples=20, stateful_step_count=12, deadline=None)
