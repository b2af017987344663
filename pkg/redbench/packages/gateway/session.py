"""
The agent-facing tool protocol. A session owns one world built for one task, answers the five tool
calls against it and counts verification trials. Grading happens in `submit`, on a copy of the world.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable
from typing import Any

from redbench.core import metrics
from redbench.core.engine import press_button, run_until_quiescent, settle
from redbench.core.errors import RedbenchError
from redbench.core.world import STONE, BlockKind, BlockState, Region, World
from redbench.packages.contracts.checker import evaluate
from redbench.packages.contracts.models import LampTrace, Verdict
from redbench.packages.devices.models import Device
from redbench.packages.tasks.models import PALETTE, TaskSpec
from redbench.settings import settings

from .errors import (
    BadRequestError,
    MultipleButtonsError,
    NoButtonError,
    OutOfPaletteError,
    OutOfRegionError,
    SessionClosedError,
)
from .models import Session, Tool, ToolRequest, ToolResponse, TrialBudget

log = logging.getLogger("redbench.packages.gateway")

_KIND_NAMES: dict[str, BlockKind] = {**PALETTE, **{kind.value: kind for kind in BlockKind}}


def open_session(spec: TaskSpec, budget: int | None = None) -> Session:
    """
    Prepare a fresh world for the task: floor laid, region empty, and the button pre-placed on a
    stone support when the task pins it.

    Parameters
    ----------
    spec: TaskSpec
        A validated task.
    budget: int | None
        Verification trials allowed, `trial_budget` of the settings by default.
    """
    world = World(settings.world_config())
    world.reset_region(spec.world)
    if spec.inputs.pinned:
        if not world.get_block(spec.inputs.support).is_opaque:
            world.set_block(spec.inputs.support, STONE)
        world.set_block(spec.inputs.pos, BlockState.button(spec.inputs.facing))
        settle(world)
    limit = settings.trial_budget if budget is None else budget
    log.debug(f"Opened a session for {spec.task_id} with {limit} trials", extra={"tick": world.clock})
    return Session(spec, world, TrialBudget(limit))


def apply_device(session: Session, device: Device):
    """
    Build a whole device in the session world at once, as if placed block by block.
    """
    if session.closed:
        raise SessionClosedError()
    device.apply(session.world)
    session.placements += len(device.placements)


def _block_record(pos, state: BlockState) -> dict[str, Any]:
    return {"pos": pos.to_list(), **state.to_dict()}


def _get_block_state(session: Session, request: ToolRequest) -> dict[str, Any]:
    pos = request.pos()
    return _block_record(pos, session.world.get_block(pos))


def _scan_redstone_area(session: Session, request: ToolRequest) -> dict[str, Any]:
    region = session.spec.world
    if "anchor" in request.params or "radius" in request.params:
        anchor = request.pos("anchor") if "anchor" in request.params else region.anchor
        radius = request.integer("radius", region.radius)
        if radius < 1:
            raise BadRequestError("radius must be at least 1")
        region = Region(anchor, radius)
    found = [x for x in session.world.scan_region(region) if session.spec.world.contains(x[0])]
    return {"blocks": [_block_record(pos, state) for pos, state in found]}


def _parse_state(request: ToolRequest) -> BlockState:
    name = request.params.get("kind")
    if not isinstance(name, str):
        raise BadRequestError("missing parameter 'kind'")
    kind = _KIND_NAMES.get(name)
    if kind is None:
        raise OutOfPaletteError(name)
    state = request.params.get("state", {})
    if not isinstance(state, dict):
        raise BadRequestError("state must be an object")
    placed = BlockState.from_dict({**state, "kind": kind.value})
    # presses only happen through activate-button
    return placed.evolve(pressed_until=None) if placed.pressed else placed


def _set_block(session: Session, request: ToolRequest) -> dict[str, Any]:
    pos = request.pos()
    spec = session.spec
    if not spec.world.contains(pos):
        raise OutOfRegionError(pos)
    state = _parse_state(request)
    if state.kind not in spec.allowed_kinds:
        raise OutOfPaletteError(request.params["kind"])
    previous = session.world.set_block(pos, state)
    settle(session.world)
    session.placements += 1
    if not previous.is_air:
        session.revisions += 1
    return {"previous": _block_record(pos, previous), "placed": _block_record(pos, session.world.get_block(pos))}


def _page(session: Session, start: int, limit: int) -> tuple[list[dict[str, Any]], int]:
    events = session.world.events[start : start + limit]
    return [x.to_record() for x in events], start + len(events)


def _get_event_stream(session: Session, request: ToolRequest) -> dict[str, Any]:
    limit = min(request.integer("limit", settings.event_page_size), settings.event_page_size)
    records, session.event_cursor = _page(session, session.event_cursor, limit)
    return {"events": records, "cursor": session.event_cursor, "more": session.event_cursor < len(session.world.events)}


def _activate_button(session: Session, request: ToolRequest) -> dict[str, Any]:
    world = session.world
    buttons = [pos for pos, state in world.scan_region(session.spec.world) if state.kind == BlockKind.BUTTON]
    if not buttons:
        raise NoButtonError()
    if len(buttons) > 1:
        raise MultipleButtonsError(", ".join(map(str, buttons)))
    session.budget.consume()
    start = len(world.events)
    press = press_button(world, buttons[0])
    ticks = run_until_quiescent(world, world.config.max_settle_ticks)
    records, end = _page(session, start, settings.event_page_size)
    return {
        "button": buttons[0].to_list(),
        "press_tick": press,
        "ticks": ticks,
        "events": records,
        "truncated": end < len(world.events),
        "trials_left": session.budget.remaining,
    }


_HANDLERS = {
    Tool.GET_BLOCK_STATE: _get_block_state,
    Tool.GET_EVENT_STREAM: _get_event_stream,
    Tool.SCAN_REDSTONE_AREA: _scan_redstone_area,
    Tool.SET_BLOCK: _set_block,
    Tool.ACTIVATE_BUTTON: _activate_button,
}


def _error_response(request_id: str | None, error: Exception) -> ToolResponse:
    if isinstance(error, RedbenchError):
        return ToolResponse(request_id, error={"code": error.code, "message": error.error_message})
    log.error("Unexpected error while handling a tool call", exc_info=error)
    return ToolResponse(request_id, error={"code": "internal-error", "message": "An unknown exception occured."})


def handle(session: Session, request: ToolRequest) -> ToolResponse:
    """
    Answer one tool call. Errors are returned in the response, never raised, and every call is
    appended to the transcript.

    A button activation consumes one trial and returns the raw block changes it caused. No
    response ever says whether the task is solved.
    """
    try:
        if session.closed:
            raise SessionClosedError()
        response = ToolResponse(request.id, result=_HANDLERS[request.tool](session, request))
    except Exception as e:
        response = _error_response(request.id, e)
        if response.error and response.error["code"] == "budget-exhausted":
            metrics.budget_exhausted.inc()
    outcome = response.error["code"] if response.error else "ok"
    log.debug(f"{request.tool.value} #{request.id}: {outcome}", extra={"tick": session.world.clock})
    metrics.gateway_requests.labels(request.tool.value, "ok" if response.ok else "error").inc()
    session.transcript.append((request, response))
    return response


def handle_line(session: Session, line: str) -> str:
    """
    Answer one request line of the wire protocol with one response line, without the newline.
    """
    request_id: str | None = None
    try:
        data = json.loads(line)
        if isinstance(data, dict) and isinstance(data.get("id"), str):
            request_id = data["id"]
        request = ToolRequest.from_dict(data)
    except json.JSONDecodeError as e:
        error: Exception = BadRequestError(f"invalid JSON at column {e.colno}: {e.msg}")
    except RedbenchError as e:
        error = e
    else:
        return handle(session, request).to_line()
    response = _error_response(request_id, error)
    metrics.gateway_requests.labels("unknown", "error").inc()
    session.transcript.append((None, response))
    return response.to_line()


def replay(spec: TaskSpec, lines: Iterable[str], budget: int | None = None) -> list[str]:
    """
    Run request lines against a fresh session of `spec` and return the response lines.
    """
    session = open_session(spec, budget)
    return [handle_line(session, line) for line in lines if line.strip()]


def submit(session: Session) -> tuple[Verdict, LampTrace | None, dict[str, int]]:
    """
    Grade the session's device and close the session. The grading press is not a verification trial
    and works with an exhausted budget.

    Returns
    -------
    tuple[Verdict, LampTrace | None, dict[str, int]]
        The verdict, the trace of the first test case (`None` when static rules failed) and the
        session metrics: `trials_used`, `placements` and `revisions`.
    """
    if session.closed:
        raise SessionClosedError()
    verdict, trace = evaluate(session.world.snapshot(), session.spec)
    session.closed = True
    result = session.metrics()
    log.info(
        f"Submitted {session.spec.task_id}: {'pass' if verdict.passed else 'fail'} "
        f"after {result['trials_used']} trial(s) and {result['placements']} placement(s)"
        extra={"tick": session.world.clock},
    )
    return verdict, trace, result
