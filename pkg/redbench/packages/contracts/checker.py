"""
Temporal contracts over lamp traces, and the static rules a submitted device must follow.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

from redbench.core import metrics
from redbench.core.engine import compute_wire_shape, press_button, step
from redbench.core.world import HORIZONTAL, STONE, BlockKind, Pos, Region, World
from redbench.packages.tasks.models import (
    PRESS_ACTION,
    BranchReachContract,
    EqualDelayContract,
    PulseContract,
    SequentialContract,
    SimultaneousContract,
    Step,
    TaskSpec,
    TestCase,
    planar_distance,
)

from .errors import LengthMismatchError, MissingButtonError, MissingLampError
from .models import LampTrace, Verdict, Violation

log = logging.getLogger("redbench.packages.contracts")


def record_trace(world: World, spec: TaskSpec, horizon: int | None = None) -> LampTrace:
    """
    Press the task's button and record every output lamp at each tick until the world settles.

    Parameters
    ----------
    world: World
        The device under test. It is left in its post-test state.
    spec: TaskSpec
        The task declaring the button and the lamps.
    horizon: int | None
        Maximum ticks recorded after the press, `max_settle_ticks` of the world by default.

    Raises
    ------
    MissingButtonError
        No button at the declared input.
    MissingLampError
        Some declared outputs hold no lamp, all of them are listed.
    """
    horizon = horizon or world.config.max_settle_ticks
    if world.get_block(spec.inputs.pos).kind != BlockKind.BUTTON:
        raise MissingButtonError(spec.inputs.pos)
    if missing := [x for x in spec.outputs if world.get_block(x).kind != BlockKind.LAMP]:
        raise MissingLampError(", ".join(map(str, missing)))

    def sample() -> tuple[bool, ...]:
        return tuple(world.get_block(x).lit for x in spec.outputs)

    initial = sample()
    press = press_button(world, spec.inputs.pos)
    grid = [sample()]
    for _ in range(horizon):
        events = step(world)
        grid.append(sample())
        if not events and not world.scheduled:
            break
    else:
        log.debug(f"Trace of {spec.task_id} cut at the {horizon} tick horizon")
    return LampTrace(press, tuple(spec.outputs), initial, tuple(grid))


def _activation_violations(trace: LampTrace) -> list[Violation]:
    violations = []
    for i, (before, onset) in enumerate(zip(trace.initial, trace.onsets)):
        if before:
            violations.append(Violation("pre-lit", (i,), measured=trace.press_tick, allowed="dark before the press"))
        elif onset is None:
            violations.append(Violation("never-lit", (i,), measured=None, allowed=f"lit by tick {trace.end_tick}"))
    return violations


def _summary(trace: LampTrace) -> str:
    return f"{trace.lit_count}/{len(trace.lamps)} lamps lit"


def check_simultaneous(trace: LampTrace, tol: int = 1) -> Verdict:
    """
    Every lamp lights, and the earliest and latest onsets are at most `tol` ticks apart.
    """
    violations = _activation_violations(trace)
    onsets = trace.onsets
    if not violations and onsets:
        times = [x for x in onsets if x is not None]
        first, last = onsets.index(min(times)), onsets.index(max(times))
        spread = max(times) - min(times)
        if spread > tol:
            violations.append(Violation("skew", (first, last), measured=spread, allowed=tol))
    return Verdict(violations, _summary(trace))


def check_sequential(trace: LampTrace, deltas: Sequence[int], tol: int = 1) -> Verdict:
    """
    Lamps light in output order, each stage `deltas[i]` ticks after the previous one within `tol`.

    Raises
    ------
    LengthMismatchError
        `deltas` does not have one entry less than the lamp count.
    """
    if len(deltas) != len(trace.lamps) - 1:
        raise LengthMismatchError(f"{len(trace.lamps)} lamps need {len(trace.lamps) - 1} delays, got {len(deltas)}")
    violations = _activation_violations(trace)
    onsets = trace.onsets
    for i, delta in enumerate(deltas):
        before, after = onsets[i], onsets[i + 1]
        if before is None or after is None:
            continue
        gap = after - before
        if abs(gap - delta) > tol:
            violations.append(Violation("stage-delay", (i, i + 1), measured=gap, allowed=f"{delta}±{tol}"))
    return Verdict(violations, _summary(trace))


def check_pulse(trace: LampTrace, tau: int, tol: int = 1) -> Verdict:
    """
    Every lamp lights within a tick of the press and goes dark `tau` ticks after it, within `tol`.
    """
    violations = _activation_violations(trace)
    press = trace.press_tick
    for i, (onset, offset) in enumerate(zip(trace.onsets, trace.offsets)):
        if onset is None or trace.initial[i]:
            continue
        if onset > press + 1:
            violations.append(Violation("late-onset", (i,), measured=onset - press, allowed="0-1"))
        if offset is None:
            violations.append(Violation("stuck-on", (i,), measured=None, allowed=f"off by tick {press + tau + tol}"))
        elif abs(offset - press - tau) > tol:
            violations.append(Violation("pulse-width", (i,), measured=offset - press, allowed=f"{tau}±{tol}"))
    return Verdict(violations, _summary(trace))


def wire_degrees(world: World, region: Region | None = None) -> dict[Pos, int]:
    """
    Number of connected wire neighbours of every wire. Two wires are connected when each one's
    shape points at the other.
    """
    wires = {
        pos
        for pos, state in world.blocks.items()
        if state.kind == BlockKind.WIRE and (region is None or region.contains(pos))
    }
    shapes = {pos: compute_wire_shape(world, pos) for pos in wires}
    degrees: dict[Pos, int] = {}
    for pos in sorted(wires):
        degrees[pos] = sum(
            1
            for direction in HORIZONTAL
            if direction in shapes[pos]
            and (pos + direction) in wires
            and direction.opposite in shapes[pos + direction]
        )
    return degrees


def check_t_junction(world: World, spec: TaskSpec) -> Verdict:
    """
    Some wire of the device forks, connecting to three or more other wires.
    """
    degrees = wire_degrees(world, spec.world)
    best = max(degrees.values(), default=0)
    if best >= 3:
        return Verdict([], f"widest wire fork has {best} branches")
    return Verdict([Violation("t-junction", measured=best, allowed=">= 3")], "no wire forks into three branches")


def check_static(world: World, spec: TaskSpec) -> Verdict:
    """
    Region, palette, input and output rules, checked on the block layout alone.
    """
    violations: list[Violation] = []
    region = spec.world
    allowed = spec.allowed_kinds
    buttons: list[Pos] = []
    repeaters = 0
    for pos, state in sorted(world.blocks.items(), key=lambda item: item[0]):
        if world.is_floor(pos, region) and state == STONE:
            continue
        if not region.contains(pos):
            violations.append(Violation("out-of-region", pos=pos, measured=state.kind.value, allowed=region.radius))
            continue
        if state.kind not in allowed:
            violations.append(Violation("out-of-palette", pos=pos, measured=state.kind.value, allowed="palette"))
        if state.kind == BlockKind.BUTTON:
            buttons.append(pos)
        elif state.kind == BlockKind.REPEATER:
            repeaters += 1

    for i, pos in enumerate(spec.outputs):
        if world.get_block(pos).kind != BlockKind.LAMP:
            violations.append(Violation("missing-lamp", (i,), pos=pos, measured=world.get_block(pos).kind.value))
    if len(buttons) != 1:
        violations.append(Violation("button-count", pos=spec.inputs.pos, measured=len(buttons), allowed=1))
    elif buttons[0] != spec.inputs.pos:
        violations.append(Violation("button-position", pos=buttons[0], measured=buttons[0].to_list()))

    match spec.contract:
        case BranchReachContract(require_repeaters=True) if repeaters == 0:
            violations.append(Violation("repeaters-required", measured=0, allowed=">= 1"))
        case EqualDelayContract(distance_buckets=buckets):
            for i, pos in enumerate(spec.outputs):
                if (distance := planar_distance(region.anchor, pos)) not in buckets:
                    violations.append(Violation("distance-bucket", (i,), pos=pos, measured=distance, allowed=buckets))

    diagnostics = "static rules hold" if not violations else f"{len(violations)} static rule(s) broken"
    return Verdict(violations, diagnostics)


def _default_checks(spec: TaskSpec) -> list[Step]:
    match spec.contract:
        case SimultaneousContract(skew_tol=tol) | EqualDelayContract(skew_tol=tol):
            steps = [Step("check_simultaneous", {"tol": tol})]
        case BranchReachContract(skew_tol=tol, require_t_junction=junction):
            steps = [Step("check_simultaneous", {"tol": tol})]
            if junction:
                steps.append(Step("check_t_junction"))
        case SequentialContract(tol=tol):
            steps = [Step("check_sequential", {"tol": tol})]
        case PulseContract(tau=tau, tol=tol):
            steps = [Step("check_pulse", {"tau": tau, "tol": tol})]
    return steps


def _run_check(step_: Step, spec: TaskSpec, world: World, trace: LampTrace) -> Verdict:
    contract = spec.contract
    params = step_.params
    match step_.action:
        case "check_simultaneous":
            default = contract.skew_tol if hasattr(contract, "skew_tol") else 1
            return check_simultaneous(trace, params.get("tol", default))
        case "check_sequential":
            deltas = params.get("deltas", getattr(contract, "deltas", ()))
            return check_sequential(trace, deltas, params.get("tol", getattr(contract, "tol", 1)))
        case "check_pulse":
            tau = params.get("tau", getattr(contract, "tau", None))
            return check_pulse(trace, tau, params.get("tol", getattr(contract, "tol", 1)))
        case "check_t_junction":
            return check_t_junction(world, spec)
        case "check_static":
            return check_static(world, spec)
    raise ValueError(f"unknown check {step_.action!r}")


def run_test_case(world: World, spec: TaskSpec, case: TestCase) -> tuple[Verdict, LampTrace]:
    """
    Press the button on `world`, then run the case's checks together with the family's own checks.
    """
    trace = record_trace(world, spec)
    steps = [x for x in case.sequence if x.action != PRESS_ACTION]
    for default in _default_checks(spec):
        if all(x.action != default.action for x in steps):
            steps.append(default)
    verdict = Verdict(diagnostics=f"{case.name}: {trace.lit_count}/{len(trace.lamps)} lamps lit")
    for step_ in steps:
        result = _run_check(step_, spec, world, trace)
        verdict = Verdict(verdict.violations + result.violations, verdict.diagnostics)
    return verdict, trace


def evaluate(world: World, spec: TaskSpec) -> tuple[Verdict, LampTrace | None]:
    """
    Grade a device: static rules first, then every test case on its own copy of the world.

    Returns
    -------
    tuple[Verdict, LampTrace | None]
        The combined verdict and the trace of the first test case. The trace is `None` when the
        static rules already failed.
    """
    family = spec.family.value
    with metrics.evaluation_duration.labels(family).time():
        verdict = check_static(world, spec)
        if not verdict.passed:
            metrics.evaluations.labels(family, "static-fail").inc()
            return verdict, None
        first: LampTrace | None = None
        for case in spec.test_cases:
            result, trace = run_test_case(world.snapshot(), spec, case)
            verdict = verdict.merge(result)
            first = first or trace
    outcome = "pass" if verdict.passed else "fail"
    metrics.evaluations.labels(family, outcome).inc()
    log.info(f"Evaluated {spec.task_id}: {outcome}, {len(verdict.violations)} violation(s)")
    return verdict, first
