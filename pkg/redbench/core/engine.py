"""
Tick-stepped signal propagation over a `World`.

Within a tick dust is instantaneous: wire levels, wire shapes and lamps are derived from the current
state of buttons, repeaters and torches in a single pass. Only repeater outputs, torch flips and button
releases carry latency, through the world's queue of scheduled changes.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

from redbench.core import metrics
from redbench.core.errors import AlreadyPressedError, NoButtonAtPosError, NotAWireError
from redbench.core.world import ALL_DIRECTIONS, HORIZONTAL, BlockKind, ChangeKind, Direction, Event, Pos, World

log = logging.getLogger("redbench.core.engine")

MAX_POWER = 15


@dataclass
class PowerSnapshot:
    """
    Power levels derived from the current world state.

    Attributes
    ----------
    strong: dict[Pos, int]
        Power injected into opaque blocks by buttons, repeaters and torches. Such blocks drive adjacent dust.
    weak: dict[Pos, int]
        Power received by opaque blocks from dust. Activates lamps, torches and repeaters but never
        re-enters the dust network.
    wire_levels: dict[Pos, int]
        Level of every wire in the world.
    """

    strong: dict[Pos, int] = field(default_factory=dict)
    weak: dict[Pos, int] = field(default_factory=dict)
    wire_levels: dict[Pos, int] = field(default_factory=dict)

    def power(self, pos: Pos) -> int:
        return max(self.strong.get(pos, 0), self.weak.get(pos, 0))


def compute_wire_shape(world: World, pos: Pos) -> frozenset[Direction]:
    """
    Horizontal directions the wire at `pos` connects toward.

    A neighbour connects if it is a wire, a torch, a button, or a repeater on the same axis. A dead end
    extends opposite its only neighbour and an isolated wire is a cross.
    """
    if world.get_block(pos).kind != BlockKind.WIRE:
        raise NotAWireError(pos)
    connected: set[Direction] = set()
    for direction in HORIZONTAL:
        neighbour = world.get_block(pos + direction)
        match neighbour.kind:
            case BlockKind.WIRE | BlockKind.TORCH | BlockKind.BUTTON:
                connected.add(direction)
            case BlockKind.REPEATER if neighbour.facing in (direction, direction.opposite):
                connected.add(direction)
    if len(connected) == 1:
        connected.add(next(iter(connected)).opposite)
    elif not connected:
        connected.update(HORIZONTAL)
    return frozenset(connected)


def _strong_power(world: World) -> dict[Pos, int]:
    strong: dict[Pos, int] = {}
    for pos, state in world.blocks.items():
        target: Pos | None = None
        match state.kind:
            case BlockKind.BUTTON if state.pressed:
                assert state.facing
                target = pos - state.facing
            case BlockKind.REPEATER if state.powered:
                assert state.facing
                target = pos + state.facing
            case BlockKind.TORCH if state.lit:
                target = pos + Direction.UP
        if target is not None and world.get_block(target).is_opaque:
            strong[target] = MAX_POWER
    return strong


def _feeds_wire(world: World, wire: Pos, strong: dict[Pos, int]) -> bool:
    for direction in ALL_DIRECTIONS:
        source = wire + direction
        state = world.get_block(source)
        match state.kind:
            case BlockKind.STONE | BlockKind.LAMP if strong.get(source, 0) > 0:
                return True
            case BlockKind.REPEATER if state.powered and state.facing == direction.opposite:
                return True
            case BlockKind.TORCH if state.lit:
                assert state.attached
                if source + state.attached != wire:
                    return True
            case BlockKind.BUTTON if state.pressed:
                return True
    return False


def recompute_power(world: World, shapes: dict[Pos, frozenset[Direction]] | None = None) -> PowerSnapshot:
    """
    Propagate power through the dust network.

    Every wire fed directly by a source starts at 15 and each wire-to-wire hop costs one level.
    Connectivity is same-level and axis-aligned only.

    Parameters
    ----------
    world: World
        The world to read. It is not modified.
    shapes: dict[Pos, frozenset[Direction]] | None
        Precomputed wire shapes, computed here when omitted.
    """
    wires = [pos for pos, state in world.blocks.items() if state.kind == BlockKind.WIRE]
    if shapes is None:
        shapes = {pos: compute_wire_shape(world, pos) for pos in wires}
    snapshot = PowerSnapshot(strong=_strong_power(world))

    distance: dict[Pos, int] = {}
    queue: deque[Pos] = deque()
    for pos in sorted(wires):
        if _feeds_wire(world, pos, snapshot.strong):
            distance[pos] = 0
            queue.append(pos)
    while queue:
        pos = queue.popleft()
        hops = distance[pos] + 1
        if hops >= MAX_POWER:
            continue
        for direction in HORIZONTAL:
            neighbour = pos + direction
            if neighbour in distance or world.get_block(neighbour).kind != BlockKind.WIRE:
                continue
            distance[neighbour] = hops
            queue.append(neighbour)

    for pos in wires:
        level = max(0, MAX_POWER - distance[pos]) if pos in distance else 0
        snapshot.wire_levels[pos] = level
        if level == 0:
            continue
        targets = [pos + Direction.DOWN] + [pos + d for d in shapes[pos]]
        for target in targets:
            if world.get_block(target).is_opaque:
                snapshot.weak[target] = max(snapshot.weak.get(target, 0), level)
    return snapshot


def _repeater_input(world: World, pos: Pos, facing: Direction, snapshot: PowerSnapshot) -> bool:
    behind = pos - facing
    state = world.get_block(behind)
    match state.kind:
        case BlockKind.WIRE:
            return snapshot.wire_levels.get(behind, 0) > 0 and facing in compute_wire_shape(world, behind)
        case BlockKind.STONE | BlockKind.LAMP:
            return snapshot.power(behind) > 0
        case BlockKind.REPEATER:
            return state.powered and state.facing == facing
        case BlockKind.TORCH:
            return state.lit
        case BlockKind.BUTTON:
            return state.pressed
    return False


def _repeater_locked(world: World, pos: Pos, facing: Direction) -> bool:
    for side in facing.perpendicular():
        state = world.get_block(pos + side)
        if state.kind == BlockKind.REPEATER and state.facing == side.opposite and state.powered:
            return True
    return False


def _lamp_lit(world: World, pos: Pos, snapshot: PowerSnapshot) -> bool:
    if snapshot.power(pos) > 0:
        return True
    for direction in ALL_DIRECTIONS:
        neighbour = pos + direction
        state = world.get_block(neighbour)
        match state.kind:
            case BlockKind.STONE | BlockKind.LAMP if snapshot.power(neighbour) > 0:
                return True
            case BlockKind.TORCH if state.lit:
                assert state.attached
                if neighbour + state.attached != pos:
                    return True
            case BlockKind.BUTTON if state.pressed:
                return True
            case BlockKind.REPEATER if state.powered and state.facing == direction.opposite:
                return True
    return False


def settle(world: World):
    """
    Bring every derived state up to date at the current tick without advancing the clock.

    Wires and lamps are written immediately. Repeaters and torches whose input disagrees with their
    output get a change scheduled after their delay.
    """
    wires = sorted(pos for pos, state in world.blocks.items() if state.kind == BlockKind.WIRE)
    shapes = {pos: compute_wire_shape(world, pos) for pos in wires}
    snapshot = recompute_power(world, shapes)
    for pos in wires:
        state = world.get_block(pos)
        world.update_block(pos, state.evolve(power=snapshot.wire_levels[pos], shape=shapes[pos]))

    for pos, state in sorted(world.blocks.items(), key=lambda item: item[0]):
        match state.kind:
            case BlockKind.REPEATER:
                assert state.facing
                locked = _repeater_locked(world, pos, state.facing)
                if locked != state.locked:
                    world.update_block(pos, state.evolve(locked=locked))
                if locked or world.pending_at(pos):
                    continue
                wanted = _repeater_input(world, pos, state.facing, snapshot)
                if wanted != state.powered:
                    world.schedule(state.delay, pos, ChangeKind.REPEATER_OUTPUT, wanted)
            case BlockKind.TORCH:
                assert state.attached
                wanted = snapshot.power(pos + state.attached) == 0
                if wanted != state.lit and not world.pending_at(pos):
                    world.schedule(1, pos, ChangeKind.TORCH_FLIP, wanted)
            case BlockKind.LAMP:
                lit = _lamp_lit(world, pos, snapshot)
                if lit != state.lit:
                    world.update_block(pos, state.evolve(lit=lit))


def _fire(world: World, pos: Pos, change: ChangeKind, value: bool):
    state = world.get_block(pos)
    match change:
        case ChangeKind.BUTTON_RELEASE if state.kind == BlockKind.BUTTON:
            world.update_block(pos, state.evolve(pressed_until=None))
        case ChangeKind.REPEATER_OUTPUT if state.kind == BlockKind.REPEATER:
            if not state.locked:
                world.update_block(pos, state.evolve(powered=value))
        case ChangeKind.TORCH_FLIP if state.kind == BlockKind.TORCH:
            world.update_block(pos, state.evolve(lit=value))
        case _:
            log.debug(f"Dropping {change} at {pos}, the block was replaced", extra={"tick": world.clock})


def step(world: World) -> list[Event]:
    """
    Advance the clock by one tick, fire the changes that are due, then settle.

    Returns
    -------
    list[Event]
        Events produced during this tick.
    """
    world.clock += 1
    start = len(world.events)
    for change in world.pop_due():
        _fire(world, change.pos, change.change, change.value)
    settle(world)
    metrics.ticks_simulated.inc()
    return world.events[start:]


def press_button(world: World, pos: Pos) -> int:
    """
    Press the button at `pos`. Its support is strongly powered until the configured pulse elapses.

    Returns
    -------
    int
        The press tick.

    Raises
    ------
    NoButtonAtPosError
        Nothing pressable at this position.
    AlreadyPressedError
        The button has not been released yet.
    """
    state = world.get_block(pos)
    if state.kind != BlockKind.BUTTON:
        raise NoButtonAtPosError(pos)
    if state.pressed:
        raise AlreadyPressedError(pos)
    pulse = world.config.button_pulse_ticks
    world.update_block(pos, state.evolve(pressed_until=world.clock + pulse))
    world.schedule(pulse, pos, ChangeKind.BUTTON_RELEASE)
    settle(world)
    metrics.button_presses.inc()
    return world.clock


def run_until_quiescent(world: World, max_ticks: int) -> int:
    """
    Step until a full tick produces no event and nothing is scheduled.

    Returns
    -------
    int
        Ticks elapsed, equal to `max_ticks` when the device never settles.
    """
    if max_ticks < 1:
        raise ValueError("max_ticks must be at least 1")
    for elapsed in range(1, max_ticks + 1):
        events = step(world)
        if not events and not world.scheduled:
            return elapsed
    log.debug(f"World did not settle within {max_ticks} ticks", extra={"tick": world.clock})
    return max_ticks
