"""
Reference devices: parameterized constructors that satisfy each family contract.

Layouts are drawn for the east arm in local coordinates (x outward, z sideways) and rotated onto
the other three arms. Arms own disjoint wedges around the anchor, so rotated copies never touch.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from itertools import pairwise, product

from redbench.core.engine import MAX_POWER
from redbench.core.world import BlockKind, BlockState, Direction, Pos
from redbench.packages.tasks.models import (
    LAMP_SCHEDULE,
    BranchReachContract,
    EqualDelayContract,
    PulseContract,
    SequentialContract,
    SimultaneousContract,
    TaskSpec,
)
from redbench.settings import settings

from .errors import RegionOverflowError, UnsupportedNError, UnsupportedTauError
from .models import Blueprint, Device, PulseExtender

log = logging.getLogger("redbench.packages.devices")

ARMS = (Direction.NORTH, Direction.EAST, Direction.SOUTH, Direction.WEST)
ARM_TURNS = {Direction.EAST: 0, Direction.NORTH: 1, Direction.WEST: 2, Direction.SOUTH: 3}
_TURN = {
    Direction.EAST: Direction.NORTH,
    Direction.NORTH: Direction.WEST,
    Direction.WEST: Direction.SOUTH,
    Direction.SOUTH: Direction.EAST,
}

# (branch column, branch wire count) for each side of the east arm, the lamp sits past the last wire
_HUB_BRANCHES: dict[int, list[tuple[int, int]]] = {
    4: [],
    8: [(3, 1)],
    16: [(3, 1), (5, 2)],
    32: [(3, 1), (5, 2), (7, 4), (9, 3)],
    64: [(3, 1), (5, 2), (7, 4), (9, 3)],
}
_HUB_AXIS_END = {4: 2, 8: 3, 16: 5, 32: 9, 64: 9}
# lamps lit through their neighbour, one next to each branch lamp of the 64-lamp hub
_PIGGYBACK = [(4, 2), (5, 4), (7, 6), (9, 5)]

# one lamp slot per distance bucket in each arm, (column, side offset)
EQUAL_DELAY_SLOTS: dict[int, tuple[int, int]] = {4: (2, 2), 8: (5, -3), 12: (7, 5), 16: (9, -7)}

PULSE_TOLERANCE = 1


def rotate(x: int, z: int, turns: int) -> tuple[int, int]:
    """
    Rotate a plane offset a quarter turn counter-clockwise (east to north) `turns` times.
    """
    for _ in range(turns % 4):
        x, z = z, -x
    return x, z


def rotate_direction(direction: Direction, turns: int) -> Direction:
    for _ in range(turns % 4):
        direction = _TURN[direction]
    return direction


def arm_of(x: int, z: int) -> tuple[Direction, int, int]:
    """
    Find the arm owning a plane offset, and the offset in that arm's local coordinates.

    The east arm owns the wedge `x > 0, -x < z <= x`, the others its rotations.
    """
    for direction in ARMS:
        lx, lz = rotate(x, z, -ARM_TURNS[direction])
        if lx > 0 and -lx < lz <= lx:
            return direction, lx, lz
    raise ValueError("the anchor itself belongs to no arm")


class _Arm:
    def __init__(self, blueprint: Blueprint, direction: Direction):
        self.blueprint = blueprint
        self.turns = ARM_TURNS[direction]

    def put(self, x: int, z: int, state: BlockState, y: int = 0):
        if state.kind == BlockKind.REPEATER:
            assert state.facing
            state = state.evolve(facing=rotate_direction(state.facing, self.turns))
        wx, wz = rotate(x, z, self.turns)
        self.blueprint.put(wx, wz, state, y)

    def axis(self, start: int, end: int, root_delays: Sequence[int] = ()):
        """
        Lay the trunk from `start` to `end`, beginning with a repeater per entry of `root_delays`.
        """
        for x in range(start, end + 1):
            index = x - start
            if index < len(root_delays):
                self.put(x, 0, BlockState.repeater(Direction.EAST, root_delays[index]))
            else:
                self.put(x, 0, BlockState.wire())

    def branch(self, column: int, side: int, length: int, lamp: bool = True):
        for k in range(1, length + 1):
            self.put(column, side * k, BlockState.wire())
        if lamp:
            self.put(column, side * (length + 1), BlockState.lamp())


def _hub_source(blueprint: Blueprint):
    blueprint.put(0, 0, BlockState.stone())
    blueprint.put(0, 0, BlockState.button(Direction.UP), y=1)


def _lay_extender(blueprint: Blueprint, extender: PulseExtender):
    """
    Lay a pulse extender two blocks under the hub.

    Dust under the button support only hears the button, never the hub's own dust. It powers a block
    at depth two, where a radial repeater per arm drives a hub stone. From each hub stone a short
    repeater, and the long detour when there is one, end in a collector block under the next arm.
    Dust on the collector lifts the copy to the floor, where a repeater strongly powers the floor
    cell under the arm's second trunk cell.
    """
    floor, deep = -1, -2
    blueprint.put(0, 0, BlockState.wire(), y=floor)
    blueprint.put(0, 0, BlockState.stone(), y=deep)
    path = [
        (1, 0, BlockState.repeater(Direction.EAST, extender.radial)),
        (2, 0, BlockState.stone()),
        (2, -1, BlockState.repeater(Direction.NORTH, extender.short)),
        (2, 1, BlockState.stone()),
        (2, 2, BlockState.stone()),
    ]
    if extender.long:
        outward, back, inward = extender.long
        path += [
            (3, 0, BlockState.repeater(Direction.EAST, outward)),
            (4, 0, BlockState.stone()),
            (4, 1, BlockState.repeater(Direction.SOUTH, back)),
            (4, 2, BlockState.stone()),
            (3, 2, BlockState.repeater(Direction.WEST, inward)),
        ]
    for direction in ARMS:
        arm = _Arm(blueprint, direction)
        for x, z, state in path:
            arm.put(x, z, state, y=deep)
            if state.kind == BlockKind.REPEATER:
                arm.put(x, z, BlockState.stone(), y=deep - 1)
        arm.put(2, 2, BlockState.wire(), y=floor)
        arm.put(2, 1, BlockState.repeater(Direction.NORTH, extender.merge), y=floor)


def hub_layout(
    n: int,
    *,
    arms: Iterable[Direction] = ARMS,
    root_repeater: bool = False,
    extender: PulseExtender | None = None,
    name: str | None = None,
) -> Device:
    """
    The nested hub: a strongly powered block under the button, one trunk per arm, symmetric branch
    wires ending in lamps.

    Parameters
    ----------
    n: int
        Lamp count of the full four-arm hub, one of 4, 8, 16, 32 or 64.
    arms: Iterable[Direction]
        Arms to build. Lamps are listed arm by arm in this order.
    root_repeater: bool
        Start every trunk with a one-tick repeater. Always the case from 32 lamps on, where dust alone
        cannot reach the outer ring.
    extender: PulseExtender | None
        Lay this pulse extender under the hub, see `plan_extender`.
    """
    if n not in _HUB_BRANCHES:
        raise UnsupportedNError(n)
    blueprint = Blueprint(name or f"hub-{n}")
    _hub_source(blueprint)
    roots = [1] if root_repeater or n >= 32 else []
    for direction in arms:
        arm = _Arm(blueprint, direction)
        if n == 4:
            arm.put(3, 0, BlockState.lamp())
        for column, length in _HUB_BRANCHES[n]:
            for side in (1, -1):
                arm.branch(column, side, length)
        if n == 64:
            for column, offset in _PIGGYBACK:
                for side in (1, -1):
                    arm.put(column, side * offset, BlockState.lamp())
        arm.axis(1, _HUB_AXIS_END[n], roots)
    if extender is not None:
        _lay_extender(blueprint, extender)
    return blueprint.build()


def hub_size(n: int) -> int:
    """
    Lamp count of the smallest nested hub with at least `n` lamps.
    """
    for size in LAMP_SCHEDULE:
        if n >= 1 and size >= n:
            return size
    raise UnsupportedNError(n)


def build_simultaneous(n: int) -> Device:
    """
    A four-fold symmetric fanout lighting `n` lamps on the same tick.

    Raises
    ------
    UnsupportedNError
        `n` is not one of 4, 8, 16, 32 or 64.
    """
    return hub_layout(n, name=f"simultaneous-{n}")


def build_branch_reach(n: int) -> Device:
    """
    Same as the nested hub, except the four lamp case that uses two arms of the eight lamp hub so
    the trunk still forks.
    """
    if n == 4:
        return hub_layout(8, arms=(Direction.EAST, Direction.WEST), name="branch-reach-4")
    return hub_layout(n, name=f"branch-reach-{n}")


def compose_delay(target: int) -> list[int]:
    """
    Split a latency into repeater settings of 1 to 4 ticks, largest first, using as few repeaters
    as possible.
    """
    if target < 1:
        raise ValueError(f"a delay must be at least one tick, got {target}")
    fours, remainder = divmod(target, 4)
    return [4] * fours + ([remainder] if remainder else [])


def _serpentine(radius: int) -> list[tuple[int, int]]:
    """
    Cells of a folded path starting east of the anchor. Rows are two cells apart so that only
    consecutive cells of the path are adjacent. The path fills the rows north of the anchor first,
    comes back down the west border, then fills the rows to the south.
    """
    z_max = radius - radius % 2
    west = -radius + 2
    north_rows = list(range(-2, -z_max - 1, -2))
    if len(north_rows) % 2 == 0:
        north_rows = north_rows[:-1]

    waypoints = [(1, 0), (radius, 0)]
    heading_west = True
    for z in north_rows:
        ends = [(radius, z), (west, z)]
        waypoints += ends if heading_west else ends[::-1]
        heading_west = not heading_west
    if north_rows:
        waypoints += [(-radius, north_rows[-1]), (-radius, 2), (radius, 2)]
        heading_west = True
        for z in range(4, z_max + 1, 2):
            ends = [(radius, z), (-radius, z)]
            waypoints += ends if heading_west else ends[::-1]
            heading_west = not heading_west

    cells = [waypoints[0]]
    for (x0, z0), (x1, z1) in pairwise(waypoints):
        dx = (x1 > x0) - (x1 < x0)
        dz = (z1 > z0) - (z1 < z0)
        x, z = x0, z0
        while (x, z) != (x1, z1):
            x, z = x + dx, z + dz
            cells.append((x, z))
    return cells


def _step_direction(a: tuple[int, int], b: tuple[int, int]) -> Direction:
    match (b[0] - a[0], b[1] - a[1]):
        case (1, 0):
            return Direction.EAST
        case (-1, 0):
            return Direction.WEST
        case (0, 1):
            return Direction.SOUTH
        case _:
            return Direction.NORTH


def build_delay_line(deltas: Sequence[int], radius: int | None = None) -> Device:
    """
    A serial chain of lamps and repeaters. Each lamp is strongly powered by the repeater in front of
    it and drives the next repeater, so the gap between two stages is exactly the sum of the repeater
    delays between them.

    The chain starts with a wire next to the button's support, folds into rows two cells apart and
    turns only on lamps or on filler wires.

    Parameters
    ----------
    deltas: Sequence[int]
        Delay between consecutive stages, one entry less than the lamp count.
    radius: int | None
        Half-width of the build region, the configured radius by default.

    Raises
    ------
    RegionOverflowError
        The chain is longer than the folded path inside the region.
    """
    radius = radius or settings.radius
    if any(d < 1 for d in deltas):
        raise ValueError("stage delays must be at least one tick")
    cells = _serpentine(radius)
    elements: list[BlockState] = [BlockState.wire(), BlockState.lamp()]
    for delta in deltas:
        elements += [BlockState.repeater(Direction.EAST, d) for d in compose_delay(delta)]
        elements.append(BlockState.lamp())

    def outgoing(i: int) -> Direction:
        if i + 1 < len(cells):
            return _step_direction(cells[i], cells[i + 1])
        return _step_direction(cells[i - 1], cells[i])

    def straight(i: int) -> bool:
        return 0 < i < len(cells) - 1 and outgoing(i - 1) == outgoing(i)

    blueprint = Blueprint(f"delay-line-{len(deltas) + 1}")
    _hub_source(blueprint)
    fillers = 0
    i = 0
    for element in elements:
        if element.kind == BlockKind.REPEATER:
            while i < len(cells) and not straight(i):
                blueprint.put(*cells[i], BlockState.wire())
                fillers += 1
                i += 1
            element = element.evolve(facing=outgoing(i) if i < len(cells) else Direction.EAST)
        if i >= len(cells):
            raise RegionOverflowError(
                f"{len(elements) + fillers} chain cells needed but the fold inside radius {radius} "
                f"holds {len(cells)} ({len(deltas) + 1} lamps, {len(elements) - len(deltas) - 2} repeaters)"
            )
        blueprint.put(*cells[i], element)
        i += 1
    log.debug(f"Delay line with {len(deltas) + 1} stages uses {i} of {len(cells)} path cells")
    return blueprint.build()


def build_equalized(lamps: Sequence[Pos], radius: int | None = None) -> Device:
    """
    Light lamps at heterogeneous distances on the same tick.

    Each lamp hangs at the tip of a branch leaving its arm's trunk at the lamp's column. A trunk
    whose farthest branch is beyond the reach of dust starts with a regenerating repeater, and every
    other trunk is padded with the same latency so that all paths end up equally slow.

    Parameters
    ----------
    lamps: Sequence[Pos]
        Lamp offsets from the anchor, in the anchor's plane.

    Raises
    ------
    RegionOverflowError
        A lamp cannot be routed: off the anchor plane, too close to its trunk, sharing a branch column
        with a neighbour, or too far even with regeneration.
    """
    radius = radius or settings.radius
    per_arm: dict[Direction, list[tuple[int, int]]] = {}
    for lamp in lamps:
        if lamp.y != 0 or lamp.chebyshev(Pos(0, 0, 0)) > radius:
            raise RegionOverflowError(f"lamp at offset {lamp} is outside the routable plane")
        direction, lx, lz = arm_of(lamp.x, lamp.z)
        if abs(lz) < 2 or lx < 2:
            raise RegionOverflowError(f"lamp at offset {lamp} is too close to the {direction} trunk")
        per_arm.setdefault(direction, []).append((lx, lz))

    inherent: dict[Direction, int] = {}
    for direction, slots in per_arm.items():
        for side in (1, -1):
            columns = sorted(x for x, z in slots if z * side > 0)
            for a, b in pairwise(columns):
                if b - a < 2:
                    raise RegionOverflowError(
                        f"{direction} arm needs branch columns at least two apart, got {a} and {b}"
                    )
        farthest = max((x - 1) + (abs(z) - 1) for x, z in slots)
        # one repeater at the root resets the count one cell further out
        inherent[direction] = 0 if farthest < MAX_POWER else 1
        if farthest - inherent[direction] >= MAX_POWER:
            raise RegionOverflowError(
                f"{direction} arm has branch tips {farthest} hops out, past what one regeneration reaches"
            )
    target = max(inherent.values(), default=0)
    roots = [1] * target
    for direction, latency in inherent.items():
        if latency < target:
            log.debug(f"Padding the {direction} arm by {target - latency} tick(s)")

    blueprint = Blueprint(f"equalized-{len(lamps)}")
    _hub_source(blueprint)
    arms = {direction: _Arm(blueprint, direction) for direction in per_arm}
    for lamp in lamps:
        direction, lx, lz = arm_of(lamp.x, lamp.z)
        side = 1 if lz > 0 else -1
        arms[direction].branch(lx, side, abs(lz) - 1)
    for direction, slots in per_arm.items():
        arms[direction].axis(1, max(x for x, _ in slots), roots)
    return blueprint.build()


def _check_pulse_target(tau: int, n: int):
    if not 4 <= tau <= 12:
        raise UnsupportedTauError(f"tau must be between 4 and 12, got {tau}")
    if n not in _HUB_BRANCHES:
        raise UnsupportedNError(n)


def pulse_root_delay(tau: int, n: int, pulse: int | None = None) -> int:
    """
    Pick the trunk root latency (0 or 1 tick) putting the lamps' off tick closest to `tau`.

    Lamps follow the button, so they turn off `pulse` ticks after the press plus the root latency.
    Lamps cannot go dark while the button still powers the hub: every inversion adds a tick, which
    pushes the onset past the allowed window.

    Raises
    ------
    UnsupportedTauError
        `tau` is outside 4-12, or further than one tick from what the button pulse allows.
    """
    pulse = pulse or settings.button_pulse_ticks
    _check_pulse_target(tau, n)
    options = [1] if n >= 32 else [0, 1]
    delay = min(options, key=lambda d: abs(pulse + d - tau))
    if abs(pulse + delay - tau) > PULSE_TOLERANCE:
        raise UnsupportedTauError(
            f"with a {pulse} tick button pulse the lamps turn off {pulse + delay} ticks after the press, "
            f"tau {tau} needs {tau - PULSE_TOLERANCE} to {tau + PULSE_TOLERANCE}"
        )
    return delay


def _spread(total: int, count: int, most: int) -> tuple[int, ...]:
    delays: list[int] = []
    for left in range(count, 0, -1):
        delay = min(most, total - (left - 1))
        delays.append(delay)
        total -= delay
    return tuple(delays)


def plan_extender(tau: int, n: int, pulse: int | None = None) -> PulseExtender:
    """
    Pick extender delays so that the lamps go dark exactly `tau` ticks after the press.

    The hub's direct pulse lasts `pulse` ticks from the press, one tick later behind root repeaters.
    Each copy from the extender must start before the previous one ends, and no repeater may be
    slower than the pulse is wide, or it would swallow part of it.

    Raises
    ------
    UnsupportedTauError
        `tau` is outside 4-12, shorter than the button pulse, or too long to reach with two copies.
    """
    pulse = pulse or settings.button_pulse_ticks
    _check_pulse_target(tau, n)
    span = tau - pulse
    reach = pulse + (1 if n >= 32 else 0)
    fastest = min(4, pulse)
    delays = range(1, fastest + 1)
    for radial, short, merge in product(delays, repeat=3):
        if radial + short + merge == span <= reach:
            return PulseExtender(radial, short, merge)
    for radial, short, merge in product(delays, repeat=3):
        first = radial + short + merge
        rest = span - radial - merge
        if first <= reach and 0 < span - first <= pulse and 3 <= rest <= 3 * fastest:
            return PulseExtender(radial, short, merge, _spread(rest, 3, fastest))
    if span < 0:
        raise UnsupportedTauError(f"a {pulse} tick button pulse cannot be shortened to {tau} ticks")
    raise UnsupportedTauError(f"a {pulse} tick button pulse cannot be stretched to exactly {tau} ticks")


def build_pulse(tau: int, n: int, pulse: int | None = None) -> Device:
    """
    Fan a pulse of width `tau` out to `n` lamps.

    Near the button's own pulse width, a one-tick repeater at each trunk root is all the shaping
    needed. Longer pulses OR the button pulse with delayed copies from an extender under the hub,
    which keeps the onset on the press tick. Pulses shorter than the button's are not supported.
    """
    name = f"pulse-{tau}-{n}"
    try:
        delay = pulse_root_delay(tau, n, pulse)
    except UnsupportedTauError:
        extender = plan_extender(tau, n, pulse)
        log.debug(f"Extending the button pulse to {tau} ticks with {extender}")
        return hub_layout(n, extender=extender, name=name)
    return hub_layout(n, root_repeater=bool(delay), name=name)


def build_for_task(spec: TaskSpec) -> Device:
    """
    Construct the reference device for a task, anchored on the task's region.
    """
    radius = spec.world.radius
    match spec.contract:
        case SimultaneousContract(n=n):
            device = build_simultaneous(hub_size(n))
        case BranchReachContract(n=n):
            device = build_branch_reach(hub_size(n))
        case SequentialContract(deltas=deltas):
            device = build_delay_line(deltas, radius)
        case EqualDelayContract():
            anchor = spec.world.anchor
            device = build_equalized([x.relative_to(anchor) for x in spec.outputs], radius)
        case PulseContract(n=n, tau=tau):
            device = build_pulse(tau, hub_size(n))
    device.anchor = spec.world.anchor
    return device
