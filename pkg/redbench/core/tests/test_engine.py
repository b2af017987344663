from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redbench.core.engine import (
    MAX_POWER,
    compute_wire_shape,
    press_button,
    recompute_power,
    run_until_quiescent,
    settle,
    step,
)
from redbench.core.errors import AlreadyPressedError, NoButtonAtPosError, NotAWireError
from redbench.core.world import HORIZONTAL, STONE, BlockKind, BlockState, Direction, Pos, Region, World

BUTTON = Pos(0, 4, 0)


def _floored() -> World:
    w = World()
    w.lay_floor(Region(Pos(0, 4, 0), 30))
    return w


def _line(world: World, length: int, lamp: bool = True) -> Pos:
    """
    A button at the origin, `length` wires going east and a lamp after them. Returns the lamp position.
    """
    world.set_block(BUTTON, BlockState.button())
    for x in range(1, length + 1):
        world.set_block(Pos(x, 4, 0), BlockState.wire())
    end = Pos(length + 1, 4, 0)
    if lamp:
        world.set_block(end, BlockState.lamp())
    settle(world)
    return end


def _onsets(world: World, pos: Pos) -> list[int]:
    return [x.tick for x in world.events if x.pos == pos and x.new.lit and not x.old.lit]


def test_isolated_wire_is_a_cross(world: World):
    world.set_block(Pos(1, 4, 1), BlockState.wire())
    assert compute_wire_shape(world, Pos(1, 4, 1)) == frozenset(HORIZONTAL)


def test_dead_end_wire_extends_straight(world: World):
    world.set_block(Pos(1, 4, 0), BlockState.wire())
    world.set_block(Pos(2, 4, 0), BlockState.wire())
    assert compute_wire_shape(world, Pos(2, 4, 0)) == {Direction.EAST, Direction.WEST}


def test_wire_connects_to_repeater_on_its_axis_only(world: World):
    world.set_block(Pos(1, 4, 0), BlockState.wire())
    world.set_block(Pos(2, 4, 0), BlockState.repeater(Direction.NORTH))
    assert compute_wire_shape(world, Pos(1, 4, 0)) == frozenset(HORIZONTAL)
    world.set_block(Pos(2, 4, 0), BlockState.repeater(Direction.EAST))
    assert compute_wire_shape(world, Pos(1, 4, 0)) == {Direction.EAST, Direction.WEST}


def test_wire_shape_needs_a_wire(world: World):
    with pytest.raises(NotAWireError):
        compute_wire_shape(world, Pos(3, 4, 3))


@pytest.mark.parametrize("length", [1, 5, 14, 15, 16, 20])
def test_signal_decays_one_level_per_wire(world: World, length: int):
    _line(world, length, lamp=False)
    press_button(world, BUTTON)
    for x in range(1, length + 1):
        assert world.get_block(Pos(x, 4, 0)).power == max(0, MAX_POWER + 1 - x)


def test_lamp_reach_is_fifteen_wires():
    near = _floored()
    lamp = _line(near, 15)
    press_button(near, BUTTON)
    assert near.get_block(lamp).lit

    far = _floored()
    lamp = _line(far, 16)
    press_button(far, BUTTON)
    run_until_quiescent(far, 50)
    assert not _onsets(far, lamp)


def _oracle_levels(wires: set[tuple[int, int]]) -> dict[tuple[int, int], int]:
    distance: dict[tuple[int, int], int] = {}
    queue: deque[tuple[int, int]] = deque()
    for cell in sorted(wires):
        if abs(cell[0]) + abs(cell[1]) == 1:
            distance[cell] = 0
            queue.append(cell)
    while queue:
        x, z = queue.popleft()
        for nx, nz in ((x + 1, z), (x - 1, z), (x, z + 1), (x, z - 1)):
            if (nx, nz) in wires and (nx, nz) not in distance:
                distance[(nx, nz)] = distance[(x, z)] + 1
                queue.append((nx, nz))
    return {cell: max(0, MAX_POWER - distance[cell]) if cell in distance else 0 for cell in wires}


@settings(max_examples=60, deadline=None)
@given(
    st.sets(
        st.tuples(st.integers(-4, 4), st.integers(-4, 4)).filter(lambda cell: cell != (0, 0)),
        max_size=50,
    )
)
def test_wire_levels_match_breadth_first_distance(wires: set[tuple[int, int]]):
    w = _floored()
    w.set_block(Pos(0, 4, 0), BlockState.torch())
    for x, z in wires:
        w.set_block(Pos(x, 4, z), BlockState.wire())
    levels = recompute_power(w).wire_levels
    assert {(pos.x, pos.z): level for pos, level in levels.items()} == _oracle_levels(wires)


def test_button_pulse_width():
    w = _floored()
    w.set_block(BUTTON, BlockState.button())
    lamp = Pos(1, 4, 0)
    w.set_block(lamp, BlockState.lamp())
    settle(w)
    press = press_button(w, BUTTON)
    assert w.get_block(lamp).lit
    run_until_quiescent(w, 50)
    offs = [x.tick for x in w.events if x.pos == lamp and x.old.lit and not x.new.lit]
    assert offs == [press + w.config.button_pulse_ticks]
    assert not w.get_block(BUTTON).pressed


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=5))
def test_repeater_chain_delay_is_the_sum_of_settings(delays: list[int]):
    w = _floored()
    w.set_block(BUTTON, BlockState.button())
    for i, delay in enumerate(delays, start=1):
        w.set_block(Pos(i, 4, 0), BlockState.repeater(Direction.EAST, delay))
    lamp = Pos(len(delays) + 1, 4, 0)
    w.set_block(lamp, BlockState.lamp())
    settle(w)

    press = press_button(w, BUTTON)
    run_until_quiescent(w, 200)
    assert _onsets(w, lamp)[0] == press + sum(delays)


def test_reversed_repeater_blocks_the_signal():
    forward = _floored()
    forward.set_block(BUTTON, BlockState.button())
    forward.set_block(Pos(1, 4, 0), BlockState.repeater(Direction.EAST))
    forward.set_block(Pos(2, 4, 0), BlockState.lamp())
    press_button(forward, BUTTON)
    run_until_quiescent(forward, 50)
    assert _onsets(forward, Pos(2, 4, 0)) == [1]

    reversed_ = _floored()
    reversed_.set_block(BUTTON, BlockState.button())
    reversed_.set_block(Pos(1, 4, 0), BlockState.repeater(Direction.WEST))
    reversed_.set_block(Pos(2, 4, 0), BlockState.lamp())
    press_button(reversed_, BUTTON)
    run_until_quiescent(reversed_, 50)
    assert _onsets(reversed_, Pos(2, 4, 0)) == []


def test_repeater_regenerates_full_strength():
    w = _floored()
    w.set_block(BUTTON, BlockState.button())
    for x in range(1, 11):
        w.set_block(Pos(x, 4, 0), BlockState.wire())
    w.set_block(Pos(11, 4, 0), BlockState.repeater(Direction.EAST))
    for x in range(12, 27):
        w.set_block(Pos(x, 4, 0), BlockState.wire())
    w.set_block(Pos(27, 4, 0), BlockState.lamp())
    settle(w)
    press_button(w, BUTTON)
    run_until_quiescent(w, 50)
    assert _onsets(w, Pos(27, 4, 0)) == [1]


def test_torch_inverts_after_one_tick():
    w = _floored()
    w.set_block(BUTTON, BlockState.button())
    w.set_block(Pos(1, 4, 0), BlockState.wire())
    w.set_block(Pos(2, 4, 0), BlockState.stone())
    w.set_block(Pos(3, 4, 0), BlockState.torch(Direction.WEST))
    lamp = Pos(4, 4, 0)
    w.set_block(lamp, BlockState.lamp())
    settle(w)
    assert w.get_block(lamp).lit

    press = press_button(w, BUTTON)
    assert w.get_block(lamp).lit
    step(w)
    assert not w.get_block(Pos(3, 4, 0)).lit
    assert not w.get_block(lamp).lit
    assert w.clock == press + 1


def test_press_errors(world: World):
    with pytest.raises(NoButtonAtPosError):
        press_button(world, BUTTON)
    world.set_block(BUTTON, BlockState.button())
    press_button(world, BUTTON)
    with pytest.raises(AlreadyPressedError):
        press_button(world, BUTTON)


def test_run_until_quiescent_stops_at_the_horizon(world: World):
    world.set_block(BUTTON, BlockState.button())
    press_button(world, BUTTON)
    assert run_until_quiescent(world, 3) == 3
    assert world.clock == 3
    assert world.scheduled
    assert run_until_quiescent(world, 50) < 50
    assert not world.scheduled
    with pytest.raises(ValueError):
        run_until_quiescent(world, 0)


def test_simulation_is_deterministic():
    def run() -> list[dict]:
        w = _floored()
        _line(w, 6)
        w.set_block(Pos(3, 4, 1), BlockState.wire())
        w.set_block(Pos(3, 4, 2), BlockState.repeater(Direction.SOUTH, 3))
        w.set_block(Pos(3, 4, 3), BlockState.lamp())
        press_button(w, BUTTON)
        run_until_quiescent(w, 100)
        return [x.to_record() for x in w.events]

    assert run() == run()


def test_lamp_kind_unchanged_by_power(world: World):
    lamp = _line(world, 2)
    press_button(world, BUTTON)
    assert world.get_block(lamp).kind == BlockKind.LAMP


def test_powered_side_repeater_locks():
    w = _floored()
    w.set_block(Pos(2, 4, 2), BlockState.torch())
    w.set_block(Pos(2, 4, 1), BlockState.repeater(Direction.NORTH))
    settle(w)
    step(w)
    assert w.get_block(Pos(2, 4, 1)).powered

    w.set_block(Pos(0, 4, 0), STONE)
    w.set_block(Pos(1, 4, 0), BlockState.button(Direction.EAST))
    w.set_block(Pos(2, 4, 0), BlockState.repeater(Direction.EAST))
    w.set_block(Pos(3, 4, 0), BlockState.lamp())
    settle(w)
    assert w.get_block(Pos(2, 4, 0)).locked

    press_button(w, Pos(1, 4, 0))
    run_until_quiescent(w, 50)
    assert _onsets(w, Pos(3, 4, 0)) == []
