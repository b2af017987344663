import pytest

from redbench.core.errors import InvalidStateError, UnsupportedPlacementError
from redbench.core.world import (
    AIR,
    STONE,
    BlockKind,
    BlockState,
    ChangeKind,
    Direction,
    Pos,
    Region,
    World,
    WorldConfig,
)


def test_absent_positions_read_as_air():
    w = World()
    assert w.get_block(Pos(5, 5, 5)) == AIR
    assert w.blocks == {}


def test_set_block_returns_previous(world: World):
    pos = Pos(1, 4, 0)
    assert world.set_block(pos, BlockState.wire()).is_air
    previous = world.set_block(pos, BlockState.lamp())
    assert previous.kind == BlockKind.WIRE
    assert world.get_block(pos).kind == BlockKind.LAMP

    world.set_block(pos, AIR)
    assert pos not in world.blocks


def test_set_block_records_events(world: World):
    world.set_block(Pos(1, 4, 0), BlockState.lamp())
    world.set_block(Pos(1, 4, 0), AIR)
    assert [(x.old.kind, x.new.kind) for x in world.events] == [
        (BlockKind.AIR, BlockKind.LAMP),
        (BlockKind.LAMP, BlockKind.AIR),
    ]
    record = world.events[0].to_record()
    assert record == {
        "tick": 0,
        "pos": [1, 4, 0],
        "old": "air",
        "new": "lamp",
        "detail": {"kind": "lamp", "lit": False},
    }


def test_update_block_ignores_identical_state(world: World):
    pos = Pos(2, 4, 0)
    world.set_block(pos, BlockState.lamp())
    count = len(world.events)
    assert not world.update_block(pos, BlockState.lamp())
    assert len(world.events) == count
    assert world.update_block(pos, BlockState.lamp().evolve(lit=True))
    assert len(world.events) == count + 1


def test_wire_needs_opaque_support():
    w = World()
    with pytest.raises(UnsupportedPlacementError):
        w.set_block(Pos(0, 4, 0), BlockState.wire())

    w.set_block(Pos(0, 3, 0), BlockState.glass())
    with pytest.raises(UnsupportedPlacementError):
        w.set_block(Pos(0, 4, 0), BlockState.wire())

    # raw placements reproduce what the game would refuse
    w.set_block(Pos(0, 4, 0), BlockState.wire(), validate=False)
    assert w.get_block(Pos(0, 4, 0)).kind == BlockKind.WIRE


def test_button_and_torch_supports(world: World):
    world.set_block(Pos(0, 4, 0), STONE)
    world.set_block(Pos(1, 4, 0), BlockState.button(Direction.EAST))
    world.set_block(Pos(0, 4, 1), BlockState.torch(Direction.NORTH))
    with pytest.raises(UnsupportedPlacementError):
        world.set_block(Pos(5, 4, 5), BlockState.button(Direction.EAST))
    with pytest.raises(UnsupportedPlacementError):
        world.set_block(Pos(5, 4, 5), BlockState.torch(Direction.WEST))


@pytest.mark.parametrize(
    "state",
    [
        BlockState(BlockKind.WIRE, power=16),
        BlockState.repeater(Direction.EAST, delay=5),
        BlockState.repeater(Direction.UP),
        BlockState.torch(Direction.UP),
        BlockState(BlockKind.WIRE, shape=frozenset({Direction.UP})),
    ],
)
def test_invalid_states_are_refused(world: World, state: BlockState):
    with pytest.raises(InvalidStateError):
        world.set_block(Pos(1, 4, 1), state)


def test_block_state_dict_form():
    state = BlockState.repeater(Direction.SOUTH, delay=3)
    data = state.to_dict()
    assert data == {"kind": "repeater", "facing": "south", "delay": 3, "powered": False, "locked": False}
    assert BlockState.from_dict(data) == state

    wire = BlockState.wire().evolve(power=7, shape=frozenset({Direction.EAST, Direction.WEST}))
    assert wire.to_dict() == {"kind": "wire", "power": 7, "shape": ["east", "west"]}
    assert BlockState.from_dict({"kind": "torch"}) == BlockState.torch()


@pytest.mark.parametrize("data", [{"kind": "comparator"}, {}, {"kind": "repeater", "facing": "sideways"}])
def test_block_state_from_bad_dict(data):
    with pytest.raises(InvalidStateError):
        BlockState.from_dict(data)


@pytest.mark.parametrize("value", [[1, 2], [1, 2, "3"], "1,2,3", [1.0, 2, 3], None])
def test_pos_from_bad_list(value):
    with pytest.raises(InvalidStateError):
        Pos.from_list(value)


def test_pos_arithmetic():
    pos = Pos(1, 2, 3)
    assert pos + Direction.NORTH == Pos(1, 2, 2)
    assert pos - Direction.UP == Pos(1, 1, 3)
    assert pos.relative_to(Pos(1, 1, 1)) == Pos(0, 1, 2)
    assert Pos.from_list(pos.to_list()) == pos
    assert pos.manhattan(Pos(0, 0, 0)) == 6
    assert pos.chebyshev(Pos(0, 0, 0)) == 3


def test_region_uses_chebyshev_distance():
    region = Region(Pos(0, 4, 0), 10)
    assert region.contains(Pos(10, 14, -10))
    assert not region.contains(Pos(11, 4, 0))
    assert not region.contains(Pos(0, -7, 0))
    assert len(list(region.columns())) == 21 * 21
    with pytest.raises(ValueError):
        Region(Pos(0, 0, 0), 0)


def test_reset_region_keeps_floor_and_outside():
    w = World()
    region = Region(Pos(0, 4, 0), 3)
    w.lay_floor(region)
    w.set_block(Pos(1, 4, 0), BlockState.wire())
    w.set_block(Pos(0, 3, 0), AIR)
    w.set_block(Pos(10, 4, 0), STONE)
    w.clock = 7

    assert w.reset_region(region) == 1
    assert w.get_block(Pos(1, 4, 0)).is_air
    assert w.get_block(Pos(0, 3, 0)) == STONE
    assert w.get_block(Pos(10, 4, 0)) == STONE
    assert w.clock == 7


def test_scan_region_lists_components_in_order(world: World):
    region = Region(Pos(0, 4, 0), 5)
    world.set_block(Pos(2, 4, 0), BlockState.wire())
    world.set_block(Pos(-1, 4, 0), BlockState.lamp())
    world.set_block(Pos(0, 4, 3), STONE)
    world.set_block(Pos(9, 4, 0), BlockState.lamp())
    found = world.scan_region(region)
    assert [pos for pos, _ in found] == [Pos(-1, 4, 0), Pos(2, 4, 0)]


def test_snapshot_is_independent(world: World):
    world.set_block(Pos(1, 4, 0), BlockState.lamp())
    copy = world.snapshot()
    copy.set_block(Pos(1, 4, 0), AIR)
    copy.clock += 3
    assert world.get_block(Pos(1, 4, 0)).kind == BlockKind.LAMP
    assert world.clock == 0
    assert len(copy.events) == len(world.events) + 1


def test_replacing_a_block_drops_its_scheduled_changes(world: World):
    pos = Pos(1, 4, 0)
    world.set_block(pos, BlockState.repeater(Direction.EAST))
    world.schedule(2, pos, ChangeKind.REPEATER_OUTPUT, True)
    assert world.pending_at(pos)
    world.set_block(pos, BlockState.wire())
    assert not world.pending_at(pos)


def test_pending_positions_follow_the_queue(world: World):
    a, b = Pos(1, 4, 0), Pos(2, 4, 0)
    world.schedule(1, a, ChangeKind.REPEATER_OUTPUT, True)
    world.schedule(3, a, ChangeKind.REPEATER_OUTPUT, False)
    world.schedule(2, b, ChangeKind.TORCH_FLIP)
    copy = world.snapshot()

    world.clock = 2
    assert [x.pos for x in world.pop_due()] == [a, b]
    assert world.pending_at(a)
    assert not world.pending_at(b)
    world.clock = 3
    assert [x.pos for x in world.pop_due()] == [a]
    assert not world.pending_at(a)

    assert copy.pending_at(a) and copy.pending_at(b)
    copy.reset_region(Region(Pos(0, 4, 0), 1))
    assert not copy.pending_at(a)
    assert copy.pending_at(b)


def test_schedule_only_in_the_future(world: World):
    with pytest.raises(ValueError):
        world.schedule(0, Pos(0, 4, 0), ChangeKind.TORCH_FLIP)


def test_world_config_bounds():
    with pytest.raises(ValueError):
        WorldConfig(button_pulse_ticks=0)
    with pytest.raises(ValueError):
        WorldConfig(button_pulse_ticks=20, max_settle_ticks=10)
