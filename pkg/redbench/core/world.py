"""
The voxel world: a sparse integer lattice of block states plus the bounded build region.

Nothing here simulates signals, see `redbench.core.engine` for that. The world only stores blocks,
checks that placements have a valid support, keeps the event log and the queue of scheduled changes.
"""

from __future__ import annotations

import enum
import heapq
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Any, Iterator, Self

from redbench.core.errors import InvalidStateError, UnsupportedPlacementError

log = logging.getLogger("redbench.core.world")


class Direction(enum.StrEnum):
    NORTH = "north"
    SOUTH = "south"
    EAST = "east"
    WEST = "west"
    UP = "up"
    DOWN = "down"

    @property
    def vector(self) -> tuple[int, int, int]:
        return _VECTORS[self]

    @property
    def opposite(self) -> Direction:
        return _OPPOSITES[self]

    @property
    def is_horizontal(self) -> bool:
        return self not in (Direction.UP, Direction.DOWN)

    def perpendicular(self) -> tuple[Direction, Direction]:
        """
        The two horizontal directions at a right angle from this horizontal direction.
        """
        if self in (Direction.NORTH, Direction.SOUTH):
            return (Direction.EAST, Direction.WEST)
        return (Direction.NORTH, Direction.SOUTH)


_VECTORS = {
    Direction.NORTH: (0, 0, -1),
    Direction.SOUTH: (0, 0, 1),
    Direction.EAST: (1, 0, 0),
    Direction.WEST: (-1, 0, 0),
    Direction.UP: (0, 1, 0),
    Direction.DOWN: (0, -1, 0),
}
_OPPOSITES = {
    Direction.NORTH: Direction.SOUTH,
    Direction.SOUTH: Direction.NORTH,
    Direction.EAST: Direction.WEST,
    Direction.WEST: Direction.EAST,
    Direction.UP: Direction.DOWN,
    Direction.DOWN: Direction.UP,
}

# fixed iteration order, every loop over neighbours must be deterministic
HORIZONTAL = (Direction.NORTH, Direction.SOUTH, Direction.EAST, Direction.WEST)
ALL_DIRECTIONS = HORIZONTAL + (Direction.UP, Direction.DOWN)


@dataclass(frozen=True, order=True, slots=True)
class Pos:
    x: int
    y: int
    z: int

    def __add__(self, other: Direction) -> Pos:
        dx, dy, dz = other.vector
        return Pos(self.x + dx, self.y + dy, self.z + dz)

    def __sub__(self, other: Direction) -> Pos:
        return self + other.opposite

    def offset(self, dx: int = 0, dy: int = 0, dz: int = 0) -> Pos:
        return Pos(self.x + dx, self.y + dy, self.z + dz)

    def relative_to(self, anchor: Pos) -> Pos:
        return Pos(self.x - anchor.x, self.y - anchor.y, self.z - anchor.z)

    def manhattan(self, other: Pos) -> int:
        return abs(self.x - other.x) + abs(self.y - other.y) + abs(self.z - other.z)

    def chebyshev(self, other: Pos) -> int:
        return max(abs(self.x - other.x), abs(self.y - other.y), abs(self.z - other.z))

    def to_list(self) -> list[int]:
        return [self.x, self.y, self.z]

    @classmethod
    def from_list(cls, value: Any) -> Pos:
        if not isinstance(value, (list, tuple)) or len(value) != 3 or not all(type(v) is int for v in value):
            raise InvalidStateError(f"position must be three integers, got {value!r}")
        return cls(*value)

    def __str__(self) -> str:
        return f"({self.x}, {self.y}, {self.z})"


class BlockKind(enum.StrEnum):
    AIR = "air"
    STONE = "stone"
    GLASS = "glass"
    LAMP = "lamp"
    WIRE = "wire"
    REPEATER = "repeater"
    TORCH = "torch"
    BUTTON = "button"


OPAQUE_KINDS = frozenset({BlockKind.STONE, BlockKind.LAMP})
COMPONENT_KINDS = frozenset({BlockKind.WIRE, BlockKind.REPEATER, BlockKind.TORCH, BlockKind.BUTTON, BlockKind.LAMP})

# state fields relevant to each kind, in serialization order
_KIND_FIELDS: dict[BlockKind, tuple[str, ...]] = {
    BlockKind.AIR: (),
    BlockKind.STONE: (),
    BlockKind.GLASS: (),
    BlockKind.LAMP: ("lit",),
    BlockKind.WIRE: ("power", "shape"),
    BlockKind.REPEATER: ("facing", "delay", "powered", "locked"),
    BlockKind.TORCH: ("attached", "lit"),
    BlockKind.BUTTON: ("facing", "pressed_until"),
}


@dataclass(frozen=True, slots=True)
class BlockState:
    """
    A tagged block record. Only the fields relevant to `kind` carry meaning, the others keep their defaults.

    Attributes
    ----------
    kind: BlockKind
        What occupies the voxel.
    power: int
        Wire signal level, 0 to 15.
    shape: frozenset[Direction]
        Horizontal directions a wire connects toward.
    facing: Direction | None
        Output direction of a repeater, or the direction a button points away from its support.
    delay: int
        Repeater latency in ticks, 1 to 4.
    powered: bool
        Whether the repeater output is on.
    locked: bool
        Whether the repeater is held by a powered side repeater.
    attached: Direction | None
        Direction from a torch toward its supporting block. A standing torch is attached `DOWN`.
    lit: bool
        Lamp or torch output.
    pressed_until: int | None
        Tick at which a pressed button releases, `None` when not pressed.
    """

    kind: BlockKind
    power: int = 0
    shape: frozenset[Direction] = frozenset()
    facing: Direction | None = None
    delay: int = 1
    powered: bool = False
    locked: bool = False
    attached: Direction | None = None
    lit: bool = False
    pressed_until: int | None = None

    @classmethod
    def air(cls) -> Self:
        return cls(BlockKind.AIR)

    @classmethod
    def stone(cls) -> Self:
        return cls(BlockKind.STONE)

    @classmethod
    def glass(cls) -> Self:
        return cls(BlockKind.GLASS)

    @classmethod
    def lamp(cls) -> Self:
        return cls(BlockKind.LAMP)

    @classmethod
    def wire(cls) -> Self:
        return cls(BlockKind.WIRE)

    @classmethod
    def repeater(cls, facing: Direction, delay: int = 1) -> Self:
        return cls(BlockKind.REPEATER, facing=facing, delay=delay)

    @classmethod
    def torch(cls, attached: Direction = Direction.DOWN) -> Self:
        return cls(BlockKind.TORCH, attached=attached, lit=True)

    @classmethod
    def button(cls, facing: Direction = Direction.UP) -> Self:
        return cls(BlockKind.BUTTON, facing=facing)

    @property
    def is_air(self) -> bool:
        return self.kind == BlockKind.AIR

    @property
    def is_opaque(self) -> bool:
        return self.kind in OPAQUE_KINDS

    @property
    def is_component(self) -> bool:
        return self.kind in COMPONENT_KINDS

    @property
    def pressed(self) -> bool:
        return self.pressed_until is not None

    def evolve(self, **changes: Any) -> BlockState:
        return replace(self, **changes)

    def validate(self):
        """
        Raise `InvalidStateError` if the per-kind fields are out of range.
        """
        if not 0 <= self.power <= 15:
            raise InvalidStateError(f"wire power {self.power} is outside 0-15")
        if any(not d.is_horizontal for d in self.shape):
            raise InvalidStateError("wire shape may only contain horizontal directions")
        match self.kind:
            case BlockKind.REPEATER:
                if self.facing is None or not self.facing.is_horizontal:
                    raise InvalidStateError("a repeater must face a horizontal direction")
                if not 1 <= self.delay <= 4:
                    raise InvalidStateError(f"repeater delay {self.delay} is outside 1-4")
            case BlockKind.TORCH:
                if self.attached is None or self.attached == Direction.UP:
                    raise InvalidStateError("a torch must be attached below or beside its support")
            case BlockKind.BUTTON:
                if self.facing is None:
                    raise InvalidStateError("a button needs a facing")

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind.value}
        for name in _KIND_FIELDS[self.kind]:
            value = getattr(self, name)
            if name == "shape":
                value = sorted(d.value for d in value)
            elif isinstance(value, Direction):
                value = value.value
            data[name] = value
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> BlockState:
        try:
            kind = BlockKind(data["kind"])
        except (KeyError, ValueError):
            raise InvalidStateError(f"unknown block kind {data.get('kind')!r}") from None
        values: dict[str, Any] = {}
        for name in _KIND_FIELDS[kind]:
            if name not in data:
                continue
            value = data[name]
            try:
                if name == "shape":
                    value = frozenset(Direction(d) for d in value)
                elif name in ("facing", "attached"):
                    value = Direction(value)
            except ValueError:
                raise InvalidStateError(f"invalid {name} {value!r}") from None
            values[name] = value
        if kind == BlockKind.TORCH:
            values.setdefault("attached", Direction.DOWN)
            values.setdefault("lit", True)
        elif kind == BlockKind.BUTTON:
            values.setdefault("facing", Direction.UP)
        elif kind == BlockKind.REPEATER:
            values.setdefault("facing", Direction.NORTH)
        state = cls(kind, **values)
        state.validate()
        return state


AIR = BlockState.air()
STONE = BlockState.stone()


@dataclass(frozen=True, slots=True)
class Region:
    """
    A cube of half-width `radius` around `anchor`. Membership uses Chebyshev distance.
    """

    anchor: Pos
    radius: int

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"region radius must be positive, got {self.radius}")

    def contains(self, pos: Pos) -> bool:
        return self.anchor.chebyshev(pos) <= self.radius

    def columns(self) -> Iterator[tuple[int, int]]:
        r = self.radius
        for x in range(self.anchor.x - r, self.anchor.x + r + 1):
            for z in range(self.anchor.z - r, self.anchor.z + r + 1):
                yield x, z


@dataclass(frozen=True, slots=True)
class WorldConfig:
    button_pulse_ticks: int = 10
    floor_y: int = 3
    max_settle_ticks: int = 200

    def __post_init__(self):
        if self.button_pulse_ticks < 1:
            raise ValueError("button_pulse_ticks must be at least 1")
        if self.max_settle_ticks < self.button_pulse_ticks:
            raise ValueError("max_settle_ticks must not be lower than button_pulse_ticks")


@dataclass(frozen=True, slots=True)
class Event:
    tick: int
    pos: Pos
    old: BlockState
    new: BlockState

    def to_record(self) -> dict[str, Any]:
        return {
            "tick": self.tick,
            "pos": self.pos.to_list(),
            "old": self.old.kind.value,
            "new": self.new.kind.value,
            "detail": self.new.to_dict(),
        }


class ChangeKind(enum.StrEnum):
    REPEATER_OUTPUT = "repeater-output"
    TORCH_FLIP = "torch-flip"
    BUTTON_RELEASE = "button-release"


@dataclass(frozen=True, order=True, slots=True)
class ScheduledChange:
    fire_tick: int
    seq: int
    pos: Pos = field(compare=False)
    change: ChangeKind = field(compare=False)
    value: bool = field(compare=False, default=False)


class World:
    """
    Sparse block storage with a tick clock. Absent positions read as air, air is never stored.

    A world has a single owner and no internal locking.
    """

    def __init__(self, config: WorldConfig | None = None):
        self.config = config or WorldConfig()
        self.blocks: dict[Pos, BlockState] = {}
        self.clock: int = 0
        self.events: list[Event] = []
        self.scheduled: list[ScheduledChange] = []
        self._pending: Counter[Pos] = Counter()
        self._seq = 0

    def get_block(self, pos: Pos) -> BlockState:
        return self.blocks.get(pos, AIR)

    def check_support(self, pos: Pos, state: BlockState):
        """
        Raise `UnsupportedPlacementError` if `state` cannot stand at `pos`.
        """
        match state.kind:
            case BlockKind.WIRE | BlockKind.REPEATER:
                support = pos + Direction.DOWN
            case BlockKind.BUTTON:
                assert state.facing
                support = pos - state.facing
            case BlockKind.TORCH:
                assert state.attached
                support = pos + state.attached
            case _:
                return
        if not self.get_block(support).is_opaque:
            raise UnsupportedPlacementError(
                f"{state.kind.value} at {pos} rests on {self.get_block(support).kind.value} at {support}"
            )

    def set_block(self, pos: Pos, state: BlockState, *, validate: bool = True) -> BlockState:
        """
        Place `state` at `pos` and return the displaced block.

        Parameters
        ----------
        pos: Pos
            Where to place the block.
        state: BlockState
            The new block. Always checked for internal validity.
        validate: bool
            Whether to check the support rules. Raw device loads disable this to reproduce
            placements the game would refuse.
        """
        state.validate()
        if validate:
            self.check_support(pos, state)
        previous = self.get_block(pos)
        if state.is_air:
            self.blocks.pop(pos, None)
        else:
            self.blocks[pos] = state
        if self._pending.pop(pos, 0):
            self.scheduled = [x for x in self.scheduled if x.pos != pos]
            heapq.heapify(self.scheduled)
        self.events.append(Event(self.clock, pos, previous, state))
        return previous

    def update_block(self, pos: Pos, state: BlockState) -> bool:
        """
        Engine-side write. Records an event only when the state actually changes.
        """
        previous = self.get_block(pos)
        if previous == state:
            return False
        if state.is_air:
            self.blocks.pop(pos, None)
        else:
            self.blocks[pos] = state
        self.events.append(Event(self.clock, pos, previous, state))
        return True

    def schedule(self, delay: int, pos: Pos, change: ChangeKind, value: bool = False):
        if delay < 1:
            raise ValueError("scheduled changes must fire in the future")
        self._seq += 1
        heapq.heappush(self.scheduled, ScheduledChange(self.clock + delay, self._seq, pos, change, value))
        self._pending[pos] += 1

    def pending_at(self, pos: Pos) -> bool:
        return self._pending[pos] > 0

    def pop_due(self) -> Iterator[ScheduledChange]:
        while self.scheduled and self.scheduled[0].fire_tick <= self.clock:
            change = heapq.heappop(self.scheduled)
            self._pending[change.pos] -= 1
            if not self._pending[change.pos]:
                del self._pending[change.pos]
            yield change

    def is_floor(self, pos: Pos, region: Region) -> bool:
        return pos.y == self.config.floor_y and region.contains(pos)

    def lay_floor(self, region: Region):
        """
        Fill the region's footprint at `floor_y` with stone. The floor is world furniture and emits no events.
        """
        y = self.config.floor_y
        for x, z in region.columns():
            pos = Pos(x, y, z)
            if region.contains(pos):
                self.blocks[pos] = STONE

    def reset_region(self, region: Region) -> int:
        """
        Remove every non-floor block inside the region and restore the floor. The clock is unchanged.

        Returns
        -------
        int
            Number of blocks removed, floor cells excluded.
        """
        removed = 0
        for pos in [p for p in self.blocks if region.contains(p)]:
            if self.is_floor(pos, region) and self.blocks[pos] == STONE:
                continue
            del self.blocks[pos]
            removed += 1
        self.scheduled = [x for x in self.scheduled if not region.contains(x.pos)]
        heapq.heapify(self.scheduled)
        self._pending = Counter(x.pos for x in self.scheduled)
        self.lay_floor(region)
        log.debug(f"Reset region around {region.anchor}, {removed} blocks removed")
        return removed

    def scan_region(self, region: Region) -> list[tuple[Pos, BlockState]]:
        found = [(p, s) for p, s in self.blocks.items() if s.is_component and region.contains(p)]
        return sorted(found, key=lambda item: item[0])

    def snapshot(self) -> World:
        """
        Independent copy of this world. Block states are immutable so a shallow copy of the maps is enough.
        """
        copy = World(self.config)
        copy.blocks = dict(self.blocks)
        copy.clock = self.clock
        copy.events = list(self.events)
        copy.scheduled = list(self.scheduled)
        copy._pending = Counter(self._pending)
        copy._seq = self._seq
        return copy
