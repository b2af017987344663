from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from redbench.core.engine import settle
from redbench.core.errors import RedbenchError
from redbench.core.world import BlockKind, BlockState, Pos, World

from .errors import InvalidDeviceError

log = logging.getLogger("redbench.packages.devices")

# supports first, then what rests on them, the button last
_PLACEMENT_ORDER = {
    BlockKind.STONE: 0,
    BlockKind.GLASS: 0,
    BlockKind.LAMP: 0,
    BlockKind.AIR: 1,
    BlockKind.WIRE: 1,
    BlockKind.REPEATER: 1,
    BlockKind.TORCH: 1,
    BlockKind.BUTTON: 2,
}


class FailureCategory(enum.StrEnum):
    """
    Where a broken device went wrong, and which capacity the mistake points at.
    """

    NONE = "none"
    STRUCTURAL = "structural"
    SIGNAL_PROPAGATION = "signal-propagation"
    WIRE_SEMANTICS = "wire-semantics"

    @property
    def capacity(self) -> str | None:
        return _CAPACITIES.get(self)


_CAPACITIES = {
    FailureCategory.STRUCTURAL: "application",
    FailureCategory.SIGNAL_PROPAGATION: "discovery",
    FailureCategory.WIRE_SEMANTICS: "identification",
}


@dataclass(frozen=True, slots=True)
class ExpectedOutcome:
    lit_count: int
    total: int
    note: str = ""

    def __post_init__(self):
        if not 0 <= self.lit_count <= self.total:
            raise ValueError(f"expected lit count {self.lit_count} is outside 0-{self.total}")


@dataclass(frozen=True, slots=True)
class Placement:
    """
    One block of a device, relative to the device anchor. A raw placement skips the support rules.
    """

    offset: Pos
    state: BlockState
    raw: bool = False


@dataclass(frozen=True, slots=True)
class PulseExtender:
    """
    Repeater delays of the extender laid under a hub.

    Every arm gets a copy of the button pulse after `first` ticks, through its radial, short and
    merge repeaters. When `long` is set, a second copy follows that detour and arrives after `last`
    ticks. Lamps see the OR of the button's own pulse and of those copies.
    """

    radial: int
    short: int
    merge: int
    long: tuple[int, ...] = ()

    def __post_init__(self):
        delays = (self.radial, self.short, self.merge, *self.long)
        if not all(1 <= x <= 4 for x in delays):
            raise ValueError(f"repeater delays must be between 1 and 4, got {delays}")
        if self.long and len(self.long) != 3:
            raise ValueError(f"the long path has three repeaters, got {len(self.long)} delays")

    @property
    def first(self) -> int:
        return self.radial + self.short + self.merge

    @property
    def last(self) -> int:
        if not self.long:
            return self.first
        return self.radial + sum(self.long) + self.merge


@dataclass
class Device:
    """
    An ordered list of block placements around an anchor.

    Attributes
    ----------
    name: str
        Display name.
    anchor: Pos
        Absolute position the offsets are relative to.
    placements: list[Placement]
        Blocks in placement order. Supports always come before what rests on them.
    expected: ExpectedOutcome | None
        For corpus devices, how many lamps light after a press.
    category: FailureCategory | None
        For corpus devices, the failure category.
    """

    name: str
    anchor: Pos = field(default_factory=lambda: Pos(0, 4, 0))
    placements: list[Placement] = field(default_factory=list)
    expected: ExpectedOutcome | None = None
    category: FailureCategory | None = None

    def lamp_offsets(self) -> list[Pos]:
        return [x.offset for x in self.placements if x.state.kind == BlockKind.LAMP]

    def button_offsets(self) -> list[Pos]:
        return [x.offset for x in self.placements if x.state.kind == BlockKind.BUTTON]

    def count(self, kind: BlockKind) -> int:
        return sum(1 for x in self.placements if x.state.kind == kind)

    def absolute(self, offset: Pos) -> Pos:
        return self.anchor.offset(offset.x, offset.y, offset.z)

    def apply(self, world: World, anchor: Pos | None = None):
        """
        Place every block in order, then settle the world once.

        Parameters
        ----------
        world: World
            Destination world, its floor must already be laid.
        anchor: Pos | None
            Place the device around this anchor instead of its own.
        """
        anchor = anchor or self.anchor
        for placement in self.placements:
            pos = anchor.offset(placement.offset.x, placement.offset.y, placement.offset.z)
            world.set_block(pos, placement.state, validate=not placement.raw)
        settle(world)
        log.debug(f"Placed {len(self.placements)} blocks of {self.name!r} around {anchor}")

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"name": self.name, "anchor": self.anchor.to_list()}
        if self.category is not None:
            data["category"] = self.category.value
        placements = []
        for placement in self.placements:
            state = placement.state.to_dict()
            entry: dict[str, Any] = {"offset": placement.offset.to_list(), "kind": state.pop("kind"), "state": state}
            if placement.raw:
                entry["raw"] = True
            placements.append(entry)
        data["placements"] = placements
        if self.expected is not None:
            data["expected"] = {"lit": self.expected.lit_count, "total": self.expected.total}
            if self.expected.note:
                data["expected"]["note"] = self.expected.note
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Device:
        try:
            placements = [
                Placement(
                    Pos.from_list(x["offset"]),
                    BlockState.from_dict({**x.get("state", {}), "kind": x["kind"]}),
                    bool(x.get("raw", False)),
                )
                for x in data["placements"]
            ]
            expected = None
            if exp := data.get("expected"):
                expected = ExpectedOutcome(int(exp["lit"]), int(exp["total"]), exp.get("note", ""))
            category = FailureCategory(data["category"]) if "category" in data else None
            return cls(
                name=str(data["name"]),
                anchor=Pos.from_list(data.get("anchor", [0, 4, 0])),
                placements=placements,
                expected=expected,
                category=category,
            )
        except KeyError as e:
            raise InvalidDeviceError(f"missing field {e.args[0]!r}") from None
        except (TypeError, ValueError) as e:
            raise InvalidDeviceError(str(e)) from None
        except RedbenchError as e:
            raise InvalidDeviceError(e.error_message) from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> Device:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidDeviceError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
        if not isinstance(data, dict):
            raise InvalidDeviceError("a device file must contain a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: Path) -> Device:
        try:
            text = path.read_text()
        except OSError as e:
            raise InvalidDeviceError(f"cannot read {path}: {e.strerror}") from None
        return cls.loads(text)


class Blueprint:
    """
    Collects placements for a device being constructed, in the horizontal plane of the anchor unless
    told otherwise. Placing two different blocks on the same cell is a layout bug.
    """

    def __init__(self, name: str):
        self.name = name
        self.cells: dict[Pos, BlockState] = {}

    def put(self, x: int, z: int, state: BlockState, y: int = 0):
        pos = Pos(x, y, z)
        if (existing := self.cells.get(pos)) is not None and existing != state:
            raise ValueError(f"{self.name}: {state.kind.value} collides with {existing.kind.value} at {pos}")
        self.cells[pos] = state

    def __contains__(self, item: tuple[int, int]) -> bool:
        return Pos(item[0], 0, item[1]) in self.cells

    def build(self, anchor: Pos | None = None) -> Device:
        ordered = sorted(self.cells.items(), key=lambda item: _PLACEMENT_ORDER[item[1].kind])
        return Device(
            name=self.name,
            anchor=anchor or Pos(0, 4, 0),
            placements=[Placement(offset, state) for offset, state in ordered],
        )
