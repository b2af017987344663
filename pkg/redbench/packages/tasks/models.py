from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields
from typing import Any, ClassVar

from redbench.core.world import BlockKind, Direction, Pos, Region

PALETTE: dict[str, BlockKind] = {
    "minecraft:stone_button": BlockKind.BUTTON,
    "minecraft:redstone_wire": BlockKind.WIRE,
    "minecraft:redstone_repeater": BlockKind.REPEATER,
    "minecraft:redstone_torch": BlockKind.TORCH,
    "minecraft:redstone_lamp": BlockKind.LAMP,
    "minecraft:stone": BlockKind.STONE,
    "minecraft:glass": BlockKind.GLASS,
    "minecraft:air": BlockKind.AIR,
}
LAMP_SCHEDULE = (4, 8, 16, 32, 64)
DISTANCE_BUCKETS = (4, 8, 12, 16)
PRESS_ACTION = "press_button"
CHECK_ACTIONS = frozenset({"check_simultaneous", "check_sequential", "check_pulse", "check_t_junction", "check_static"})


class Family(enum.StrEnum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"

    @property
    def slug(self) -> str:
        return _SLUGS[self]


_SLUGS = {
    Family.A: "simultaneous_lights",
    Family.B: "branch_reach",
    Family.C: "sequential_activation",
    Family.D: "equal_delay_distribution",
    Family.E: "pulse_shaping",
}


class Level(enum.StrEnum):
    L1 = "L1"
    L2 = "L2"
    L3 = "L3"
    L4 = "L4"
    L5 = "L5"

    @property
    def index(self) -> int:
        return int(self.value[1:])

    @property
    def lamp_count(self) -> int:
        return LAMP_SCHEDULE[self.index - 1]


@dataclass(frozen=True, slots=True)
class SimultaneousContract:
    family: ClassVar[Family] = Family.A
    n: int
    skew_tol: int = 1


@dataclass(frozen=True, slots=True)
class BranchReachContract:
    family: ClassVar[Family] = Family.B
    n: int
    max_reach: int
    skew_tol: int = 1
    require_repeaters: bool = False
    require_t_junction: bool = True


@dataclass(frozen=True, slots=True)
class SequentialContract:
    family: ClassVar[Family] = Family.C
    n: int
    deltas: tuple[int, ...]
    tol: int = 1


@dataclass(frozen=True, slots=True)
class EqualDelayContract:
    family: ClassVar[Family] = Family.D
    n: int
    distance_buckets: tuple[int, ...] = DISTANCE_BUCKETS
    skew_tol: int = 1


@dataclass(frozen=True, slots=True)
class PulseContract:
    family: ClassVar[Family] = Family.E
    n: int
    tau: int
    tol: int = 1


type ContractParams = (
    SimultaneousContract | BranchReachContract | SequentialContract | EqualDelayContract | PulseContract
)

CONTRACT_TYPES: dict[Family, type[ContractParams]] = {
    Family.A: SimultaneousContract,
    Family.B: BranchReachContract,
    Family.C: SequentialContract,
    Family.D: EqualDelayContract,
    Family.E: PulseContract,
}


def contract_to_dict(contract: ContractParams) -> dict[str, Any]:
    result: dict[str, Any] = {}
    for item in fields(contract):
        value = getattr(contract, item.name)
        result[item.name] = list(value) if isinstance(value, tuple) else value
    return result


def contract_from_dict(family: Family, data: dict[str, Any]) -> ContractParams:
    cls = CONTRACT_TYPES[family]
    values = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
    return cls(**values)


@dataclass(frozen=True, slots=True)
class ButtonInput:
    """
    Where the stimulus button sits. A pinned button is pre-placed, with a stone support, in every
    session opened for the task.
    """

    pos: Pos
    facing: Direction = Direction.UP
    pinned: bool = True

    @property
    def support(self) -> Pos:
        return self.pos - self.facing


@dataclass(frozen=True, slots=True)
class Step:
    action: str
    params: dict[str, Any] = field(default_factory=dict, hash=False)

    @property
    def is_check(self) -> bool:
        return self.action.startswith("check_")


@dataclass(frozen=True, slots=True)
class TestCase:
    name: str
    sequence: tuple[Step, ...]

    @property
    def checks(self) -> list[Step]:
        return [x for x in self.sequence if x.is_check]


@dataclass(slots=True)
class TaskSpec:
    """
    A parsed task file.

    Attributes
    ----------
    task_id: str
        Stable identifier, also used as the file stem.
    family: Family
        Which contract family grades the task.
    level: Level
        Difficulty level, L1 to L5.
    task_name: str
        Short title shown to the agent.
    task_description: str
        The instruction given to the agent.
    world: Region
        Build region. Every declared position and every block of a submission lies inside.
    allowed_blocks: tuple[str, ...]
        Palette names usable in this task.
    inputs: ButtonInput
        The stimulus button.
    outputs: tuple[Pos, ...]
        Lamp positions, in the order the contract reads them.
    contract: ContractParams
        Family specific contract parameters.
    test_cases: tuple[TestCase, ...]
        Stimulus and check sequences run by the grader.
    metadata: dict[str, Any]
        Free-form data never shown to the agent. Unknown top-level keys of a task file end up here.
    """

    task_id: str
    family: Family
    level: Level
    task_name: str
    task_description: str
    world: Region
    allowed_blocks: tuple[str, ...]
    inputs: ButtonInput
    outputs: tuple[Pos, ...]
    contract: ContractParams
    test_cases: tuple[TestCase, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.contract.n

    @property
    def allowed_kinds(self) -> frozenset[BlockKind]:
        return frozenset(PALETTE[x] for x in self.allowed_blocks if x in PALETTE)


def planar_distance(anchor: Pos, pos: Pos) -> int:
    """
    Manhattan distance in the horizontal plane, the length of the shortest dust path between two columns.
    """
    return abs(pos.x - anchor.x) + abs(pos.z - anchor.z)
