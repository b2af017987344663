"""
Procedural generation of the five task families over levels L1 to L5.

Lamp layouts come from the reference constructors, so every generated task has a known solution.
Only the family D layout depends on the seed.
"""

from __future__ import annotations

import logging
import random
from collections.abc import Sequence
from typing import Any

from redbench.core.world import Direction, Pos, Region
from redbench.packages.devices.constructors import (
    ARM_TURNS,
    ARMS,
    EQUAL_DELAY_SLOTS,
    build_branch_reach,
    build_delay_line,
    hub_layout,
    hub_size,
    rotate,
)
from redbench.packages.devices.errors import DeviceError
from redbench.settings import settings

from .errors import InvalidParametersError, TaskSemanticError
from .loader import validate_task
from .models import (
    DISTANCE_BUCKETS,
    PALETTE,
    PRESS_ACTION,
    BranchReachContract,
    ButtonInput,
    ContractParams,
    EqualDelayContract,
    Family,
    Level,
    PulseContract,
    SequentialContract,
    SimultaneousContract,
    Step,
    TaskSpec,
    TestCase,
)

log = logging.getLogger("redbench.packages.tasks")

MAX_REACH = {Level.L1: 8, Level.L2: 12, Level.L3: 15, Level.L4: 18, Level.L5: 20}
TAU = {Level.L1: 4, Level.L2: 6, Level.L3: 8, Level.L4: 10, Level.L5: 12}
MAX_LAMPS = 64


# knowledge hint unlocked at each level of family A, with the gap it points at
HINTS: list[dict[str, str]] = [
    {
        "name": "Strong-Power-Support-Block",
        "gap": "What does a pressed button power, and can that block feed several wires at once?",
    },
    {
        "name": "Nested-Hub-Fanout",
        "gap": "How can one trunk split again into more branches without losing symmetry?",
    },
    {
        "name": "Signal-Strength-Decay",
        "gap": "How far does a signal travel along dust before it fades out?",
    },
    {
        "name": "Attenuation-Aware-Fanout",
        "gap": "Which lamps of a large fanout sit beyond the reach of the source?",
    },
    {
        "name": "Repeater-Signal-Regeneration",
        "gap": "Which component restores a weak signal, and what does it cost in time?",
    },
]

LEARNING_OBJECTIVES: dict[Family, list[str]] = {
    Family.A: [
        "Drive several wires from the block a button powers",
        "Build a symmetric fanout so every lamp lights on the same tick",
        "Keep every branch inside the reach of dust or regenerate it",
    ],
    Family.B: [
        "Split a trunk with explicit T-junctions",
        "Reach distant lamps without letting the signal fade",
        "Use repeaters as range extenders where the level requires them",
    ],
    Family.C: [
        "Treat repeater delays as quantized timing elements",
        "Chain stages so each lamp lights a fixed number of ticks after the previous one",
    ],
    Family.D: [
        "Recognise which outputs are inherently slow",
        "Slow down the fast paths with compensation repeaters",
    ],
    Family.E: [
        "Measure the width of the button pulse",
        "Shape the pulse to a target on-duration and distribute it without skew",
    ],
}

_DESCRIPTIONS: dict[Family, str] = {
    Family.A: (
        "Build a device that lights all {n} lamps at the declared positions when the button is pressed. "
        "Every lamp must turn on within {tol} tick of every other lamp."
    ),
    Family.B: (
        "Build a branching network that lights all {n} lamps from the button. The network must contain at "
        "least one T-junction, lamps may be up to {reach} blocks away, and all lamps must turn on within "
        "{tol} tick of each other.{repeaters}"
    ),
    Family.C: (
        "Build a delay line lighting the {n} lamps one after another, in the declared order. The delay "
        "between consecutive stages must match {deltas} ticks within {tol} tick."
    ),
    Family.D: (
        "Build a device that lights all {n} lamps at the same time although they sit at different "
        "distances from the button ({buckets} blocks). Every lamp must turn on within {tol} tick of the others."
    ),
    Family.E: (
        "Build a device that keeps all {n} lamps lit for {tau} ticks after each button press, then turns them "
        "off. Lamps must turn on within one tick of the press and off within {tol} tick of the target."
    ),
}


def _ordered_palette() -> tuple[str, ...]:
    return tuple(PALETTE)


def _absolute(anchor: Pos, offsets: Sequence[Pos]) -> tuple[Pos, ...]:
    return tuple(anchor.offset(x.x, x.y, x.z) for x in offsets)


def _hub_lamps(n: int) -> list[Pos]:
    try:
        return hub_layout(hub_size(n)).lamp_offsets()[:n]
    except DeviceError as e:
        raise InvalidParametersError(e.error_message) from None


def _branch_lamps(n: int) -> list[Pos]:
    try:
        return build_branch_reach(hub_size(n)).lamp_offsets()[:n]
    except DeviceError as e:
        raise InvalidParametersError(e.error_message) from None


def _delay_line_lamps(deltas: Sequence[int], radius: int) -> list[Pos]:
    try:
        return build_delay_line(deltas, radius).lamp_offsets()
    except DeviceError as e:
        raise InvalidParametersError(e.error_message) from None


def _equal_delay_lamps(n: int, seed: int, radius: int, buckets: Sequence[int] = DISTANCE_BUCKETS) -> list[Pos]:
    """
    Spread `n` lamps round-robin over the distance buckets. Up to four lamps per bucket use the
    routable slot of that bucket in distinct arms, the seed picks the arms. Larger counts are drawn
    from the whole ring of cells at the bucket distance.
    """
    rng = random.Random(seed)
    counts = {bucket: 0 for bucket in buckets}
    for i in range(n):
        counts[buckets[i % len(buckets)]] += 1

    lamps: list[Pos] = []
    if n <= len(ARMS) * len(buckets) and all(b in EQUAL_DELAY_SLOTS for b in buckets):
        for bucket in buckets:
            column, side = EQUAL_DELAY_SLOTS[bucket]
            arms = sorted(rng.sample(ARMS, counts[bucket]), key=ARMS.index)
            for arm in arms:
                x, z = rotate(column, side, ARM_TURNS[arm])
                lamps.append(Pos(x, 0, z))
        return lamps

    for bucket in buckets:
        ring = [
            Pos(x, 0, z)
            for x in range(-radius, radius + 1)
            for z in range(-radius, radius + 1)
            if abs(x) + abs(z) == bucket
        ]
        if len(ring) < counts[bucket]:
            raise InvalidParametersError(
                f"only {len(ring)} cells lie {bucket} blocks away inside radius {radius}, {counts[bucket]} lamps needed"
            )
        lamps += sorted(rng.sample(ring, counts[bucket]))
    return lamps


def _check_step(contract: ContractParams) -> list[Step]:
    match contract:
        case SimultaneousContract(skew_tol=tol) | EqualDelayContract(skew_tol=tol):
            return [Step("check_simultaneous", {"tol": tol})]
        case BranchReachContract(skew_tol=tol):
            return [Step("check_simultaneous", {"tol": tol}), Step("check_t_junction")]
        case SequentialContract(tol=tol):
            return [Step("check_sequential", {"tol": tol})]
        case PulseContract(tau=tau, tol=tol):
            return [Step("check_pulse", {"tau": tau, "tol": tol})]
    raise AssertionError(contract)


def _describe(contract: ContractParams) -> str:
    values: dict[str, Any] = {"n": contract.n}
    match contract:
        case SimultaneousContract(skew_tol=tol) | EqualDelayContract(skew_tol=tol):
            values["tol"] = tol
            if isinstance(contract, EqualDelayContract):
                values["buckets"] = ", ".join(str(x) for x in contract.distance_buckets)
        case BranchReachContract():
            values["tol"] = contract.skew_tol
            values["reach"] = contract.max_reach
            values["repeaters"] = " The network must include repeaters." if contract.require_repeaters else ""
        case SequentialContract(deltas=deltas, tol=tol):
            values["deltas"] = list(deltas)
            values["tol"] = tol
        case PulseContract(tau=tau, tol=tol):
            values["tau"] = tau
            values["tol"] = tol
    return _DESCRIPTIONS[contract.family].format(**values)


def generate_task(
    family: Family | str,
    level: Level | str,
    seed: int = 0,
    *,
    n: int | None = None,
    tau: int | None = None,
    deltas: Sequence[int] | None = None,
    max_reach: int | None = None,
) -> TaskSpec:
    """
    Generate a task of the given family and level.

    Parameters
    ----------
    family: Family | str
        Task family, A to E.
    level: Level | str
        Difficulty level, L1 to L5. Sets the lamp count and the family specific extras.
    seed: int
        Only shuffles the family D layout. Generation is deterministic for a given seed.
    n: int | None
        Override the lamp count, off-schedule values are accepted.
    tau: int | None
        Override the family E pulse width.
    deltas: Sequence[int] | None
        Override the family C stage delays. The lamp count follows from their length.
    max_reach: int | None
        Override the family B reach limit.

    Raises
    ------
    InvalidParametersError
        Unknown family or level, or overrides that cannot make a consistent task.
    """
    try:
        family = Family(family)
        level = Level(level)
    except ValueError as e:
        raise InvalidParametersError(str(e)) from None
    region = Region(settings.anchor, settings.radius)
    anchor = region.anchor

    if deltas is not None:
        deltas = tuple(deltas)
        if family != Family.C:
            raise InvalidParametersError("delays only apply to family C")
        if n is not None and n != len(deltas) + 1:
            raise InvalidParametersError(f"{len(deltas)} delays describe {len(deltas) + 1} lamps, not {n}")
        n = len(deltas) + 1
    if tau is not None and family != Family.E:
        raise InvalidParametersError("tau only applies to family E")
    if max_reach is not None and family != Family.B:
        raise InvalidParametersError("max reach only applies to family B")
    count = n if n is not None else level.lamp_count
    if not 1 <= count <= MAX_LAMPS:
        raise InvalidParametersError(f"lamp count must be between 1 and {MAX_LAMPS}, got {count}")

    contract: ContractParams
    match family:
        case Family.A:
            contract = SimultaneousContract(count)
            lamps = _hub_lamps(count)
        case Family.B:
            contract = BranchReachContract(
                count,
                max_reach if max_reach is not None else MAX_REACH[level],
                require_repeaters=level in (Level.L4, Level.L5),
            )
            lamps = _branch_lamps(count)
        case Family.C:
            if deltas is None:
                deltas = tuple(1 if i % 2 == 0 else 2 for i in range(count - 1))
            if any(x < 1 for x in deltas):
                raise InvalidParametersError("stage delays must be at least one tick")
            contract = SequentialContract(count, deltas)
            lamps = _delay_line_lamps(deltas, region.radius)
        case Family.D:
            contract = EqualDelayContract(count)
            lamps = _equal_delay_lamps(count, seed, region.radius)
        case Family.E:
            contract = PulseContract(count, tau if tau is not None else TAU[level])
            lamps = _hub_lamps(count)

    task_id = f"{family.value}_{family.slug}_{level.value}"
    if count != level.lamp_count:
        task_id += f"_n{count}"
    metadata: dict[str, Any] = {"learning_objectives": list(LEARNING_OBJECTIVES[family])}
    if family == Family.A:
        metadata["hints"] = [dict(x) for x in HINTS[: level.index]]
    if family == Family.D:
        task_id += f"_seed{seed}"
        metadata["seed"] = seed

    spec = TaskSpec(
        task_id=task_id,
        family=family,
        level=level,
        task_name=f"{family.slug.replace('_', ' ').title()} ({level.value}, {count} lamps)",
        task_description=_describe(contract),
        world=region,
        allowed_blocks=_ordered_palette(),
        inputs=ButtonInput(anchor.offset(0, 1, 0), Direction.UP, pinned=True),
        outputs=_absolute(anchor, lamps),
        contract=contract,
        test_cases=(TestCase("single_press", (Step(PRESS_ACTION), *_check_step(contract))),),
        metadata=metadata,
    )
    try:
        validate_task(spec)
    except TaskSemanticError as e:
        raise InvalidParametersError(e.detail) from None
    log.debug(f"Generated task {task_id} with {count} lamps")
    return spec
