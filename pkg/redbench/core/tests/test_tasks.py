import itertools

import pytest
import yaml

from redbench.core.world import Direction, Pos
from redbench.packages.tasks.errors import (
    InvalidParametersError,
    TaskSchemaError,
    TaskSemanticError,
    TaskSyntaxError,
    UnreadableTaskError,
)
from redbench.packages.tasks.generator import MAX_REACH, TAU, generate_task
from redbench.packages.tasks.loader import load_task, parse_task, serialize_task
from redbench.packages.tasks.models import (
    DISTANCE_BUCKETS,
    LAMP_SCHEDULE,
    BranchReachContract,
    EqualDelayContract,
    Family,
    Level,
    PulseContract,
    SequentialContract,
    contract_from_dict,
    contract_to_dict,
    planar_distance,
)

MINIMAL = """\
task_id: A_simultaneous_lights_L1
family: A
level: L1
task_name: Light four lamps
task_description: Light all four lamps at once.
world: {anchor: [0, 4, 0], radius: 10}
allowed_blocks: [minecraft:stone_button, minecraft:redstone_wire, minecraft:redstone_lamp, minecraft:stone]
inputs:
  button: {pos: [0, 5, 0], facing: up}
outputs:
  lamps: [[3, 4, 0], [-3, 4, 0], [0, 4, 3], [0, 4, -3]]
contract: {n: 4, skew_tol: 1}
test_cases:
  - name: single_press
    sequence:
      - {action: press_button}
      - {action: check_simultaneous, params: {tol: 1}}
"""


def test_parse_minimal_task():
    spec = parse_task(MINIMAL)
    assert spec.family == Family.A
    assert spec.level == Level.L1
    assert spec.n == 4
    assert spec.inputs.pos == Pos(0, 5, 0)
    assert spec.inputs.facing == Direction.UP
    assert spec.inputs.pinned
    assert spec.inputs.support == Pos(0, 4, 0)
    assert spec.outputs[0] == Pos(3, 4, 0)
    assert spec.test_cases[0].checks[0].params == {"tol": 1}
    assert spec.metadata == {}


def test_unknown_keys_move_to_metadata():
    spec = parse_task(MINIMAL + "author: someone\n")
    assert spec.metadata == {"author": "someone"}


@pytest.mark.parametrize("family, level", list(itertools.product(Family, Level)))
def test_generated_task_follows_the_lamp_schedule(family: Family, level: Level):
    spec = generate_task(family, level, seed=1)
    assert spec.n == LAMP_SCHEDULE[level.index - 1] == len(spec.outputs)
    assert spec.task_id.startswith(f"{family.value}_{family.slug}_{level.value}")
    assert all(spec.world.contains(x) for x in spec.outputs)
    assert len(set(spec.outputs)) == spec.n

    text = serialize_task(spec)
    assert serialize_task(parse_task(text)) == text


@pytest.mark.parametrize("family", list(Family))
def test_contract_keys_round_trip(family: Family):
    spec = generate_task(family, Level.L2)
    data = contract_to_dict(spec.contract)
    assert "family" not in data
    assert all(not isinstance(x, tuple) for x in data.values())
    assert contract_from_dict(family, data) == spec.contract

    written = yaml.safe_load(serialize_task(spec))["contract"]
    assert written == data
    assert parse_task(serialize_task(spec)).contract == spec.contract


def test_family_extras_by_level():
    for level in Level:
        reach = generate_task(Family.B, level).contract
        assert isinstance(reach, BranchReachContract)
        assert reach.max_reach == MAX_REACH[level]
        assert reach.require_repeaters == (level in (Level.L4, Level.L5))

        pulse = generate_task(Family.E, level).contract
        assert isinstance(pulse, PulseContract)
        assert pulse.tau == TAU[level]


def test_sequential_defaults_and_overrides():
    contract = generate_task(Family.C, Level.L1).contract
    assert isinstance(contract, SequentialContract)
    assert contract.deltas == (1, 2, 1)

    spec = generate_task(Family.C, Level.L2, deltas=[3, 1, 4])
    assert spec.n == 4
    assert spec.task_id.endswith("_n4")
    with pytest.raises(InvalidParametersError):
        generate_task(Family.C, Level.L1, n=5, deltas=[1, 1])
    with pytest.raises(InvalidParametersError):
        generate_task(Family.C, Level.L1, deltas=[1, 0, 1])


def test_equal_delay_lamps_fall_in_buckets():
    for seed in range(5):
        spec = generate_task(Family.D, Level.L2, seed=seed)
        assert isinstance(spec.contract, EqualDelayContract)
        distances = sorted(planar_distance(spec.world.anchor, x) for x in spec.outputs)
        assert distances == sorted(DISTANCE_BUCKETS * 2)
        assert spec.metadata["seed"] == seed


def test_generation_is_deterministic():
    a = generate_task(Family.D, Level.L4, seed=42)
    b = generate_task(Family.D, Level.L4, seed=42)
    assert serialize_task(a) == serialize_task(b)
    assert a.outputs != generate_task(Family.D, Level.L4, seed=43).outputs


def test_off_schedule_lamp_count():
    spec = generate_task(Family.A, Level.L2, n=6)
    assert spec.n == 6
    assert len(spec.outputs) == 6
    assert spec.task_id == "A_simultaneous_lights_L2_n6"


def test_family_a_hints_grow_with_level():
    assert len(generate_task(Family.A, Level.L1).metadata["hints"]) == 1
    assert len(generate_task(Family.A, Level.L5).metadata["hints"]) == 5
    assert "hints" not in generate_task(Family.B, Level.L5).metadata


@pytest.mark.parametrize(
    "kwargs",
    [
        {"family": "F", "level": "L1"},
        {"family": "A", "level": "L9"},
        {"family": "A", "level": "L1", "tau": 6},
        {"family": "A", "level": "L1", "max_reach": 4},
        {"family": "A", "level": "L1", "n": 0},
        {"family": "A", "level": "L1", "n": 65},
        {"family": "E", "level": "L1", "tau": 20},
    ],
)
def test_invalid_generation_parameters(kwargs):
    with pytest.raises(InvalidParametersError):
        generate_task(**kwargs)


@pytest.mark.parametrize(
    "text",
    [
        "task_id: [unclosed",
        "base: &a {x: 1}\nother: *a\n",
        "task_id: !!python/object:os.system x\n",
    ],
)
def test_yaml_outside_the_subset(text: str):
    with pytest.raises(TaskSyntaxError):
        parse_task(text)


@pytest.mark.parametrize(
    "old, new",
    [
        ("family: A", "family: Z"),
        ("level: L1", "level: L6"),
        ("radius: 10", "radius: 0"),
        ("contract: {n: 4, skew_tol: 1}", "contract: {skew_tol: 1}"),
        ("contract: {n: 4, skew_tol: 1}", "contract: {n: 4, tau: 5}"),
        ("[3, 4, 0], [-3, 4, 0]", "[3, 4], [-3, 4, 0]"),
        ("{action: press_button}", "{action: jump}"),
    ],
)
def test_schema_errors(old: str, new: str):
    assert old in MINIMAL
    with pytest.raises(TaskSchemaError):
        parse_task(MINIMAL.replace(old, new))


def test_top_level_must_be_a_mapping():
    with pytest.raises(TaskSchemaError):
        parse_task("- 1\n- 2\n")


@pytest.mark.parametrize(
    "old, new",
    [
        ("contract: {n: 4,", "contract: {n: 5,"),
        ("[3, 4, 0], [-3, 4, 0]", "[30, 4, 0], [-3, 4, 0]"),
        ("[3, 4, 0], [-3, 4, 0]", "[0, 4, 3], [-3, 4, 0]"),
        ("[3, 4, 0], [-3, 4, 0]", "[0, 4, 0], [-3, 4, 0]"),
        ("minecraft:stone_button, ", ""),
        ("minecraft:stone]", "minecraft:comparator]"),
        ("{action: check_simultaneous, params: {tol: 1}}", "{action: press_button}"),
        ("{action: check_simultaneous, params: {tol: 1}}", "{action: check_everything}"),
    ],
)
def test_semantic_errors(old: str, new: str):
    assert old in MINIMAL
    with pytest.raises(TaskSemanticError):
        parse_task(MINIMAL.replace(old, new))


def test_branch_reach_limit_is_enforced():
    data = yaml.safe_load(serialize_task(generate_task(Family.B, Level.L3)))
    data["contract"]["max_reach"] = 2
    with pytest.raises(TaskSemanticError):
        parse_task(_dump(data))


def test_pulse_width_bounds():
    data = yaml.safe_load(serialize_task(generate_task(Family.E, Level.L2)))
    data["contract"]["tau"] = 3
    with pytest.raises(TaskSemanticError):
        parse_task(_dump(data))


def _dump(data: dict) -> str:
    return yaml.safe_dump(data, sort_keys=False)


def test_load_task_errors(tmp_path):
    with pytest.raises(UnreadableTaskError):
        load_task(tmp_path / "missing.yaml")
    path = tmp_path / "task.yaml"
    path.write_text(MINIMAL)
    assert load_task(path).task_id == "A_simultaneous_lights_L1"
