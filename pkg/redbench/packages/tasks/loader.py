from __future__ import annotations

import logging
from collections import Counter
from pathlib import Path
from typing import Any

import yaml
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from redbench.core.world import Direction, Pos, Region

from .errors import TaskSchemaError, TaskSemanticError, TaskSyntaxError, UnreadableTaskError
from .models import (
    CHECK_ACTIONS,
    PALETTE,
    PRESS_ACTION,
    BranchReachContract,
    ButtonInput,
    EqualDelayContract,
    Family,
    Level,
    PulseContract,
    SequentialContract,
    Step,
    TaskSpec,
    TestCase,
    contract_from_dict,
    contract_to_dict,
    planar_distance,
)
from .schema import TASK_SCHEMA

log = logging.getLogger("redbench.packages.tasks")

_VALIDATOR = Draft202012Validator(TASK_SCHEMA)
_KNOWN_KEYS = frozenset(TASK_SCHEMA["properties"])


def _where(mark: yaml.Mark | None) -> str:
    if mark is None:
        return "unknown position"
    return f"line {mark.line + 1}, column {mark.column + 1}"


class _SubsetLoader(yaml.SafeLoader):
    """
    Safe loader restricted to mappings, sequences, scalars and comments.
    """

    def compose_node(self, parent, index):
        event = self.peek_event()
        if isinstance(event, yaml.AliasEvent):
            raise TaskSyntaxError(f"{_where(event.start_mark)}: aliases are not accepted")
        if getattr(event, "anchor", None) is not None:
            raise TaskSyntaxError(f"{_where(event.start_mark)}: anchors are not accepted")
        if getattr(event, "tag", None) is not None:
            raise TaskSyntaxError(f"{_where(event.start_mark)}: explicit tags are not accepted")
        return super().compose_node(parent, index)


class _FlowMapping(dict):
    pass


class _Dumper(yaml.SafeDumper):
    def ignore_aliases(self, data: Any) -> bool:
        return True


def _represent_list(dumper: yaml.SafeDumper, data: list) -> yaml.Node:
    flow = all(isinstance(x, int) for x in data)
    return dumper.represent_sequence("tag:yaml.org,2002:seq", data, flow_style=flow)


def _represent_flow_mapping(dumper: yaml.SafeDumper, data: _FlowMapping) -> yaml.Node:
    return dumper.represent_mapping("tag:yaml.org,2002:map", data, flow_style=True)


_Dumper.add_representer(list, _represent_list)
_Dumper.add_representer(_FlowMapping, _represent_flow_mapping)


def _load_document(text: str | bytes) -> dict[str, Any]:
    try:
        data = yaml.load(text, Loader=_SubsetLoader)
    except yaml.MarkedYAMLError as e:
        raise TaskSyntaxError(f"{_where(e.problem_mark or e.context_mark)}: {e.problem or e.context}") from None
    except yaml.YAMLError as e:
        raise TaskSyntaxError(str(e)) from None
    if not isinstance(data, dict):
        raise TaskSchemaError("a task file must be a mapping at the top level")
    return data


def _check_schema(data: dict[str, Any]):
    error = best_match(_VALIDATOR.iter_errors(data))
    if error is None:
        return
    path = "/".join(str(x) for x in error.absolute_path) or "(root)"
    raise TaskSchemaError(f"{path}: {error.message}")


def _build(data: dict[str, Any]) -> TaskSpec:
    family = Family(data["family"])
    button = data["inputs"]["button"]
    metadata = dict(data.get("metadata") or {})
    for key, value in data.items():
        if key not in _KNOWN_KEYS:
            metadata[key] = value
    try:
        contract = contract_from_dict(family, data["contract"])
    except TypeError as e:
        raise TaskSchemaError(f"contract: {e}") from None
    return TaskSpec(
        task_id=data["task_id"],
        family=family,
        level=Level(data["level"]),
        task_name=data["task_name"],
        task_description=data["task_description"],
        world=Region(Pos.from_list(data["world"]["anchor"]), data["world"]["radius"]),
        allowed_blocks=tuple(data["allowed_blocks"]),
        inputs=ButtonInput(
            Pos.from_list(button["pos"]), Direction(button.get("facing", "up")), button.get("pinned", True)
        ),
        outputs=tuple(Pos.from_list(x) for x in data["outputs"]["lamps"]),
        contract=contract,
        test_cases=tuple(
            TestCase(
                case["name"],
                tuple(Step(step["action"], dict(step.get("params") or {})) for step in case["sequence"]),
            )
            for case in data["test_cases"]
        ),
        metadata=metadata,
    )


def validate_task(spec: TaskSpec):
    """
    Check the consistency rules a JSON Schema cannot express.

    Raises
    ------
    TaskSemanticError
        The first inconsistency found.
    """
    if unknown := [x for x in spec.allowed_blocks if x not in PALETTE]:
        raise TaskSemanticError(f"{', '.join(unknown)} is not part of the component palette")
    for required in ("minecraft:redstone_lamp", "minecraft:stone_button"):
        if required not in spec.allowed_blocks:
            raise TaskSemanticError(f"the palette must include {required}")
    if len(spec.outputs) != spec.n:
        raise TaskSemanticError(f"contract expects {spec.n} lamps but {len(spec.outputs)} outputs are declared")
    if len(set(spec.outputs)) != len(spec.outputs):
        raise TaskSemanticError("lamp positions must be distinct")
    for pos in (*spec.outputs, spec.inputs.pos):
        if not spec.world.contains(pos):
            raise TaskSemanticError(f"{pos} is outside the build region")
    if spec.inputs.pos in spec.outputs or spec.inputs.support in spec.outputs:
        raise TaskSemanticError("the button and its support cannot overlap a lamp")

    anchor = spec.world.anchor
    match spec.contract:
        case SequentialContract(n=n, deltas=deltas):
            if len(deltas) != n - 1:
                raise TaskSemanticError(f"{n} stages need {n - 1} delays, got {len(deltas)}")
        case PulseContract(tau=tau):
            if not 4 <= tau <= 12:
                raise TaskSemanticError(f"tau must be between 4 and 12 ticks, got {tau}")
        case BranchReachContract(max_reach=max_reach, require_repeaters=require_repeaters):
            for pos in spec.outputs:
                if (distance := planar_distance(anchor, pos)) > max_reach:
                    raise TaskSemanticError(f"lamp {pos} is {distance} blocks away, max reach is {max_reach}")
            if require_repeaters and "minecraft:redstone_repeater" not in spec.allowed_blocks:
                raise TaskSemanticError("repeaters are required but not part of the palette")
        case EqualDelayContract(distance_buckets=buckets):
            found = Counter(planar_distance(anchor, pos) for pos in spec.outputs)
            if outside := sorted(set(found) - set(buckets)):
                raise TaskSemanticError(f"lamp distances {outside} fall outside the buckets {list(buckets)}")
            if spec.n >= len(buckets) and (empty := [x for x in buckets if not found[x]]):
                raise TaskSemanticError(f"no lamp in the distance buckets {empty}")

    for case in spec.test_cases:
        presses = sum(1 for x in case.sequence if x.action == PRESS_ACTION)
        if presses != 1:
            raise TaskSemanticError(f"test case {case.name!r} must press the button exactly once, found {presses}")
        for step in case.sequence:
            if step.action != PRESS_ACTION and step.action not in CHECK_ACTIONS:
                raise TaskSemanticError(f"test case {case.name!r} uses the unknown action {step.action!r}")


def parse_task(text: str | bytes) -> TaskSpec:
    """
    Parse and validate a task file.

    Parameters
    ----------
    text: str | bytes
        The YAML document, bytes are decoded as UTF-8.

    Returns
    -------
    TaskSpec
        The validated task. Unknown top-level keys are moved under `metadata`.

    Raises
    ------
    TaskSyntaxError
        Invalid YAML, or YAML outside the accepted subset.
    TaskSchemaError
        Missing field, wrong type or unknown enum value.
    TaskSemanticError
        The fields contradict each other.
    """
    data = _load_document(text)
    _check_schema(data)
    spec = _build(data)
    validate_task(spec)
    return spec


def task_to_dict(spec: TaskSpec) -> dict[str, Any]:
    data: dict[str, Any] = {
        "task_id": spec.task_id,
        "family": spec.family.value,
        "level": spec.level.value,
        "task_name": spec.task_name,
        "task_description": spec.task_description,
        "world": {"anchor": spec.world.anchor.to_list(), "radius": spec.world.radius},
        "allowed_blocks": list(spec.allowed_blocks),
        "inputs": {
            "button": {
                "pos": spec.inputs.pos.to_list(),
                "facing": spec.inputs.facing.value,
                "pinned": spec.inputs.pinned,
            }
        },
        "outputs": {"lamps": [x.to_list() for x in spec.outputs]},
        "contract": contract_to_dict(spec.contract),
        "test_cases": [],
    }
    for case in spec.test_cases:
        sequence = []
        for step in case.sequence:
            entry = _FlowMapping(action=step.action)
            if step.params:
                entry["params"] = _FlowMapping(step.params)
            sequence.append(entry)
        data["test_cases"].append({"name": case.name, "sequence": sequence})
    if spec.metadata:
        data["metadata"] = spec.metadata
    return data


def serialize_task(spec: TaskSpec) -> str:
    """
    Canonical YAML form of a task: fixed key order, flow style for integer lists and test steps.
    """
    return yaml.dump(
        task_to_dict(spec), Dumper=_Dumper, sort_keys=False, allow_unicode=True, width=120, default_flow_style=False
    )


def load_task(path: Path) -> TaskSpec:
    try:
        text = path.read_bytes()
    except OSError as e:
        raise UnreadableTaskError(f"{path}: {e.strerror}") from None
    spec = parse_task(text)
    log.debug(f"Loaded task {spec.task_id} from {path}")
    return spec


def dump_task(spec: TaskSpec, path: Path):
    path.write_text(serialize_task(spec), encoding="utf-8")
