"""
JSON Schema of a task file, applied to the YAML document once it is loaded.

The schema only checks structure. Cross-field consistency (lamp count, region bounds, palette) is
checked afterwards by `redbench.packages.tasks.loader.validate_task`.
"""

from typing import Any

from redbench.core.world import Direction

from .models import Family, Level

_POSITION: dict[str, Any] = {
    "type": "array",
    "items": {"type": "integer"},
    "minItems": 3,
    "maxItems": 3,
}
_TOLERANCE: dict[str, Any] = {"type": "integer", "minimum": 0}
_TICKS: dict[str, Any] = {"type": "array", "items": {"type": "integer", "minimum": 1}}

# keys accepted in the contract mapping of each family
CONTRACT_KEYS: dict[Family, tuple[str, ...]] = {
    Family.A: ("n", "skew_tol"),
    Family.B: ("n", "max_reach", "skew_tol", "require_repeaters", "require_t_junction"),
    Family.C: ("n", "deltas", "tol"),
    Family.D: ("n", "distance_buckets", "skew_tol"),
    Family.E: ("n", "tau", "tol"),
}
_REQUIRED_CONTRACT_KEYS: dict[Family, list[str]] = {
    Family.A: ["n"],
    Family.B: ["n", "max_reach"],
    Family.C: ["n", "deltas"],
    Family.D: ["n"],
    Family.E: ["n", "tau"],
}


def _family_rule(family: Family) -> dict[str, Any]:
    return {
        "if": {"properties": {"family": {"const": family.value}}, "required": ["family"]},
        "then": {
            "properties": {
                "contract": {
                    "required": _REQUIRED_CONTRACT_KEYS[family],
                    "propertyNames": {"enum": list(CONTRACT_KEYS[family])},
                }
            }
        },
    }


TASK_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "task_id",
        "family",
        "level",
        "task_name",
        "task_description",
        "world",
        "allowed_blocks",
        "inputs",
        "outputs",
        "contract",
        "test_cases",
    ],
    "properties": {
        "task_id": {"type": "string", "minLength": 1},
        "family": {"enum": [x.value for x in Family]},
        "level": {"enum": [x.value for x in Level]},
        "task_name": {"type": "string"},
        "task_description": {"type": "string"},
        "world": {
            "type": "object",
            "required": ["anchor", "radius"],
            "properties": {"anchor": _POSITION, "radius": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
        "allowed_blocks": {
            "type": "array",
            "items": {"type": "string", "pattern": "^[a-z_]+:[a-z_]+$"},
            "minItems": 1,
            "uniqueItems": True,
        },
        "inputs": {
            "type": "object",
            "required": ["button"],
            "properties": {
                "button": {
                    "type": "object",
                    "required": ["pos"],
                    "properties": {
                        "pos": _POSITION,
                        "facing": {"enum": [x.value for x in Direction]},
                        "pinned": {"type": "boolean"},
                    },
                    "additionalProperties": False,
                }
            },
            "additionalProperties": False,
        },
        "outputs": {
            "type": "object",
            "required": ["lamps"],
            "properties": {"lamps": {"type": "array", "items": _POSITION, "minItems": 1}},
            "additionalProperties": False,
        },
        "contract": {
            "type": "object",
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "skew_tol": _TOLERANCE,
                "tol": _TOLERANCE,
                "max_reach": {"type": "integer", "minimum": 1},
                "require_repeaters": {"type": "boolean"},
                "require_t_junction": {"type": "boolean"},
                "deltas": _TICKS,
                "distance_buckets": {**_TICKS, "minItems": 1},
                "tau": {"type": "integer"},
            },
        },
        "test_cases": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "sequence"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "sequence": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["action"],
                            "properties": {
                                "action": {"type": "string", "pattern": "^(press_button|check_[a-z_]+)$"},
                                "params": {"type": "object"},
                            },
                            "additionalProperties": False,
                        },
                    },
                },
                "additionalProperties": False,
            },
        },
        "metadata": {"type": "object"},
    },
    "allOf": [_family_rule(x) for x in Family],
}
