from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any

from redbench.core.errors import InvalidStateError
from redbench.core.world import Pos, World
from redbench.packages.tasks.models import TaskSpec

from .errors import BadRequestError, BudgetExhaustedError, UnknownToolError


class Tool(enum.StrEnum):
    GET_BLOCK_STATE = "get-block-state"
    GET_EVENT_STREAM = "get-event-stream"
    SCAN_REDSTONE_AREA = "scan-redstone-area"
    SET_BLOCK = "set-block"
    ACTIVATE_BUTTON = "activate-button"


def encode(data: dict[str, Any]) -> str:
    """
    Wire encoding shared by requests and responses: sorted keys, no whitespace, one line.
    """
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True, slots=True)
class ToolRequest:
    id: str
    tool: Tool
    params: dict[str, Any] = field(default_factory=dict, hash=False)

    @classmethod
    def from_dict(cls, data: Any) -> ToolRequest:
        if not isinstance(data, dict):
            raise BadRequestError("a request must be a JSON object")
        request_id = data.get("id")
        if not isinstance(request_id, str):
            raise BadRequestError("the request id must be a string")
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise BadRequestError("params must be an object")
        try:
            tool = Tool(data.get("tool"))
        except ValueError:
            raise UnknownToolError(repr(data.get("tool"))) from None
        return cls(request_id, tool, params)

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "tool": self.tool.value, "params": self.params}

    def pos(self, name: str = "pos") -> Pos:
        try:
            return Pos.from_list(self.params[name])
        except KeyError:
            raise BadRequestError(f"missing parameter {name!r}") from None
        except InvalidStateError:
            raise BadRequestError(f"{name} must be an array of three integers") from None

    def integer(self, name: str, default: int) -> int:
        value = self.params.get(name, default)
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise BadRequestError(f"{name} must be a non-negative integer")
        return value


@dataclass(frozen=True, slots=True)
class ToolResponse:
    """
    Exactly one of `result` and `error` is set. `id` echoes the request, it is `None` when the request
    line could not be read at all.
    """

    id: str | None
    result: dict[str, Any] | None = None
    error: dict[str, str] | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"id": self.id, "ok": self.ok}
        if self.error is not None:
            data["error"] = self.error
        else:
            data["result"] = self.result or {}
        return data

    def to_line(self) -> str:
        return encode(self.to_dict())


@dataclass(slots=True)
class TrialBudget:
    limit: int = 50
    used: int = 0

    @property
    def remaining(self) -> int:
        return self.limit - self.used

    def consume(self):
        """
        Count one verification trial.

        Raises
        ------
        BudgetExhaustedError
            Every trial has been used already.
        """
        if self.used >= self.limit:
            raise BudgetExhaustedError(self.limit)
        self.used += 1


@dataclass(slots=True)
class Session:
    """
    One agent attempt at one task.

    Attributes
    ----------
    spec: TaskSpec
        The task being solved.
    world: World
        The agent's world, owned by this session only.
    budget: TrialBudget
        Verification trials allowed and used.
    event_cursor: int
        Index of the first event `get-event-stream` has not returned yet.
    transcript: list[tuple[ToolRequest | None, ToolResponse]]
        Every request handled, with its response, in order. Unreadable requests are recorded as `None`.
    placements: int
        Successful `set-block` calls.
    revisions: int
        `set-block` calls that replaced a block other than air.
    closed: bool
        Set by `submit`.
    """

    spec: TaskSpec
    world: World
    budget: TrialBudget
    event_cursor: int = 0
    transcript: list[tuple[ToolRequest | None, ToolResponse]] = field(default_factory=list)
    placements: int = 0
    revisions: int = 0
    closed: bool = False

    def metrics(self) -> dict[str, int]:
        return {"trials_used": self.budget.used, "placements": self.placements, "revisions": self.revisions}
