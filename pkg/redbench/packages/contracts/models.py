from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

from redbench.core.world import Pos


@dataclass(frozen=True, slots=True)
class LampTrace:
    """
    Lamp states at every tick from the press until the device settled or the horizon was reached.

    Attributes
    ----------
    press_tick: int
        Tick of the button press. Row `k` of the grid is tick `press_tick + k`.
    lamps: tuple[Pos, ...]
        Lamp positions, in the task's output order.
    initial: tuple[bool, ...]
        Lamp states just before the press.
    grid: tuple[tuple[bool, ...], ...]
        One row per tick, one column per lamp.
    """

    press_tick: int
    lamps: tuple[Pos, ...]
    initial: tuple[bool, ...]
    grid: tuple[tuple[bool, ...], ...]

    @property
    def end_tick(self) -> int:
        return self.press_tick + len(self.grid) - 1

    @property
    def onsets(self) -> list[int | None]:
        """
        First tick each lamp is lit, at or after the press.
        """
        result: list[int | None] = []
        for column in range(len(self.lamps)):
            result.append(
                next((self.press_tick + k for k, row in enumerate(self.grid) if row[column]), None)
            )
        return result

    @property
    def offsets(self) -> list[int | None]:
        """
        First tick each lamp is unlit again after its onset. `None` for lamps that never lit or
        were still lit at the end of the trace.
        """
        result: list[int | None] = []
        for column, onset in enumerate(self.onsets):
            if onset is None:
                result.append(None)
                continue
            start = onset - self.press_tick
            result.append(
                next(
                    (self.press_tick + k for k in range(start, len(self.grid)) if not self.grid[k][column]),
                    None,
                )
            )
        return result

    @property
    def lit_count(self) -> int:
        return sum(1 for x in self.onsets if x is not None)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["tick", *(f"lamp_{i}" for i in range(len(self.lamps)))])
        for k, row in enumerate(self.grid):
            writer.writerow([self.press_tick + k, *(int(x) for x in row)])
        return buffer.getvalue()


@dataclass(frozen=True, slots=True)
class Violation:
    """
    One broken rule.

    Attributes
    ----------
    rule: str
        Short identifier, such as `never-lit`, `skew` or `out-of-palette`.
    lamps: tuple[int, ...]
        Indices of the lamps involved, in output order.
    pos: Pos | None
        Block involved, for static rules.
    measured: Any
        The value found.
    allowed: Any
        The value or range the contract allows.
    """

    rule: str
    lamps: tuple[int, ...] = ()
    pos: Pos | None = None
    measured: Any = None
    allowed: Any = None

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"rule": self.rule}
        if self.lamps:
            data["lamps"] = list(self.lamps)
        if self.pos is not None:
            data["pos"] = self.pos.to_list()
        data["measured"] = self.measured
        data["allowed"] = self.allowed
        return data

    def __str__(self) -> str:
        subject = ""
        if self.lamps:
            subject = f" on lamp{'s' if len(self.lamps) > 1 else ''} {', '.join(map(str, self.lamps))}"
        elif self.pos is not None:
            subject = f" at {self.pos}"
        return f"{self.rule}{subject}: measured {self.measured}, allowed {self.allowed}"


@dataclass(slots=True)
class Verdict:
    violations: list[Violation] = field(default_factory=list)
    diagnostics: str = ""

    @property
    def passed(self) -> bool:
        return not self.violations

    def merge(self, other: Verdict) -> Verdict:
        diagnostics = "\n".join(x for x in (self.diagnostics, other.diagnostics) if x)
        return Verdict(self.violations + other.violations, diagnostics)

    def to_dict(self) -> dict[str, Any]:
        return {
            "pass": self.passed,
            "violations": [x.to_dict() for x in self.violations],
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"
