"""
Run results of agents on the task suite, and the success rates aggregated from them.
"""

from __future__ import annotations

import csv
import enum
import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from statistics import fmean
from typing import Any

from redbench.packages.tasks.models import Family, Level

from .errors import CsvSchemaError, EmptyResultSetError
from .gaps import GapReport, gap_decompose, round_rate

log = logging.getLogger("redbench.packages.analytics")

REQUIRED_COLUMNS = ("model", "assistance", "task_id", "run", "pass")
RATE_COLUMNS = ("model", "baseline", "with_hint", "with_hint_scientist")
_TASK_ID = re.compile(r"^(?P<family>[A-E])_.*?_(?P<level>L[1-5])(?:_|$)")
_TRUE = {"1", "true", "yes", "pass"}
_FALSE = {"0", "false", "no", "fail"}


class Assistance(enum.StrEnum):
    HINT = "hint"
    SCIENTIST = "scientist"


class Consolidation(enum.StrEnum):
    SELF_DETERMINED = "self-determined"
    FINDING_EXPLANATION_EXAMPLE = "finding-explanation-example"
    CLAIM_PROOF_CONSTRAINTS_EXAMPLE = "claim-proof-constraints-example"


class Setting(enum.StrEnum):
    INDEPENDENT = "independent"
    CURRICULUM = "curriculum"


BASELINE: frozenset[Assistance] = frozenset()
WITH_HINT = frozenset({Assistance.HINT})
WITH_HINT_SCIENTIST = frozenset({Assistance.HINT, Assistance.SCIENTIST})


def parse_assistance(value: str) -> frozenset[Assistance]:
    """
    Read `none`, `hint`, `scientist` or `hint+scientist` (any order, `+` or `,` separated).
    """
    value = value.strip().lower()
    if value in ("", "none", "baseline"):
        return BASELINE
    try:
        return frozenset(Assistance(x.strip()) for x in re.split(r"[+,]", value))
    except ValueError:
        raise CsvSchemaError(f"unknown assistance {value!r}") from None


def format_assistance(value: frozenset[Assistance]) -> str:
    return "+".join(sorted(value)) or "none"


@dataclass(frozen=True, slots=True)
class TaskOutcome:
    task_id: str
    run: int
    passed: bool
    trials: int | None = None
    revisions: int | None = None

    @property
    def family(self) -> Family | None:
        match = _TASK_ID.match(self.task_id)
        return Family(match["family"]) if match else None

    @property
    def level(self) -> Level | None:
        match = _TASK_ID.match(self.task_id)
        return Level(match["level"]) if match else None


@dataclass(slots=True)
class RunResult:
    """
    The outcomes of one model under one assistance configuration.

    Attributes
    ----------
    model: str
        Model name.
    assistance: frozenset[Assistance]
        Interventions enabled, empty for the baseline.
    consolidation: Consolidation | None
        How the scientist sub-agent structured its knowledge book, when it ran.
    setting: Setting
        Whether levels were solved in order with carried experience.
    outcomes: list[TaskOutcome]
        One entry per task and run.
    """

    model: str
    assistance: frozenset[Assistance] = BASELINE
    consolidation: Consolidation | None = None
    setting: Setting = Setting.CURRICULUM
    outcomes: list[TaskOutcome] = field(default_factory=list)

    @property
    def runs(self) -> int:
        return len({x.run for x in self.outcomes})

    @property
    def tasks(self) -> int:
        return len({x.task_id for x in self.outcomes})

    @property
    def passes(self) -> int:
        return sum(1 for x in self.outcomes if x.passed)

    @property
    def success_rate(self) -> float:
        return self.passes / len(self.outcomes) if self.outcomes else 0.0


def _matches(
    result: RunResult,
    model: str | None,
    assistance: frozenset[Assistance] | None,
    setting: Setting | None,
    consolidation: Consolidation | None,
) -> bool:
    return (
        (model is None or result.model == model)
        and (assistance is None or result.assistance == assistance)
        and (setting is None or result.setting == setting)
        and (consolidation is None or result.consolidation == consolidation)
    )


def select_outcomes(
    results: Iterable[RunResult],
    *,
    model: str | None = None,
    assistance: frozenset[Assistance] | None = None,
    setting: Setting | None = None,
    consolidation: Consolidation | None = None,
    family: Family | None = None,
    level: Level | None = None,
) -> list[TaskOutcome]:
    outcomes: list[TaskOutcome] = []
    for result in results:
        if not _matches(result, model, assistance, setting, consolidation):
            continue
        outcomes += [
            x
            for x in result.outcomes
            if (family is None or x.family == family) and (level is None or x.level == level)
        ]
    return outcomes


def _describe_filter(**filters: Any) -> str:
    parts = [f"{k}={format_assistance(v) if k == 'assistance' else v}" for k, v in filters.items() if v is not None]
    return ", ".join(parts) or "an empty result set"


def aggregate(results: Iterable[RunResult], **filters: Any) -> Decimal:
    """
    Success rate in percent, passes over task runs, rounded to one decimal.

    Parameters
    ----------
    results: Iterable[RunResult]
        The run results to aggregate.
    **filters
        Any of `model`, `assistance`, `setting`, `consolidation`, `family` and `level`.

    Raises
    ------
    EmptyResultSetError
        No outcome matches the filters.
    """
    outcomes = select_outcomes(results, **filters)
    if not outcomes:
        raise EmptyResultSetError(_describe_filter(**filters))
    passes = sum(1 for x in outcomes if x.passed)
    return round_rate(Decimal(passes) * 100 / Decimal(len(outcomes)))


def breakdown(
    results: Sequence[RunResult],
    model: str | None = None,
    assistance: frozenset[Assistance] | None = None,
    setting: Setting | None = None,
) -> dict[Level, dict[str, Decimal | None]]:
    """
    Level by family grid of success rates, with the average of each level under `"avg"`. Cells
    without any outcome are `None` and left out of the average.
    """
    grid: dict[Level, dict[str, Decimal | None]] = {}
    for level in Level:
        row: dict[str, Decimal | None] = {}
        for family in Family:
            try:
                row[family.value] = aggregate(
                    results, model=model, assistance=assistance, setting=setting, family=family, level=level
                )
            except EmptyResultSetError:
                row[family.value] = None
        known = [x for x in row.values() if x is not None]
        row["avg"] = round_rate(sum(known, Decimal(0)) / len(known)) if known else None
        grid[level] = row
    return grid


def render_breakdown(grid: dict[Level, dict[str, Decimal | None]]) -> str:
    columns = [*(x.value for x in Family), "avg"]
    lines = ["level | " + " | ".join(f"{x:>5}" for x in columns)]
    for level, row in grid.items():
        cells = ["  -  " if row[x] is None else f"{row[x]:>5}" for x in columns]
        lines.append(f"{level.value:<5} | " + " | ".join(cells))
    return "\n".join(lines) + "\n"


def task_metrics(results: Iterable[RunResult], **filters: Any) -> dict[str, float | None]:
    """
    Accuracy in percent, mean verification trials and mean engineer revisions over the filtered
    outcomes. Means are `None` when no outcome reports them.
    """
    outcomes = select_outcomes(results, **filters)
    if not outcomes:
        raise EmptyResultSetError(_describe_filter(**filters))
    trials = [x.trials for x in outcomes if x.trials is not None]
    revisions = [x.revisions for x in outcomes if x.revisions is not None]
    return {
        "acc": float(round_rate(Decimal(sum(x.passed for x in outcomes)) * 100 / len(outcomes))),
        "trials": round(fmean(trials), 2) if trials else None,
        "trials_eng": round(fmean(revisions), 2) if revisions else None,
    }


def models(results: Iterable[RunResult]) -> list[str]:
    return sorted({x.model for x in results})


def gap_reports(results: Sequence[RunResult], setting: Setting | None = None) -> list[GapReport]:
    """
    One gap decomposition per model, in model name order.
    """
    reports = []
    for model in models(results):
        rates = [
            aggregate(results, model=model, assistance=x, setting=setting)
            for x in (BASELINE, WITH_HINT, WITH_HINT_SCIENTIST)
        ]
        reports.append(gap_decompose(*rates, model=model))
    return reports


def _flag(value: str, line: int) -> bool:
    value = value.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise CsvSchemaError(f"line {line}: column pass must be 0 or 1, got {value!r}")


def _optional_int(row: dict[str, str], name: str, line: int) -> int | None:
    value = (row.get(name) or "").strip()
    if not value:
        return None
    try:
        return int(value)
    except ValueError:
        raise CsvSchemaError(f"line {line}: column {name} must be an integer, got {value!r}") from None


def _read_rows(path: Path) -> tuple[list[str], list[dict[str, str]]]:
    try:
        with path.open(newline="", encoding="utf-8") as file:
            reader = csv.DictReader(file)
            rows = list(reader)
            return list(reader.fieldnames or []), rows
    except OSError as e:
        raise CsvSchemaError(f"cannot read {path}: {e.strerror}") from None


def parse_results(columns: Sequence[str], rows: Iterable[dict[str, str]]) -> list[RunResult]:
    """
    Group result rows by model, assistance, consolidation and setting.

    Raises
    ------
    CsvSchemaError
        A required column is missing or a value cannot be read. The message names the column.
    """
    if missing := [x for x in REQUIRED_COLUMNS if x not in columns]:
        raise CsvSchemaError(f"missing column(s) {', '.join(missing)}")
    grouped: dict[tuple[Any, ...], RunResult] = {}
    for line, row in enumerate(rows, start=2):
        assistance = parse_assistance(row["assistance"] or "")
        try:
            setting = Setting((row.get("setting") or Setting.CURRICULUM.value).strip())
            consolidation = Consolidation(x.strip()) if (x := row.get("consolidation")) else None
        except ValueError as e:
            raise CsvSchemaError(f"line {line}: {e}") from None
        run = _optional_int(row, "run", line)
        if run is None:
            raise CsvSchemaError(f"line {line}: column run is empty")
        model = (row["model"] or "").strip()
        if not model:
            raise CsvSchemaError(f"line {line}: column model is empty")
        key = (model, assistance, consolidation, setting)
        result = grouped.setdefault(key, RunResult(model, assistance, consolidation, setting))
        result.outcomes.append(
            TaskOutcome(
                (row["task_id"] or "").strip(),
                run,
                _flag(row["pass"] or "", line),
                _optional_int(row, "trials", line),
                _optional_int(row, "revisions", line),
            )
        )
    return list(grouped.values())


def load_results(path: Path) -> list[RunResult]:
    columns, rows = _read_rows(path)
    results = parse_results(columns, rows)
    log.debug(f"Read {sum(len(x.outcomes) for x in results)} outcomes of {len(results)} configurations from {path}")
    return results


def load_rates(path: Path) -> list[GapReport]:
    """
    Read precomputed success rates, one row per model with the columns `model`, `baseline`,
    `with_hint` and `with_hint_scientist`.
    """
    columns, rows = _read_rows(path)
    if missing := [x for x in RATE_COLUMNS if x not in columns]:
        raise CsvSchemaError(f"missing column(s) {', '.join(missing)}")
    reports = []
    for line, row in enumerate(rows, start=2):
        try:
            rates = [Decimal(row[x].strip()) for x in RATE_COLUMNS[1:]]
        except (ArithmeticError, AttributeError):
            raise CsvSchemaError(f"line {line}: rates must be numbers") from None
        reports.append(gap_decompose(*rates, model=row["model"].strip()))
    return sorted(reports, key=lambda x: x.model)


def load_gap_reports(path: Path) -> list[GapReport]:
    """
    Gap reports from either a per-outcome results file or a per-model rates file.
    """
    columns, _ = _read_rows(path)
    if "baseline" in columns:
        return load_rates(path)
    return gap_reports(load_results(path))
