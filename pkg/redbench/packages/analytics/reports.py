from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import MissingSectionError, RepeatCountError, UnknownReportError, UnreadableArchiveError

log = logging.getLogger("redbench.packages.analytics")

MIN_REPEATS = 3
SECTIONS = (
    "research_question",
    "hypothesis",
    "experiment_design",
    "experiment_steps",
    "experiment_record",
    "experiment_results",
    "analysis_summary",
    "next_steps",
)


@dataclass(frozen=True, slots=True)
class ExperimentReport:
    """
    The write-up of one experiment run by the scientist sub-agent. Each experiment is repeated at
    least three times before its results are reported.

    Attributes
    ----------
    sections: dict[str, str]
        The eight sections, keyed by the names in `SECTIONS`.
    repeat_count: int
        How many times the experiment was run.
    """

    sections: dict[str, str] = field(hash=False)
    repeat_count: int = MIN_REPEATS

    def __post_init__(self):
        for name in SECTIONS:
            text = self.sections.get(name)
            if not isinstance(text, str) or not text.strip():
                raise MissingSectionError(name)
        if unknown := set(self.sections) - set(SECTIONS):
            raise MissingSectionError(f"unknown section(s) {', '.join(sorted(unknown))}")
        if self.repeat_count < MIN_REPEATS:
            raise RepeatCountError(self.repeat_count)

    def __getitem__(self, name: str) -> str:
        return self.sections[name]

    def to_dict(self) -> dict[str, Any]:
        return {**{name: self.sections[name] for name in SECTIONS}, "repeat_count": self.repeat_count}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExperimentReport:
        sections = {k: v for k, v in data.items() if k != "repeat_count"}
        return cls(sections, int(data.get("repeat_count", MIN_REPEATS)))


@dataclass(slots=True)
class ExperimentArchive:
    reports: list[ExperimentReport] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.reports)

    def get(self, report_id: int) -> ExperimentReport:
        if not 1 <= report_id <= len(self.reports):
            raise UnknownReportError(report_id)
        return self.reports[report_id - 1]


def store_report(archive: ExperimentArchive, report: ExperimentReport) -> int:
    """
    Archive a report and return its identifier. Identifiers start at 1 and only grow.
    """
    archive.reports.append(report)
    log.debug(f"Archived experiment report {len(archive.reports)}")
    return len(archive.reports)


def history(archive: ExperimentArchive, k: int | None = None) -> list[tuple[int, ExperimentReport]]:
    """
    The first `k` reports with their identifiers, in archive order. All of them when `k` is omitted.
    """
    reports = archive.reports if k is None else archive.reports[: max(k, 0)]
    return list(enumerate(reports, start=1))


def save_archive(archive: ExperimentArchive, path: Path):
    data = {"reports": [{"id": i, **x.to_dict()} for i, x in history(archive)]}
    path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def load_archive(path: Path) -> ExperimentArchive:
    """
    Raises
    ------
    UnreadableArchiveError
        The file cannot be read or its identifiers are not 1, 2, 3 and so on.
    MissingSectionError, RepeatCountError
        A stored report is incomplete.
    """
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise UnreadableArchiveError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UnreadableArchiveError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    archive = ExperimentArchive()
    for expected, entry in enumerate(data.get("reports", []), start=1):
        entry = dict(entry)
        if entry.pop("id", expected) != expected:
            raise UnreadableArchiveError(f"{path}: report identifiers must be consecutive from 1")
        store_report(archive, ExperimentReport.from_dict(entry))
    return archive
