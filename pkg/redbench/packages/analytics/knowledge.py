"""
The knowledge book: an append-only store of findings distilled from experiment reports, rendered as a
plain-text document with fixed headings.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import ClassVar

from .errors import MalformedBookError, MissingSectionError
from .gaps import CONSOLIDATION_RATES

_ENTRY_HEADING = re.compile(r"^## Entry (\d+)$")
_SECTION_HEADING = re.compile(r"^### (.+)$")
_BOOK_HEADING = re.compile(r"^# Knowledge book \((.+)\)$")
_SOURCES = "Sources: "


class BookFormat(enum.StrEnum):
    SELF_DETERMINED = "self-determined"
    FINDING_EXPLANATION_EXAMPLE = "finding-explanation-example"
    CLAIM_PROOF_CONSTRAINTS_EXAMPLE = "claim-proof-constraints-example"

    @property
    def reference_rate(self) -> Decimal:
        """
        Success rate with hints and the scientist sub-agent when it keeps its book in this format.
        """
        return CONSOLIDATION_RATES[self.value]

    @property
    def entry_type(self) -> type[BookEntry]:
        return _ENTRY_TYPES[self]


@dataclass(frozen=True, slots=True)
class BookEntry:
    """
    Base of the entry formats. `SECTIONS` maps each text field to its heading, in rendering order.
    """

    SECTIONS: ClassVar[tuple[tuple[str, str], ...]] = ()

    def __post_init__(self):
        for name, heading in self.SECTIONS:
            text = getattr(self, name)
            if not isinstance(text, str) or not text.strip():
                raise MissingSectionError(heading)
            object.__setattr__(self, name, text.strip())
            for line in text.splitlines():
                if line.startswith("#"):
                    raise MalformedBookError(f"the {heading} section cannot contain a line starting with #")
        if hasattr(self, "source_reports"):
            object.__setattr__(self, "source_reports", tuple(int(x) for x in getattr(self, "source_reports")))

    @property
    def sources(self) -> tuple[int, ...]:
        return tuple(getattr(self, "source_reports", ()))

    def sections(self) -> list[tuple[str, str]]:
        return [(heading, getattr(self, name)) for name, heading in self.SECTIONS]


@dataclass(frozen=True, slots=True)
class KnowledgeEntry(BookEntry):
    """
    A discovered law, the evidence for it, where it stops holding and a worked example.

    Attributes
    ----------
    claim: str
        The law or dynamic, stated as a single testable sentence.
    evidence_proof: str
        The experiments and measurements supporting the claim.
    constraints: str
        Conditions under which the claim holds.
    example: str
        How to apply it.
    source_reports: tuple[int, ...]
        Identifiers of the experiment reports the entry was distilled from.
    """

    SECTIONS: ClassVar[tuple[tuple[str, str], ...]] = (
        ("claim", "Claim"),
        ("evidence_proof", "Evidence / Proof"),
        ("constraints", "Constraints"),
        ("example", "Example"),
    )

    claim: str
    evidence_proof: str
    constraints: str
    example: str
    source_reports: tuple[int, ...] = field(default=())


@dataclass(frozen=True, slots=True)
class FindingEntry(BookEntry):
    SECTIONS: ClassVar[tuple[tuple[str, str], ...]] = (
        ("finding", "Finding"),
        ("explanation", "Explanation"),
        ("example", "Example"),
    )

    finding: str
    explanation: str
    example: str
    source_reports: tuple[int, ...] = field(default=())


@dataclass(frozen=True, slots=True)
class SummaryEntry(BookEntry):
    """
    A free-form summary written however the scientist sees fit.
    """

    SECTIONS: ClassVar[tuple[tuple[str, str], ...]] = (("summary", "Summary"),)

    summary: str
    source_reports: tuple[int, ...] = field(default=())


_ENTRY_TYPES: dict[BookFormat, type[BookEntry]] = {
    BookFormat.SELF_DETERMINED: SummaryEntry,
    BookFormat.FINDING_EXPLANATION_EXAMPLE: FindingEntry,
    BookFormat.CLAIM_PROOF_CONSTRAINTS_EXAMPLE: KnowledgeEntry,
}


@dataclass(slots=True)
class KnowledgeBook:
    format: BookFormat = BookFormat.CLAIM_PROOF_CONSTRAINTS_EXAMPLE
    entries: list[BookEntry] = field(default_factory=list)


def store_entry(book: KnowledgeBook, entry: BookEntry) -> int:
    """
    Append an entry and return its identifier, starting at 1.
    """
    if not isinstance(entry, book.format.entry_type):
        raise MalformedBookError(f"a {book.format} book cannot hold a {type(entry).__name__}")
    book.entries.append(entry)
    return len(book.entries)


def render_book(book: KnowledgeBook) -> str:
    lines = [f"# Knowledge book ({book.format})", ""]
    for i, entry in enumerate(book.entries, start=1):
        sources = ", ".join(f"ER-{x}" for x in entry.sources) or "none"
        lines += [f"## Entry {i}", f"{_SOURCES}{sources}", ""]
        for heading, text in entry.sections():
            lines += [f"### {heading}", text, ""]
    return "\n".join(lines)


def _parse_sources(line: str, entry: int) -> tuple[int, ...]:
    if not line.startswith(_SOURCES):
        raise MalformedBookError(f"entry {entry} has no sources line")
    value = line.removeprefix(_SOURCES).strip()
    if value == "none":
        return ()
    try:
        return tuple(int(x.strip().removeprefix("ER-")) for x in value.split(","))
    except ValueError:
        raise MalformedBookError(f"entry {entry} has unreadable sources {value!r}") from None


def _build_entry(kind: type[BookEntry], entry: int, sources: tuple[int, ...], found: dict[str, list[str]]):
    values: dict[str, str] = {}
    for name, heading in kind.SECTIONS:
        if heading not in found:
            raise MissingSectionError(f"{heading} in entry {entry}")
        values[name] = "\n".join(found[heading]).strip()
    if unknown := set(found) - {heading for _, heading in kind.SECTIONS}:
        raise MalformedBookError(f"entry {entry} has unknown sections {', '.join(sorted(unknown))}")
    return kind(**values, source_reports=sources)  # type: ignore


def parse_book(text: str, format: BookFormat | None = None) -> KnowledgeBook:
    """
    Read back a rendered book.

    Parameters
    ----------
    text: str
        Output of `render_book`.
    format: BookFormat | None
        Expected format. When omitted, the format named in the title is used.

    Raises
    ------
    MalformedBookError
        The layout cannot be read, or the format differs from the expected one.
    MissingSectionError
        An entry lacks one of the headings of its format.
    """
    lines = text.splitlines()
    if not lines or not (title := _BOOK_HEADING.match(lines[0])):
        raise MalformedBookError("missing book title")
    try:
        found_format = BookFormat(title[1])
    except ValueError:
        raise MalformedBookError(f"unknown format {title[1]!r}") from None
    if format is not None and found_format != format:
        raise MalformedBookError(f"expected a {format} book, found {found_format}")
    book = KnowledgeBook(found_format)
    kind = found_format.entry_type

    index = 1
    while index < len(lines):
        heading = _ENTRY_HEADING.match(lines[index])
        if heading is None:
            if lines[index].strip():
                raise MalformedBookError(f"line {index + 1}: expected an entry heading")
            index += 1
            continue
        number = int(heading[1])
        if index + 1 >= len(lines):
            raise MalformedBookError(f"entry {number} has no sources line")
        sources = _parse_sources(lines[index + 1], number)
        index += 2
        found: dict[str, list[str]] = {}
        current: list[str] | None = None
        while index < len(lines) and not _ENTRY_HEADING.match(lines[index]):
            if section := _SECTION_HEADING.match(lines[index]):
                current = found.setdefault(section[1], [])
            elif current is not None:
                current.append(lines[index])
            elif lines[index].strip():
                raise MalformedBookError(f"line {index + 1}: text outside of a section")
            index += 1
        book.entries.append(_build_entry(kind, number, sources, found))
    return book
