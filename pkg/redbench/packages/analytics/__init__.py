from .gaps import GapReport, consolidation_delta, gap_decompose
from .knowledge import BookFormat, KnowledgeBook, KnowledgeEntry, parse_book, render_book, store_entry
from .reports import ExperimentArchive, ExperimentReport, history, store_report
from .results import RunResult, aggregate, breakdown, task_metrics

__all__ = [
    "BookFormat",
    "ExperimentArchive",
    "ExperimentReport",
    "GapReport",
    "KnowledgeBook",
    "KnowledgeEntry",
    "RunResult",
    "aggregate",
    "breakdown",
    "consolidation_delta",
    "gap_decompose",
    "history",
    "parse_book",
    "render_book",
    "store_entry",
    "store_report",
    "task_metrics",
]
