from .checker import (
    check_pulse,
    check_sequential,
    check_simultaneous,
    check_static,
    check_t_junction,
    evaluate,
    record_trace,
)
from .models import LampTrace, Verdict, Violation

__all__ = [
    "LampTrace",
    "Verdict",
    "Violation",
    "check_pulse",
    "check_sequential",
    "check_simultaneous",
    "check_static",
    "check_t_junction",
    "evaluate",
    "record_trace",
]
