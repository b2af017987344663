from .corpus import CASE_IDS, build_failure_case, load_corpus, simulate_case
from .models import Device, ExpectedOutcome, FailureCategory, Placement

__all__ = [
    "CASE_IDS",
    "Device",
    "ExpectedOutcome",
    "FailureCategory",
    "Placement",
    "build_failure_case",
    "load_corpus",
    "simulate_case",
]
