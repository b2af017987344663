"""
Capacity-gap arithmetic. Success rates with and without oracle interventions split the 100% capacity
space into what the agent already achieves and three gaps: knowledge identification, experimental
discovery and knowledge application.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Any

RATE_STEP = Decimal("0.1")
RATIO_STEP = Decimal("0.01")
UNDEFINED = "n/a"

# with hints and the scientist sub-agent, by consolidation structure
CONSOLIDATION_RATES = {
    "self-determined": Decimal("58.0"),
    "finding-explanation-example": Decimal("60.5"),
    "claim-proof-constraints-example": Decimal("64.0"),
}


def to_decimal(value: float | int | str | Decimal) -> Decimal:
    return value if isinstance(value, Decimal) else Decimal(str(value))


def round_rate(value: Decimal) -> Decimal:
    return value.quantize(RATE_STEP, rounding=ROUND_HALF_UP)


def _ratio(delta: Decimal, baseline: Decimal) -> Decimal | None:
    if baseline == 0:
        return None
    return (delta / baseline).quantize(RATIO_STEP, rounding=ROUND_HALF_UP)


@dataclass(frozen=True, slots=True)
class GapReport:
    """
    Attributes
    ----------
    baseline, with_hint, with_hint_scientist: Decimal
        Success rates in percent.
    delta_id, delta_ds, delta_app: Decimal
        Identification, discovery and application gaps in percent.
    r_id, r_ds, r_app: Decimal | None
        Each gap divided by the baseline, `None` when the baseline is 0.
    """

    model: str
    baseline: Decimal
    with_hint: Decimal
    with_hint_scientist: Decimal
    delta_id: Decimal
    delta_ds: Decimal
    delta_app: Decimal
    r_id: Decimal | None
    r_ds: Decimal | None
    r_app: Decimal | None

    @property
    def total(self) -> Decimal:
        return self.baseline + self.delta_id + self.delta_ds + self.delta_app

    def row(self) -> str:
        """
        The table cells, such as `26.0 | Δ26.5 (1.02×) | 52.5 | Δ11.5 (0.44×) | 64.0 | Δ36.0 (1.38×)`.
        """
        return " | ".join(
            [
                f"{self.baseline}",
                _delta_cell(self.delta_id, self.r_id),
                f"{self.with_hint}",
                _delta_cell(self.delta_ds, self.r_ds),
                f"{self.with_hint_scientist}",
                _delta_cell(self.delta_app, self.r_app),
            ]
        )

    def to_dict(self) -> dict[str, Any]:
        def ratio(value: Decimal | None) -> float | str:
            return UNDEFINED if value is None else float(value)

        return {
            "model": self.model,
            "baseline": float(self.baseline),
            "with_hint": float(self.with_hint),
            "with_hint_scientist": float(self.with_hint_scientist),
            "delta_id": float(self.delta_id),
            "delta_ds": float(self.delta_ds),
            "delta_app": float(self.delta_app),
            "r_id": ratio(self.r_id),
            "r_ds": ratio(self.r_ds),
            "r_app": ratio(self.r_app),
        }


def _delta_cell(delta: Decimal, ratio: Decimal | None) -> str:
    return f"Δ{delta} ({UNDEFINED if ratio is None else f'{ratio}×'})"


def gap_decompose(
    baseline: float | Decimal, with_hint: float | Decimal, with_hint_scientist: float | Decimal, model: str = ""
) -> GapReport:
    """
    Split the capacity space from three success rates.

    Rates need not be increasing: a weak model may lose performance with an intervention, and its
    delta is then negative. The four terms always add up to exactly 100.

    Parameters
    ----------
    baseline: float | Decimal
        Success rate without assistance, in percent.
    with_hint: float | Decimal
        Success rate with the knowledge hints.
    with_hint_scientist: float | Decimal
        Success rate with the hints and the scientist sub-agent.
    model: str
        Label carried into the report.
    """
    base = round_rate(to_decimal(baseline))
    hint = round_rate(to_decimal(with_hint))
    full = round_rate(to_decimal(with_hint_scientist))
    delta_id = hint - base
    delta_ds = full - hint
    delta_app = Decimal(100) - full
    return GapReport(
        model=model,
        baseline=base,
        with_hint=hint,
        with_hint_scientist=full,
        delta_id=delta_id,
        delta_ds=delta_ds,
        delta_app=round_rate(delta_app),
        r_id=_ratio(delta_id, base),
        r_ds=_ratio(delta_ds, base),
        r_app=_ratio(delta_app, base),
    )


def consolidation_delta(rate_a: float | Decimal, rate_b: float | Decimal) -> Decimal:
    """
    Gain of one knowledge consolidation structure over another, in percent.
    """
    return round_rate(to_decimal(rate_b) - to_decimal(rate_a))


def render_table(reports: Iterable[GapReport]) -> str:
    """
    Aligned plain-text table, one row per model in the given order.
    """
    reports = list(reports)
    header = ["model", "baseline", "identification gap", "w/ hint", "discovery gap", "w/ hint + scientist", "app gap"]
    rows = [[x.model, *x.row().split(" | ")] for x in reports]
    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(len(header))]
    lines = [" | ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in [header, *rows]]
    lines.insert(1, "-+-".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"


def render_json(reports: Iterable[GapReport]) -> str:
    return json.dumps([x.to_dict() for x in reports], indent=2, ensure_ascii=False) + "\n"
