"""
The failure corpus: thirteen variations of a 32-lamp broadcast device, one working and twelve broken
in ways agents commonly get wrong, each with the number of lamps it is known to light.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from redbench.core.engine import press_button, step
from redbench.core.world import Pos, Region, World
from redbench.settings import settings

from .errors import InvalidDeviceError, UnknownCaseError
from .models import Device, ExpectedOutcome, FailureCategory

log = logging.getLogger("redbench.packages.devices")

FIXTURES_DIR = Path(__file__).resolve().parents[2] / "fixtures"
CASE_IDS = ("W", *(str(x) for x in range(1, 13)))


def normalize_case_id(case_id: str | int) -> str:
    """
    Accept `W`, `3`, `C3`, `case-3` or `03` and return the canonical identifier.
    """
    value = str(case_id).strip().upper().removeprefix("CASE").lstrip("-_ ").removeprefix("C")
    if value != "W":
        value = value.lstrip("0") or "0"
    return value


def build_failure_case(case_id: str | int, directory: Path | None = None) -> Device:
    """
    Load one corpus device with its expected outcome.

    Raises
    ------
    UnknownCaseError
        No such case in the corpus directory.
    """
    key = normalize_case_id(case_id)
    path = (directory or FIXTURES_DIR) / f"case-{key}.json"
    if not path.is_file():
        raise UnknownCaseError(case_id)
    device = Device.load(path)
    if device.expected is None:
        raise InvalidDeviceError(f"{path.name} has no expected outcome")
    return device


def load_corpus(directory: Path | None = None) -> dict[str, Device]:
    """
    Every case of a corpus directory, the known cases first in their usual order.
    """
    directory = directory or FIXTURES_DIR
    found = {x.stem.removeprefix("case-"): x for x in sorted(directory.glob("case-*.json"))}
    order = [x for x in CASE_IDS if x in found] + sorted(x for x in found if x not in CASE_IDS)
    corpus = {key: build_failure_case(key, directory) for key in order}
    log.debug(f"Loaded {len(corpus)} corpus devices from {directory}")
    return corpus


@dataclass(frozen=True, slots=True)
class CaseResult:
    case_id: str
    name: str
    category: FailureCategory | None
    expected: ExpectedOutcome
    lit: int
    total: int

    @property
    def matches(self) -> bool:
        return self.lit == self.expected.lit_count and self.total == self.expected.total


def lit_after_press(device: Device, radius: int | None = None) -> tuple[int, int]:
    """
    Build the device on a fresh floor, press its button and count the lamps lit at any tick until
    the world settles.

    Returns
    -------
    tuple[int, int]
        Lamps that lit, total lamps.
    """
    radius = radius or settings.radius
    world = World(settings.world_config())
    world.lay_floor(Region(device.anchor, radius))
    device.apply(world)
    lamps = [device.absolute(x) for x in device.lamp_offsets()]
    buttons = device.button_offsets()
    if not buttons:
        return 0, len(lamps)

    lit: set[Pos] = set()

    def sample():
        lit.update(x for x in lamps if world.get_block(x).lit)

    press_button(world, device.absolute(buttons[0]))
    sample()
    for _ in range(world.config.max_settle_ticks):
        events = step(world)
        sample()
        if not events and not world.scheduled:
            break
    return len(lit), len(lamps)


def simulate_case(case_id: str, device: Device) -> CaseResult:
    assert device.expected is not None
    lit, total = lit_after_press(device)
    result = CaseResult(case_id, device.name, device.category, device.expected, lit, total)
    log.debug(f"Case {case_id} {device.name!r}: {lit}/{total} lit, expected {device.expected.lit_count}")
    return result

