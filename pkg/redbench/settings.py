from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from redbench.core.errors import RedbenchError
from redbench.core.world import Pos, Region, WorldConfig

log = logging.getLogger("redbench.settings")

DEFAULT_PATH = Path("config.yml")
PULSE_ENV = "REDBENCH_BUTTON_PULSE"


class InvalidSettingsError(RedbenchError):
    """
    The configuration file or an environment override holds an unusable value.
    """

    code = "invalid-parameters"
    msg = "Invalid configuration: {detail}"


@dataclass
class Settings:
    """
    Global harness settings, read from an optional YAML file.

    Attributes
    ----------
    button_pulse_ticks: int
        How long a pressed button stays down.
    floor_y: int
        Height of the stone layer under the build region.
    max_settle_ticks: int
        Horizon after a press before a trace is cut.
    trial_budget: int
        Verification trials allowed per session.
    event_page_size: int
        Maximum number of events returned by one gateway response.
    anchor: Pos
        Default center of the build region.
    radius: int
        Default half-width of the build region.
    log_dir: Path | None
        When set, logs are also written to a rotating file in this folder.
    sentry_dsn: str | None
        Report unexpected errors to Sentry.
    sentry_env: str
        Sentry environment name.
    prometheus_port: int | None
        Expose metrics for Prometheus on this port.
    prometheus_host: str
        Interface the metrics server binds to.
    """

    button_pulse_ticks: int = 10
    floor_y: int = 3
    max_settle_ticks: int = 200
    trial_budget: int = 50
    event_page_size: int = 10_000
    anchor: Pos = field(default_factory=lambda: Pos(0, 4, 0))
    radius: int = 10
    log_dir: Path | None = None
    sentry_dsn: str | None = None
    sentry_env: str = "production"
    prometheus_port: int | None = None
    prometheus_host: str = "localhost"

    def validate(self):
        if self.button_pulse_ticks < 1:
            raise InvalidSettingsError("button-pulse-ticks must be at least 1")
        if self.max_settle_ticks < self.button_pulse_ticks:
            raise InvalidSettingsError("max-settle-ticks must not be lower than button-pulse-ticks")
        if self.trial_budget < 0:
            raise InvalidSettingsError("trial-budget cannot be negative")
        if self.event_page_size < 1:
            raise InvalidSettingsError("event-page-size must be at least 1")
        if self.radius < 1:
            raise InvalidSettingsError("radius must be at least 1")

    def world_config(self) -> WorldConfig:
        return WorldConfig(
            button_pulse_ticks=self.button_pulse_ticks, floor_y=self.floor_y, max_settle_ticks=self.max_settle_ticks
        )

    def default_region(self) -> Region:
        return Region(self.anchor, self.radius)


def _apply(s: Settings, content: dict[str, Any]):
    s.button_pulse_ticks = content.get("button-pulse-ticks") or s.button_pulse_ticks
    s.floor_y = content.get("floor-y", s.floor_y)
    s.max_settle_ticks = content.get("max-settle-ticks") or s.max_settle_ticks
    s.trial_budget = content.get("trial-budget", s.trial_budget)
    s.event_page_size = content.get("event-page-size") or s.event_page_size
    s.radius = content.get("radius") or s.radius
    if anchor := content.get("anchor"):
        s.anchor = Pos.from_list(anchor)
    if log_dir := content.get("log-dir"):
        s.log_dir = Path(log_dir)

    sentry: dict
    if sentry := content.get("sentry", {}):
        s.sentry_dsn = sentry.get("dsn") or s.sentry_dsn
        s.sentry_env = sentry.get("environment") or s.sentry_env

    prometheus: dict
    if prometheus := content.get("prometheus", {}):
        if prometheus.get("enabled"):
            s.prometheus_port = prometheus.get("port") or 15260
            s.prometheus_host = prometheus.get("host") or s.prometheus_host


def load_settings(path: Path | None = None, environ: dict[str, str] | None = None) -> Settings:
    """
    Build the settings from defaults, then the YAML file, then environment overrides.

    Parameters
    ----------
    path: Path | None
        Configuration file. When omitted, `config.yml` is read if it exists.
    environ: dict[str, str] | None
        Environment to read overrides from, defaults to `os.environ`.
    """
    s = Settings()
    environ = os.environ if environ is None else environ
    if path is None and DEFAULT_PATH.exists():
        path = DEFAULT_PATH
    if path is not None:
        try:
            with path.open() as file:
                content = yaml.safe_load(file) or {}
        except OSError as e:
            raise InvalidSettingsError(f"cannot read {path}: {e.strerror}") from e
        except yaml.YAMLError as e:
            raise InvalidSettingsError(f"{path} is not valid YAML") from e
        if not isinstance(content, dict):
            raise InvalidSettingsError(f"{path} must contain a mapping")
        _apply(s, content)
        log.debug(f"Settings loaded from {path}")

    if pulse := environ.get(PULSE_ENV):
        try:
            s.button_pulse_ticks = int(pulse)
        except ValueError:
            raise InvalidSettingsError(f"{PULSE_ENV} must be an integer, got {pulse!r}") from None
        # keep the horizon consistent with a long pulse
        s.max_settle_ticks = max(s.max_settle_ticks, s.button_pulse_ticks)
    s.validate()
    return s


settings = Settings()


def use_settings(new: Settings):
    """
    Replace the values of the global `settings` object in place, so modules that imported it see the change.
    """
    for name in Settings.__dataclass_fields__:
        setattr(settings, name, getattr(new, name))
