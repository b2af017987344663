from pathlib import Path

import pytest

from redbench.core.world import Pos, Region
from redbench.settings import PULSE_ENV, InvalidSettingsError, Settings, load_settings, settings, use_settings

CONFIG = """\
button-pulse-ticks: 6
max-settle-ticks: 120
trial-budget: 20
event-page-size: 500
radius: 12
anchor: [5, 4, -5]
log-dir: logs
sentry:
  dsn: https://key@sentry.example/1
  environment: staging
prometheus:
  enabled: true
"""


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "config.yml"
    path.write_text(text)
    return path


def test_defaults_without_a_file(tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
    monkeypatch.chdir(tmp_path)
    s = load_settings(None, {})
    assert s == Settings()
    assert s.world_config().button_pulse_ticks == 10
    assert s.default_region() == Region(Pos(0, 4, 0), 10)


def test_values_from_yaml(tmp_path: Path):
    s = load_settings(_write(tmp_path, CONFIG), {})
    assert s.button_pulse_ticks == 6
    assert s.max_settle_ticks == 120
    assert s.trial_budget == 20
    assert s.event_page_size == 500
    assert s.default_region() == Region(Pos(5, 4, -5), 12)
    assert s.log_dir == Path("logs")
    assert s.sentry_dsn == "https://key@sentry.example/1"
    assert s.sentry_env == "staging"
    assert s.prometheus_port == 15260
    assert s.prometheus_host == "localhost"


def test_prometheus_stays_off_unless_enabled(tmp_path: Path):
    s = load_settings(_write(tmp_path, "prometheus:\n  enabled: false\n  port: 9000\n"), {})
    assert s.prometheus_port is None


def test_pulse_from_the_environment(tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
    s = load_settings(_write(tmp_path, CONFIG), {PULSE_ENV: "4"})
    assert s.button_pulse_ticks == 4
    assert s.max_settle_ticks == 120

    (tmp_path / "empty").mkdir()
    monkeypatch.chdir(tmp_path / "empty")
    s = load_settings(None, {PULSE_ENV: "500"})
    assert s.button_pulse_ticks == 500
    assert s.max_settle_ticks == 500

    with pytest.raises(InvalidSettingsError):
        load_settings(None, {PULSE_ENV: "ten"})


@pytest.mark.parametrize(
    "text",
    [
        "max-settle-ticks: 5\n",
        "trial-budget: -1\n",
        "- 1\n- 2\n",
        "radius: [unclosed\n",
    ],
)
def test_invalid_files(tmp_path: Path, text: str):
    with pytest.raises(InvalidSettingsError):
        load_settings(_write(tmp_path, text), {})


def test_missing_file(tmp_path: Path):
    with pytest.raises(InvalidSettingsError) as info:
        load_settings(tmp_path / "absent.yml", {})
    assert "absent.yml" in info.value.error_message


def test_use_settings_updates_in_place():
    use_settings(Settings(trial_budget=3))
    assert settings.trial_budget == 3
    assert settings.button_pulse_ticks == 10
