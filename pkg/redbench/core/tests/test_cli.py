import io
import json
import sys
from pathlib import Path

import pytest

from redbench.__main__ import execute


@pytest.fixture(autouse=True)
def workdir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _task(tmp_path: Path, *args: str) -> Path:
    path = tmp_path / "task.yaml"
    assert execute(["generate", "--family", "A", "--level", "L1", *args, "--out", str(path)]) == 0
    return path


def test_generate_to_stdout(capsys: pytest.CaptureFixture[str]):
    assert execute(["generate", "--family", "C", "--level", "L1", "--deltas", "2,2,2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("task_id: C_")
    assert "deltas" in out


def test_generate_invalid_parameters(capsys: pytest.CaptureFixture[str]):
    assert execute(["generate", "--family", "A", "--level", "L9"]) == 1
    assert "L9" in capsys.readouterr().err


def test_usage_errors_exit_with_2():
    with pytest.raises(SystemExit) as info:
        execute(["generate", "--family", "F", "--level", "L1"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        execute(["generate", "--family", "C", "--level", "L1", "--deltas", "a,b"])


def test_validate(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    good = _task(tmp_path)
    bad = tmp_path / "bad.yaml"
    bad.write_text("task_id: [unclosed\n")
    assert execute(["validate", str(good)]) == 0
    assert execute(["validate", str(good), str(bad)]) == 1
    out = capsys.readouterr().out
    assert "A_simultaneous_lights_L1, 4 lamps" in out
    assert "bad.yaml" in out


def test_solve_then_run(tmp_path: Path):
    task = _task(tmp_path)
    device = tmp_path / "device.json"
    assert execute(["solve", "--task", str(task), "--out", str(device)]) == 0
    assert json.loads(device.read_text())["name"] == "simultaneous-4"

    out = tmp_path / "result"
    assert execute(["run", "--task", str(task), "--device", str(device), "--out-dir", str(out), "--events"]) == 0
    verdict = json.loads((out / "verdict.json").read_text())
    assert verdict["pass"] is True
    assert verdict["metrics"]["trials_used"] == 0
    assert (out / "trace.csv").read_text().startswith("tick,lamp_0")
    events = [json.loads(x) for x in (out / "events.jsonl").read_text().splitlines()]
    assert any(x["new"] == "lamp" and x["detail"]["lit"] for x in events)


def test_run_failing_device(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    task = _task(tmp_path)
    device = tmp_path / "empty.json"
    device.write_text(json.dumps({"name": "empty", "placements": []}))
    out = tmp_path / "result"
    assert execute(["run", "--task", str(task), "--device", str(device), "--out-dir", str(out)]) == 1
    assert json.loads((out / "verdict.json").read_text())["pass"] is False
    assert not (out / "trace.csv").exists()
    assert "FAIL" in capsys.readouterr().out


def test_run_missing_device(tmp_path: Path):
    task = _task(tmp_path)
    assert execute(["run", "--task", str(task), "--device", str(tmp_path / "nothing.json")]) == 1


def test_fixtures(capsys: pytest.CaptureFixture[str]):
    assert execute(["fixtures", "--case", "W", "--case", "C5"]) == 0
    assert "2/2 cases match" in capsys.readouterr().out
    assert execute(["fixtures", "--case", "13"]) == 1
    assert execute(["fixtures", "--corpus", "."]) == 1


def test_serve(tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]):
    task = _task(tmp_path)
    lines = [
        {"id": "1", "tool": "set-block", "params": {"pos": [1, 4, 0], "kind": "minecraft:redstone_wire"}},
        {"id": "2", "tool": "activate-button"},
    ]
    monkeypatch.setattr(sys, "stdin", io.StringIO("".join(json.dumps(x) + "\n" for x in lines)))
    assert execute(["serve", "--task", str(task), "--budget", "1"]) == 0
    captured = capsys.readouterr()
    responses = [json.loads(x) for x in captured.out.splitlines()]
    assert [x["ok"] for x in responses] == [True, True]
    assert responses[1]["result"]["trials_left"] == 0
    assert "FAIL" in captured.err
    assert "trials used: 1" in captured.err


def _rates(tmp_path: Path) -> Path:
    path = tmp_path / "rates.csv"
    path.write_text(
        "model,baseline,with_hint,with_hint_scientist\n"
        "gemini-3-pro,26.0,52.5,64.0\n"
        "qwen3-32b,10.5,37.5,46.5\n"
    )
    return path


def test_report_table_and_json(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    rates = _rates(tmp_path)
    assert execute(["report", "--csv", str(rates)]) == 0
    out = capsys.readouterr().out
    assert "Δ26.5 (1.02×)" in out
    assert "Δ53.5 (5.10×)" in out

    assert execute(["report", "--csv", str(rates), "--format", "json", "--model", "qwen3-32b"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert [x["model"] for x in data] == ["qwen3-32b"]
    assert data[0]["r_id"] == 2.57

    assert execute(["report", "--csv", str(rates), "--model", "nobody"]) == 1


def test_report_breakdown(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    path = tmp_path / "results.csv"
    path.write_text(
        "model,assistance,task_id,run,pass,consolidation\n"
        "m,hint+scientist,A_simultaneous_lights_L1,0,1,self-determined\n"
        "m,hint+scientist,A_simultaneous_lights_L1,1,0,self-determined\n"
        "m,hint+scientist,A_simultaneous_lights_L1,0,1,claim-proof-constraints-example\n"
        "m,none,A_simultaneous_lights_L1,0,0,\n"
    )
    assert execute(["report", "--csv", str(path), "--breakdown", "--assistance", "hint+scientist"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "m"
    assert "L1    |  66.7" in out
    assert "claim-proof-constraints-example: 100.0 (Δ50.0, reference 64.0)" in out

    with pytest.raises(SystemExit):
        execute(["report", "--csv", str(path), "--breakdown", "--assistance", "oracle"])


def test_bad_config(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    config = tmp_path / "config.yml"
    config.write_text("trial-budget: -3\n")
    assert execute(["--config", str(config), "generate", "--family", "A", "--level", "L1"]) == 1
    assert "trial-budget" in capsys.readouterr().err
