import logging
from collections.abc import Iterator

import pytest

from redbench.logging import SessionTail, TickLine, logging_config
from redbench.packages.gateway.models import ToolRequest
from redbench.packages.gateway.session import handle, open_session
from redbench.packages.tasks.generator import generate_task


@pytest.fixture
def tail() -> Iterator[SessionTail]:
    handler = SessionTail()
    root = logging.getLogger("redbench")
    previous = root.level
    root.addHandler(handler)
    root.setLevel(logging.DEBUG)
    yield handler
    root.removeHandler(handler)
    root.setLevel(previous)


def test_tool_calls_are_stamped_with_the_tick(tail: SessionTail):
    session = open_session(generate_task("A", "L1"))
    session.world.clock = 7
    handle(session, ToolRequest.from_dict({"id": "q", "tool": "set-block", "params": {"pos": [50, 4, 0]}}))

    line = tail.lines[-1]
    assert line.tick == 7
    assert line.source == "gateway"
    assert line.message == "set-block #q: out-of-region"
    assert str(line) == "t=7    D gateway: set-block #q: out-of-region"


def test_other_loggers_are_ignored(tail: SessionTail):
    tail.handle(logging.LogRecord("urllib3", logging.WARNING, __file__, 1, "unrelated", None, None))
    logging.getLogger("redbench.settings").info("kept", extra={"tick": "not a tick"})
    assert list(tail.lines) == [TickLine(None, "settings", "INFO", "kept")]
    assert str(tail.lines[0]) == "t=-    I settings: kept"


def test_tail_is_bounded(tail: SessionTail):
    log = logging.getLogger("redbench.core.engine")
    for i in range(SessionTail.maxlen + 5):
        log.debug(f"message {i}", extra={"tick": i})
    assert len(tail.lines) == SessionTail.maxlen
    assert tail.lines[0].tick == 5


def test_config_routes_the_tail_from_the_root(tmp_path):
    config = logging_config(log_dir=tmp_path / "logs", debug=True)
    assert config["handlers"]["tail"]["class"] == "redbench.logging.SessionTail"
    assert config["loggers"]["root"] == {"handlers": ["queue", "tail"], "level": logging.DEBUG}
    assert config["handlers"]["queue"]["handlers"] == ["console", "file"]
    assert (tmp_path / "logs").is_dir()
