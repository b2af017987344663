"""
Utilities for setting up redbench's logging.

Standard output is reserved for the gateway protocol and command results, every log record goes to
standard error or to the log file.
"""

import logging
import logging.config
import logging.handlers
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Any, cast

from rich.console import Console
from rich.logging import RichHandler


@dataclass(frozen=True, slots=True)
class TickLine:
    """
    A log message of the simulation, stamped with the world tick it was logged at when the caller
    passed one with `extra={"tick": ...}`.
    """

    tick: int | None
    source: str
    level: str
    message: str

    def __str__(self) -> str:
        tick = "-" if self.tick is None else str(self.tick)
        return f"t={tick:<4} {self.level[0]} {self.source}: {self.message}"


class SessionTail(logging.Handler):
    """
    Keeps the last `maxlen` messages of the redbench loggers as `TickLine`s, older ones are dropped
    as new ones come. Records of other libraries are ignored.

    `redbench serve --debug` prints this tail after the verdict, so the agent's last calls can be
    lined up with the ticks they ran at.
    """

    maxlen: int = 200

    def __init__(self, level: int | str = 0) -> None:
        super().__init__(level)
        self.lines: deque[TickLine] = deque(maxlen=self.maxlen)
        self.addFilter(logging.Filter("redbench"))

    def emit(self, record: logging.LogRecord) -> None:
        source = record.name.removeprefix("redbench.").removeprefix("packages.")
        tick = getattr(record, "tick", None)
        if not isinstance(tick, int):
            tick = None
        self.lines.append(TickLine(tick, source, record.levelname, record.getMessage()))


def stderr_rich_handler() -> RichHandler:
    return RichHandler(console=Console(stderr=True), rich_tracebacks=True)


def logging_config(*, log_dir: Path | None = None, debug: bool = False, disable_rich: bool = False) -> dict[str, Any]:
    level = logging.DEBUG if debug else logging.INFO
    console: dict[str, Any]
    if disable_rich:
        console = {"level": logging.DEBUG, "class": "logging.StreamHandler", "formatter": "basic"}
    else:
        console = {"level": logging.DEBUG, "()": "redbench.logging.stderr_rich_handler"}
    handlers: dict[str, Any] = {
        "console": console,
        "tail": {"level": logging.DEBUG, "class": "redbench.logging.SessionTail"},
    }
    queued = ["console"]
    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        handlers["file"] = {
            "level": logging.INFO,
            "class": "logging.handlers.RotatingFileHandler",
            "filename": log_dir / "redbench.log",
            "maxBytes": 8**7,
            "backupCount": 8,
            "formatter": "basic",
        }
        queued.append("file")
    handlers["queue"] = {"class": "logging.handlers.QueueHandler", "handlers": queued}
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "basic": {
                "format": "[{asctime}] {levelname} {name}: {message}",
                "datefmt": "%Y-%m-%d %H:%M:%S",
                "style": "{",
            }
        },
        "handlers": handlers,
        "loggers": {"root": {"handlers": ["queue", "tail"], "level": level}},
    }


def setup_logging(config: dict[str, Any]) -> logging.handlers.QueueHandler:
    logging.config.dictConfig(config)
    handler = cast(logging.handlers.QueueHandler, logging.getHandlerByName("queue"))
    if handler.listener:
        handler.listener.start()
    return handler


def stop_logging(handler: logging.handlers.QueueHandler):
    if handler.listener:
        handler.listener.stop()


def recent_lines() -> list[TickLine]:
    handler = logging.getHandlerByName("tail")
    if not isinstance(handler, SessionTail):
        return []
    return list(handler.lines)
