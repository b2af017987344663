from __future__ import annotations

import logging
from typing import TextIO

from .models import Session
from .session import handle_line

log = logging.getLogger("redbench.packages.gateway")


def serve(session: Session, reader: TextIO, writer: TextIO) -> int:
    """
    Answer line-delimited JSON requests from `reader` until end of input, one response line per
    request, in order. Blank lines are ignored.

    Returns
    -------
    int
        Number of requests answered.
    """
    answered = 0
    log.info(f"Serving {session.spec.task_id}, {session.budget.limit} trials available")
    for line in reader:
        if not line.strip():
            continue
        writer.write(handle_line(session, line) + "\n")
        writer.flush()
        answered += 1
    log.info(f"End of input after {answered} request(s)")
    return answered
