from .models import Session, Tool, ToolRequest, ToolResponse, TrialBudget
from .server import serve
from .session import apply_device, handle, handle_line, open_session, replay, submit

__all__ = [
    "Session",
    "Tool",
    "ToolRequest",
    "ToolResponse",
    "TrialBudget",
    "apply_device",
    "handle",
    "handle_line",
    "open_session",
    "replay",
    "serve",
    "submit",
]
