from .loader import dump_task, load_task, parse_task, serialize_task, validate_task
from .models import Family, Level, TaskSpec

__all__ = ["Family", "Level", "TaskSpec", "dump_task", "load_task", "parse_task", "serialize_task", "validate_task"]
