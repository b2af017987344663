from redbench.core.errors import RedbenchError


class TaskError(RedbenchError):
    """
    Errors raised while reading, validating or generating task files.
    """


class TaskSyntaxError(TaskError):
    """
    The task file is not valid YAML, or uses a construct outside the accepted subset (anchors, aliases, tags).
    """

    code = "syntax-error"
    msg = "Task file syntax error at {detail}"


class TaskSchemaError(TaskError):
    """
    A field is missing, has the wrong type or an unknown enum value.
    """

    code = "schema-error"
    msg = "Task file schema error: {detail}"


class TaskSemanticError(TaskError):
    """
    The file is well-formed but inconsistent: outputs outside the region, lamp count mismatch,
    blocks outside the component palette.
    """

    code = "semantic-error"
    msg = "Task file is inconsistent: {detail}"


class InvalidParametersError(TaskError):
    code = "invalid-parameters"
    msg = "Invalid task parameters: {detail}"


class UnreadableTaskError(TaskError):
    code = "unreadable-file"
    msg = "Cannot read task file {detail}"
