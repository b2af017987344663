from redbench.core.errors import RedbenchError


class GatewayError(RedbenchError):
    """
    Errors answered in-band by the tool gateway. None of them ends the session.
    """


class BadRequestError(GatewayError):
    """
    The request line is not a JSON object of the expected shape, or a parameter is missing or mistyped.
    """

    code = "bad-request"
    msg = "Bad request: {detail}"


class UnknownToolError(GatewayError):
    code = "unknown-tool"
    msg = (
        "Unknown tool {detail}, use get-block-state, get-event-stream, scan-redstone-area, set-block "
        "or activate-button."
    )


class SessionClosedError(GatewayError):
    code = "session-closed"
    msg = "The session was submitted and accepts no more requests."


class BudgetExhaustedError(GatewayError):
    code = "budget-exhausted"
    msg = "All {detail} verification trials of this task have been used."


class OutOfRegionError(GatewayError):
    code = "out-of-region"
    msg = "{detail} is outside the build region."


class OutOfPaletteError(GatewayError):
    """
    The block is unknown, or not part of the task's component palette.
    """

    code = "out-of-palette"
    msg = "{detail} is not part of the allowed blocks."


class NoButtonError(GatewayError):
    code = "no-button"
    msg = "There is no button in the build region."


class MultipleButtonsError(GatewayError):
    code = "multiple-buttons"
    msg = "Found several buttons in the build region: {detail}"
