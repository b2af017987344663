import logging

log = logging.getLogger("redbench.core.errors")


class RedbenchError(RuntimeError):
    """
    User-facing exceptions raised anywhere in the harness. You can obtain a friendly error using the
    `error_message` property, and a stable machine-readable identifier with `code`.

    Attributes
    ----------
    code: str
        Identifier used by the gateway wire format and the command line.
    msg: str | None
        Human-readable message. Subclasses may use `{detail}` which is filled with the first argument
        given to the exception.
    """

    code: str = "internal-error"
    msg: str | None = None

    def __init__(self, detail: object = None, *args: object):
        super().__init__(detail, *args)
        self.detail = detail

    @property
    def error_message(self) -> str:
        if self.msg is None:
            log.error("Unknown error", exc_info=self)
            return "An unknown exception occured. Run with --debug for more details."
        if self.detail is None:
            return self.msg.replace("{detail}", "").strip(" :")
        return self.msg.format(detail=self.detail)

    def __str__(self) -> str:
        return self.error_message if self.msg else super().__str__()


class UnsupportedPlacementError(RedbenchError):
    """
    The block cannot be placed at this position because it lacks a valid support.
    """

    code = "unsupported-placement"
    msg = "This block needs an opaque support: {detail}"


class InvalidStateError(RedbenchError):
    """
    The block state itself is not valid (wire power out of range, repeater delay out of 1-4, ...).
    """

    code = "invalid-state"
    msg = "Invalid block state: {detail}"


class NotAWireError(RedbenchError):
    """
    A wire-only operation was called on a position that holds something else.
    """

    code = "not-a-wire"
    msg = "There is no wire at {detail}."


class NoButtonAtPosError(RedbenchError):
    code = "no-button-at-pos"
    msg = "There is no button at {detail}."


class AlreadyPressedError(RedbenchError):
    """
    The button is still in its pressed state and cannot be pressed again until released.
    """

    code = "already-pressed"
    msg = "The button at {detail} is already pressed."
