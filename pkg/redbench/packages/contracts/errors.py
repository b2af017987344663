from redbench.core.errors import RedbenchError


class ContractError(RedbenchError):
    pass


class MissingButtonError(ContractError):
    """
    The stimulus button is not where the task declares it.
    """

    code = "missing-button"
    msg = "No button at the declared input {detail}."


class MissingLampError(ContractError):
    code = "missing-lamp"
    msg = "No lamp at the declared outputs {detail}."


class LengthMismatchError(ContractError):
    code = "length-mismatch"
    msg = "Stage delays do not match the lamp count: {detail}"
