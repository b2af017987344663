from redbench.core.errors import RedbenchError


class DeviceError(RedbenchError):
    pass


class UnsupportedNError(DeviceError):
    code = "unsupported-n"
    msg = "No reference layout for {detail} lamps, use one of 4, 8, 16, 32 or 64."


class RegionOverflowError(DeviceError):
    """
    The device does not fit in the build region. The detail carries the area diagnostics.
    """

    code = "region-overflow"
    msg = "The device does not fit in the build region: {detail}"


class UnsupportedTauError(DeviceError):
    code = "unsupported-tau"
    msg = "Cannot shape a pulse of this width: {detail}"


class InfeasiblePaddingError(DeviceError):
    code = "infeasible-padding"
    msg = "Cannot pad path latency: {detail}"


class UnknownCaseError(DeviceError):
    code = "unknown-case"
    msg = "Unknown failure case {detail}, use W or 1 to 12."


class InvalidDeviceError(DeviceError):
    """
    A device file is unreadable or describes impossible placements.
    """

    code = "invalid-device"
    msg = "Invalid device: {detail}"
