"""Exception types raised across the package."""


class ZZCtrlError(Exception):
    """Base class for all package errors."""


class NotHermitian(ZZCtrlError, ValueError):
    pass


class NegativeSpectrum(ZZCtrlError, ValueError):
    pass


class DegenerateInput(ZZCtrlError, ValueError):
    """A generator set contains an element that is not skew-Hermitian."""


class MisalignedTrajectories(ZZCtrlError, ValueError):
    pass


class EmptyInput(ZZCtrlError, ValueError):
    pass
