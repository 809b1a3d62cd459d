"""Exception hierarchy shared by all pstkit modules."""


class PSTKitError(Exception):
    pass


class InvalidParameter(PSTKitError, ValueError):
    pass


class Graph6Error(PSTKitError, ValueError):
    pass


class UnsupportedSpectrum(PSTKitError):
    """Raised when an eigenvalue needed by a query is not an integer or a quadratic integer."""


class NotCommuting(PSTKitError):
    pass
