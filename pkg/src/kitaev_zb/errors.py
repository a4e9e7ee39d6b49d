"""Exception and warning types raised across the package."""


class KitaevZbError(Exception):
    """Base class for package errors."""


class BranchUnsupportedError(KitaevZbError, ValueError):
    """First-order ZB estimates are only derived for mu + 2*tp > 0."""


class SeamProximityError(KitaevZbError, RuntimeError):
    """Too much probability sits next to the periodic seam to unwrap positions."""


class SeamProximityWarning(UserWarning):
    pass


class ZbExtractionError(KitaevZbError, ValueError):
    """Raised when a separation series does not contain enough oscillation peaks."""


class OracleDimensionError(KitaevZbError, ValueError):
    """Dense diagonalisation refused because the chain is too long."""


class ScheduleError(KitaevZbError, ValueError):
    pass
