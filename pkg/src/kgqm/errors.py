"""Exception types raised by kgqm."""


class KGError(Exception):
    """Base class for all kgqm errors."""


class ConfigurationError(KGError, ValueError):
    """Invalid grid or state parameters."""


class DimensionError(KGError, ValueError):
    """Operands live on different grids, or an index is out of range."""


class UnsupportedDimensionError(KGError, ValueError):
    """Operation is not defined in the requested spatial dimension."""
