class SepgapError(Exception):
    """Base class for library errors."""


class DimensionError(SepgapError, ValueError):
    """Operands with incompatible shapes or tensor structure."""


class ConvergenceError(SepgapError, ArithmeticError):
    """An iterative numerical routine hit its iteration cap."""


class UnboundedPolytopeError(SepgapError, ValueError):
    """A halfspace system does not describe a bounded polytope."""


class ConfigError(SepgapError, ValueError):
    """An experiment configuration is invalid or exceeds the dense budget."""
