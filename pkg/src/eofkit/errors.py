"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Matrix/vector dimensions do not match the declared bipartition."""


class ParameterError(ValueError):
    """A family or configuration parameter is outside its valid range."""


class DegenerateParameterError(ParameterError):
    """Parameters hit a singular point of a closed-form expression."""


class PatternError(ValueError):
    """Input lacks the structure (e.g. maximal correlation) an operation requires."""


class ScaleGuardError(RuntimeError):
    """Problem size exceeds the desk-scale guard; pass force=True to override."""
