"""Exception hierarchy shared by the engine, the CLI and the service."""


class PortraitEngineError(Exception):
    """Base class for every error raised by portrait_engine."""


class PreconditionError(PortraitEngineError):
    """An operation was called outside its domain."""


class DegenerateInputError(PreconditionError):
    """Zero polynomial (or zero point) where a nonzero one is required."""


class PoleAtPlaceError(PreconditionError):
    """Reduction requested for an element with negative valuation."""


class NotAMorphismError(PreconditionError):
    """The homogeneous pair has vanishing resultant."""


class ConstantMapError(PreconditionError):
    """The map has degree 0 after cancellation."""


class BadReductionError(PreconditionError):
    """The place is a place of bad reduction for the map."""


class NotNormalFormError(PreconditionError):
    """The polynomial is not monic with vanishing z^(d-1) coefficient."""


class WHypothesisError(PreconditionError):
    """The requested portrait lies in W(phi)."""


class NotCoprimeError(PreconditionError):
    """Inputs to an abc check share a root."""


class ResourceLimitError(PortraitEngineError):
    """A computation would exceed the configured degree cap."""

    def __init__(self, message, requested=None, cap=None):
        super().__init__(message)
        self.requested = requested
        self.cap = cap


class ExpressionError(PortraitEngineError):
    """Malformed expression text, with a 1-based position."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.reason = message
        self.line = line
        self.column = column
