"""Exception hierarchy shared across the package."""


class ReluMinimaError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(ReluMinimaError):
    """Operands are structurally incompatible (mismatched variable sets, bad indices)."""


class ParseError(ReluMinimaError):
    """Malformed textual input (rational literals, polynomials, problem files)."""


class PoleError(ReluMinimaError):
    """Rational-function evaluation hit a zero denominator."""


class ZeroPolynomialError(ReluMinimaError):
    """An operation that requires a nonzero polynomial received the zero polynomial."""


class ResourceLimitError(ReluMinimaError):
    """A basis computation exceeded its configured resource limits.

    Carries a human-readable reason; the pipeline converts this into an
    "unresolved partition" outcome instead of crashing.
    """

    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class UnsupportedError(ReluMinimaError):
    """Operation precondition not met (e.g. order conversion of a non-finite variety)."""
