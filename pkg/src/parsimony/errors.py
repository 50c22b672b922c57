"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`ParsimonyError`.  The CLI maps :class:`InputError` subclasses to
exit status 2 and everything else to exit status 1.
"""


class ParsimonyError(Exception):
    """Base class for all package errors."""


class InputError(ParsimonyError):
    """Unreadable or malformed input files."""


class ParseError(InputError):
    """A file could be read but not parsed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class SpecError(ParsimonyError):
    """A model or run specification is inconsistent with the data."""


class UnknownColumn(SpecError):
    pass


class DuplicateLabel(SpecError):
    pass


class NonFinite(ParsimonyError):
    pass


class RankDeficient(ParsimonyError):
    """X^T X is singular beyond the rank tolerance."""


class DimensionMismatch(ParsimonyError):
    pass


class NegativeRadius(ParsimonyError):
    pass


class ApproximationInvalid(ParsimonyError):
    """The large-N approximation was requested for N < 2."""


class NonPositiveBound(ParsimonyError):
    pass


class NonPositiveSigma(ParsimonyError):
    pass


class NotUnivariate(ParsimonyError):
    pass


class PerfectFit(ParsimonyError):
    """Zero residual: the unknown-sigma evidence diverges."""


class EmptyModelSet(ParsimonyError):
    pass


class InvalidPriors(ParsimonyError):
    pass


class SigmaModeError(ParsimonyError):
    """A known-sigma operation got a Jeffreys spec, or vice versa."""


class DimensionTooLarge(ParsimonyError):
    """Quadrature oracles only handle low-dimensional coefficient spaces."""
