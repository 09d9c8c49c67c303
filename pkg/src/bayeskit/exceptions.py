"""Exception hierarchy shared across the toolkit.

Every error raised by bayeskit derives from :class:`BayeskitError`, so
callers (the command line driver in particular) can catch one base class.
Construction-time invariant violations additionally subclass ValueError.
"""


class BayeskitError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(BayeskitError, ValueError):
    """A value violates a construction invariant (bad probability, bounds, shape)."""


class UnknownEventError(BayeskitError):
    """The requested event label was never registered with the causal system."""


class InconsistentEvidenceError(BayeskitError):
    """The observed event has probability zero under every cause."""


class UndefinedFactorError(BayeskitError):
    """Both hypotheses assign probability zero, so their ratio is meaningless."""


class IndeterminateOddsError(BayeskitError):
    """An odds update multiplied zero by infinity; the result has no defined value."""


class ImpossibleEventError(BayeskitError):
    """No case in the partition is compatible with the event."""


class InvertedIntervalError(BayeskitError):
    """Interval bounds arrived in the wrong order (lower bound above upper)."""


class InvalidPredictionError(BayeskitError):
    """A model prediction is NaN or infinite.

    ``index`` identifies the offending observation record when known.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class ExpressionError(BayeskitError):
    """Base class for model-formula problems."""


class ParseError(ExpressionError):
    """Formula text could not be parsed.

    ``position`` is the character offset of the offending token and
    ``expected`` names the token kinds that would have been accepted there.
    """

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.position = position
        self.expected = tuple(expected)


class UnknownFunctionError(ParseError):
    """A call uses a function name outside the built-in set."""


class EvaluationError(ExpressionError):
    """Formula evaluation failed.

    ``subexpression`` holds the source text of the innermost failing node.
    """

    def __init__(self, message: str, subexpression: str | None = None):
        super().__init__(message)
        self.subexpression = subexpression


class UnboundNameError(EvaluationError):
    """A free name in the formula is missing from, or duplicated across, the bindings."""


class DomainError(EvaluationError):
    """An operation left its numeric domain (log of a non-positive value, 0/0)."""


class DegeneratePosteriorError(BayeskitError):
    """Every grid node has vanishing likelihood; the posterior cannot be normalized."""
