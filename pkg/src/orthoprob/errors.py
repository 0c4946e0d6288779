"""Exception types and warning categories shared across the toolkit."""

from __future__ import annotations


class OrthoprobError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(OrthoprobError, ValueError):
    """A value failed a construction invariant or a scenario-level check."""


class ParseError(OrthoprobError, ValueError):
    """Input text is not syntactically valid scenario JSON."""


class DimensionMismatch(OrthoprobError, ValueError):
    """Operands have incompatible shapes or dimensions."""


class AlgebraMismatch(OrthoprobError, ValueError):
    """Operands belong to different event algebras."""


class EmptyInput(OrthoprobError, ValueError):
    """An operation that needs at least one element received none."""


class NotOrthogonal(OrthoprobError):
    """An orthogonal sum or decomposition was requested for non-orthogonal events."""


class ZeroEvent(OrthoprobError):
    """A nonzero event is required here."""


class ZeroProbabilityCondition(OrthoprobError):
    """Conditioning was attempted on an event of (numerically) zero probability.

    ``index`` is the position of the failing event when raised from a
    sequential operation, else None.  ``probability`` is the offending value.
    """

    def __init__(self, message: str, index: int | None = None,
                 probability: float | None = None):
        super().__init__(message)
        self.index = index
        self.probability = probability


class ImpossibleSequence(OrthoprobError):
    """No state can realize the given yes-sequence of events."""


class NotAtom(OrthoprobError):
    """A minimal (atomic) event is required here."""


class NotPredictable(OrthoprobError):
    """The requested check needs a statistically predictable event."""


class EmptyChain(OrthoprobError, ValueError):
    """A measurement chain needs at least one test event."""


class DegenerateDenominator(OrthoprobError):
    """A normalizing denominator vanished."""


class NonUniqueConditioningWarning(UserWarning):
    """Conditioning in a two-dimensional quantum algebra is not unique.

    Dimension-two projection lattices admit many conditional probabilities
    for the same condition; results returned here follow the standard
    compression rule but other valid choices exist.
    """
