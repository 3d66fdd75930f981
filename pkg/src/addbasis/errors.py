"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: validation and hypothesis
failures exit 2, parse errors exit 3, internal invariant breaches exit 4.
"""


class AddbasisError(Exception):
    """Base class for all package errors."""


class SpecMismatchError(AddbasisError):
    """Operands belong to different specs, or an element is not canonical."""


class UnsupportedOperationError(AddbasisError):
    """Operation needs structure the spec does not have (e.g. inverses)."""


class EnumerationRangeError(AddbasisError):
    """Enumeration index is outside a finite carrier."""


class NoDecompositionError(AddbasisError):
    """The semigroup has no total decomposition oracle.

    ``witness`` is an element admitting no decomposition s = s' + s''.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DilationFiniteError(AddbasisError):
    """A dilation that must be infinite is finite; carries the decision."""

    def __init__(self, message, decision=None):
        super().__init__(message)
        self.decision = decision


class TargetFunctionError(AddbasisError):
    """Target function violates a structural requirement (e.g. infinite zero set)."""


class WitnessError(AddbasisError):
    """A requested witness does not exist (precondition unmet)."""


class SearchBoundError(AddbasisError):
    """Candidate scan exceeded its bound; a bug signal, not a valid outcome."""

    def __init__(self, message, census=None):
        super().__init__(message)
        self.census = census


class PostconditionError(AddbasisError):
    """An internal step invariant failed; carries the audit log for diagnosis."""

    def __init__(self, message, audit=None):
        super().__init__(message)
        self.audit = audit


class ParseError(AddbasisError):
    """Malformed input document or file."""
