"""Exception types raised across the package."""


class PMError(Exception):
    """Base class for all package errors."""


class NotHermitian(PMError):
    pass


class ZeroProbabilityOutcome(PMError):
    pass


class IncompatibleSequence(PMError):
    """Raised when a measurement sequence mixes observables from different contexts."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class InvalidState(PMError):
    """A density matrix failed one of its invariants; ``invariant`` names which."""

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class ConstructionInvalid(PMError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DDOverflow(PMError):
    pass


class ClassificationMismatch(PMError):
    pass


class ReferenceNotInFamily(PMError):
    pass


class InternalInconsistency(PMError):
    pass
