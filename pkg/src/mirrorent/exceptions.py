"""Exception and warning types raised by mirrorent."""


class NumericalIntegrityError(ArithmeticError):
    """A quantity that must be real/nonnegative/Hermitian came out otherwise."""


class TruncationError(ValueError):
    """The Fock truncation is too small for the requested state or dynamics."""


class ProjectionError(ValueError):
    """Too much weight lies outside the two-level subspace of each oscillator."""


class ConvergenceError(RuntimeError):
    """Results changed by more than the tolerance when the truncation was doubled."""


class TruncationWarning(UserWarning):
    pass


class PerturbativeRegimeWarning(UserWarning):
    pass
