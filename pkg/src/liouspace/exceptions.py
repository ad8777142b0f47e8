"""Exception hierarchy for liouspace."""


class LiouspaceError(ValueError):
    """Base class for every error raised by this package."""


class FieldInvariantError(LiouspaceError):
    """A sampled field violates one of its structural or physical invariants."""


class WindowTooSmallError(LiouspaceError):
    def __init__(self, detail=""):
        msg = "quadrature window too small"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class NonHermitianError(LiouspaceError):
    def __init__(self, detail=""):
        msg = "non-Hermitian input"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class NotFactorizableError(LiouspaceError):
    def __init__(self, detail=""):
        msg = "not factorizable"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class DegenerateDiagonalError(LiouspaceError):
    def __init__(self, detail=""):
        msg = "degenerate diagonal"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class ChirpUndersampledError(LiouspaceError):
    def __init__(self, detail=""):
        msg = "chirp undersampled"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class InputNotDecayedError(LiouspaceError):
    def __init__(self, detail=""):
        msg = "input not decayed"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class GridMismatchError(LiouspaceError):
    def __init__(self, detail=""):
        msg = "grid mismatch"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class NonPositiveResidualError(LiouspaceError):
    def __init__(self, detail=""):
        msg = "non-positive residual"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class FieldFormatError(LiouspaceError):
    """A field file is malformed."""
