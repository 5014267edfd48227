"""Exception and warning types shared across the workbench."""


class ValidationError(ValueError):
    """Bad input: violated precondition, invariant, or malformed config."""


class RegimeError(ValidationError):
    """Inputs outside the validity regime of the requested formula."""


class GridError(ValidationError):
    """Grid too small/coarse for the requested solve."""


class RangeError(ValidationError):
    """Requested point lies outside tabulated/solved domain."""


class NumericError(RuntimeError):
    """Solver failed to converge or produced a degenerate result."""


class FitError(NumericError):
    """Least-squares fit could not be performed or is degenerate."""


class LinearizationWarning(UserWarning):
    """First-order expansion used beyond its stated accuracy."""


class CoverageWarning(UserWarning):
    """Distribution/domain does not fully cover the kernel support."""
