"""Exception hierarchy.

Every numerical routine in this package raises instead of returning NaN/Inf,
so callers can distinguish a genuine pole or domain violation from a bug.
"""


class CesaroError(Exception):
    """Base class for all library errors."""


class DomainError(CesaroError, ValueError):
    """Input outside the documented domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested exactly at a pole.

    ``location`` carries the offending point (e.g. the non-positive integer
    for a Gamma pole, or s = 1 for zeta).
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class IndeterminateError(CesaroError, ArithmeticError):
    """0 * inf style collision that needs a limit through the coefficient
    fabric rather than a direct evaluation."""


class UncancelledSingularityError(CesaroError, ArithmeticError):
    """A residual eps-pole survived final evaluation of a formal series.

    ``index`` names the subject-power grouping where cancellation failed.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class LaurentOrderError(CesaroError, OverflowError):
    """An eps-Laurent product pushed below order -2 (never needed by any
    computation in scope; failing loudly beats silent truncation)."""


class RangeTruncationError(CesaroError):
    """A series product would lose a term whose partner is singular."""


class GridResolutionError(CesaroError):
    """Numeric grid too coarse for the requested tolerance.

    ``suggested_step`` proposes a finer step (still of the form 1/2**m).
    """

    def __init__(self, message, suggested_step=None):
        super().__init__(message)
        self.suggested_step = suggested_step


class NoLimitError(CesaroError):
    """Cesaro-limit extraction did not stabilise (non-convergent fit)."""


class ContractError(CesaroError, TypeError):
    """Caller did not supply a capability required by the contract
    (e.g. derivatives up to the requested order)."""


class DegenerateFitError(CesaroError):
    """Asymptotic fit requested in a degenerate configuration (e.g. binomial
    coefficients that vanish identically at large index)."""


def require_finite(value, what="result"):
    """Reject NaN/Inf so they never escape an operation silently."""
    z = complex(value)
    if z.real != z.real or z.imag != z.imag:  # NaN test
        raise CesaroError(f"non-finite {what}: NaN")
    if abs(z.real) == float("inf") or abs(z.imag) == float("inf"):
        raise CesaroError(f"non-finite {what}: Inf")
    return value
