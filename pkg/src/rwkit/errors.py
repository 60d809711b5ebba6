"""Exception types shared across the package.

Every failure mode has a dedicated class so callers (and the CLI exit-code
mapping) can distinguish invalid input from numerical breakdown.
"""


class RWKitError(Exception):
    """Base class for all rwkit errors."""


# --- invalid input / unsupported request -----------------------------------

class InvalidOrder(RWKitError, ValueError):
    """Derivative order outside the supported range."""


class IndexOutOfRange(RWKitError, ValueError):
    """Puncture or basis index outside 1..n (or the documented subset)."""


class SizeTooSmall(RWKitError, ValueError):
    """The requested matrix needs a larger n."""


class PairNotTabulated(RWKitError, ValueError):
    """The intersection number of this pair is not determined by the tables."""


class ParseError(RWKitError, ValueError):
    """Configuration document is not well-formed."""


class InvariantViolation(RWKitError, ValueError):
    """A validated parameter-set invariant failed; .invariant names it."""

    def __init__(self, invariant: str, message: str = ""):
        self.invariant = invariant
        super().__init__(message or invariant)


# --- numerical breakdown ----------------------------------------------------

class NonConvergent(RWKitError, ArithmeticError):
    """Series truncation criterion not met within the term budget."""


class PoleAtLatticePoint(RWKitError, ArithmeticError):
    """Argument lies (numerically) on a pole of the lattice."""


class LambdaOnLattice(RWKitError, ArithmeticError):
    """The twist parameter lies on the period lattice."""


class ShiftedLambdaOnLattice(RWKitError, ArithmeticError):
    """The shifted twist parameter lies on the period lattice."""


class DivisionByZero(RWKitError, ZeroDivisionError):
    """Exact division by the zero rational function."""


class SingularMatrix(RWKitError, ArithmeticError):
    """Exact linear solve hit a singular matrix."""


class DenominatorVanishes(RWKitError, ArithmeticError):
    """Numeric specialization lies on the excluded locus of a denominator."""


class ResonantExponent(RWKitError, ArithmeticError):
    """A local exponent is (numerically) a forbidden integer; the
    recurrence denominator m+1+c_l vanishes."""


class MixedLambda(RWKitError, ValueError):
    """Cocycle expression mixes the generic-twist and zero-twist families."""


class EtaUndefined(RWKitError, ArithmeticError):
    """The dual-diagonalizing basis is undefined at this configuration."""


class RadiusTooLarge(RWKitError, ArithmeticError):
    """Two-radius Laurent sampling disagrees: aliasing from a nearby
    singularity."""


class PathTooCloseToPuncture(RWKitError, ValueError):
    """An interior path point passes too close to a puncture."""


class RefinementLimit(RWKitError, ArithmeticError):
    """Branch tracking could not reach the step-increment criterion."""


class DivergentEndpoint(RWKitError, ArithmeticError):
    """Endpoint exponent makes the improper integral divergent."""


class ShiftBreaksConvergence(RWKitError, ArithmeticError):
    """The contiguity shift pushes an endpoint exponent past divergence."""


class QuadratureStall(RWKitError, ArithmeticError):
    """Adaptive quadrature levels stopped improving before the tolerance."""


#: errors that indicate the *request* was malformed (CLI exit code 3)
INPUT_ERRORS = (
    InvalidOrder,
    IndexOutOfRange,
    SizeTooSmall,
    PairNotTabulated,
    ParseError,
    InvariantViolation,
    MixedLambda,
    PathTooCloseToPuncture,
)

#: errors that indicate numerical breakdown on valid input (CLI exit code 4)
NUMERIC_ERRORS = (
    NonConvergent,
    PoleAtLatticePoint,
    LambdaOnLattice,
    ShiftedLambdaOnLattice,
    DivisionByZero,
    SingularMatrix,
    DenominatorVanishes,
    ResonantExponent,
    EtaUndefined,
    RadiusTooLarge,
    RefinementLimit,
    DivergentEndpoint,
    ShiftBreaksConvergence,
    QuadratureStall,
)
