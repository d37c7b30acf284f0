class PreconditionError(ValueError):
    """Raised when an operation is called outside its domain."""
    pass


class ConsistencyError(RuntimeError):
    """Raised when an internal cross-check fails."""
    pass


class NotPrime(PreconditionError):
    """Custom exception for composite or too small field characteristics."""
    pass


class FieldTooLarge(PreconditionError):
    """Custom exception for fields above the configured size bound."""
    pass


class ZeroElement(PreconditionError):
    """Custom exception for discrete logs of zero."""
    pass


class ExtensionFieldExactUnsupported(PreconditionError):
    """Custom exception for exact Gauss sums over extension fields."""
    pass


class FieldMismatch(PreconditionError):
    """Custom exception for characters living on different fields."""
    pass


class NonUnitQuotient(PreconditionError):
    """Custom exception for divisions by a vanishing cyclotomic number."""
    pass


class NotCoprime(PreconditionError):
    """Custom exception for indices sharing a factor with the cover degree."""
    pass


class WrongCongruence(PreconditionError):
    """Custom exception for q not congruent to 1 modulo the cover degree."""
    pass


class BadReduction(PreconditionError):
    """Custom exception for primes of bad reduction of a curve instance."""
    pass


class InvalidFamily(PreconditionError):
    """Custom exception for curve parameters [N; i, j, k] outside the supported range."""
    pass


class PoleAtNonPositiveInteger(PreconditionError):
    """Custom exception for Gamma or Beta evaluated at a pole."""
    pass


class OutsideConvergenceDomain(PreconditionError):
    """Custom exception for 2F1 arguments too close to or beyond the unit circle."""
    pass


class PoleInC(PreconditionError):
    """Custom exception for 2F1 with c a non-positive integer."""
    pass


class UnsupportedFamily(PreconditionError):
    """Custom exception for families without a period formula or period matrix."""
    pass


class NonIntegerTotal(ConsistencyError):
    """Custom exception for point counts that fail to reduce to an integer."""
    pass


class WeilBoundViolation(ConsistencyError):
    """Custom exception for L-polynomials whose roots leave the Weil circle."""
    pass


class InvalidParameter(PreconditionError):
    """Custom exception for parameters outside an operation's domain."""
    pass
