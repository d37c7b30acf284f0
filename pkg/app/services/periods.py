import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
from sympy import Rational, cyclotomic_poly, nextprime, symbols
from sympy.core.sympify import SympifyError

from app.services.charsums import QuotientVerdict, character_quotient_test
from app.services.errors import (
    ConsistencyError,
    InvalidFamily,
    InvalidParameter,
    NotCoprime,
    OutsideConvergenceDomain,
    PoleAtNonPositiveInteger,
    PoleInC,
    UnsupportedFamily,
)
from app.services.legendre_curves import CurveFamily

logger = logging.getLogger(__name__)

# Constants
DEFAULT_PRECISION = 50
GUARD_DIGITS = 10
HYP2F1_MARGIN = Rational(1, 20)
MAX_SERIES_TERMS = 200_000
MAX_RECOGNITION_DEGREE = 60
MAX_RECOGNITION_HEIGHT = 10 ** 6
PSLQ_MAX_STEPS = 10_000
QM_CYCLE_ORDERS = (3, 4, 6)
QM_DEFAULT_PRIME_COUNT = 3
QM_MIN_PRIME = 5

HPComplex = mpmath.mpc

FAMILY_6_4_3_1 = CurveFamily(6, 4, 3, 1)
FAMILY_12_9_5_1 = CurveFamily(12, 9, 5, 1)
FAMILY_10_2_7_7 = CurveFamily(10, 2, 7, 7)

# period_pair takes (-1)^r = e^{-i pi r}; the [12;9,5,1] lattice uses the opposite
# square root of -1 on the rows of omega_1 and omega_5, so tau_n' is scaled by this
# sign before it is compared with the lattice.
TAU_PRIME_BRANCH_12 = {1: -1, 11: 1, 5: -1, 7: 1}


def _rational(x) -> Optional[Rational]:
    """Exact rational value of x, or None for inexact input."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, (int, Fraction)):
        return Rational(x)
    if isinstance(x, str):
        try:
            return Rational(x.strip())
        except (TypeError, ValueError, SympifyError):
            return None
    return None


def _mp(x):
    """Convert x to an mpmath number at the working precision."""
    r = _rational(x)
    if r is not None:
        return mpmath.mpf(int(r.p)) / int(r.q)
    if isinstance(x, str):
        raise InvalidParameter(f"not a number: {x!r}")
    return mpmath.mpmathify(x)


def _is_nonpositive_integer(x) -> bool:
    r = _rational(x)
    if r is not None:
        return bool(r.is_integer and r <= 0)
    v = mpmath.mpmathify(x)
    return mpmath.im(v) == 0 and mpmath.re(v) <= 0 and mpmath.isint(mpmath.re(v))


def _tolerance(precision: int, slack: int = 10):
    return mpmath.mpf(10) ** (-(precision - slack))


def _fmt(z, digits: int) -> Dict[str, str]:
    z = mpmath.mpmathify(z)
    return {"re": mpmath.nstr(mpmath.re(z), digits), "im": mpmath.nstr(mpmath.im(z), digits)}


def _unit_lambda(lam):
    """lam as a real in (0, 1)."""
    r = _rational(lam)
    if r is not None:
        if not 0 < r < 1:
            raise InvalidParameter(f"lambda must lie in (0, 1), got {r}")
        return _mp(r)
    value = _mp(lam)
    if mpmath.im(value) != 0 or not 0 < mpmath.re(value) < 1:
        raise InvalidParameter(f"lambda must lie in (0, 1), got {value}")
    return mpmath.re(value)


# Special functions


def gamma_fn(x, precision: int = DEFAULT_PRECISION):
    """
    Gamma function at a rational or real argument.

    Raises:
        PoleAtNonPositiveInteger: If x is 0, -1, -2, ...
    """
    if _is_nonpositive_integer(x):
        raise PoleAtNonPositiveInteger(f"Gamma has a pole at {x}")
    with mpmath.workdps(precision + GUARD_DIGITS):
        return mpmath.gamma(_mp(x))


def beta_fn(a, b, precision: int = DEFAULT_PRECISION):
    """
    B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b).

    Raises:
        PoleAtNonPositiveInteger: If a, b or a + b is a non-positive integer
    """
    ra, rb = _rational(a), _rational(b)
    total = ra + rb if ra is not None and rb is not None else None
    for value in (a, b):
        if _is_nonpositive_integer(value):
            raise PoleAtNonPositiveInteger(f"B({a}, {b}) has a pole at {value}")
    with mpmath.workdps(precision + GUARD_DIGITS):
        x, y = _mp(a), _mp(b)
        if total is not None:
            if total.is_integer and total <= 0:
                raise PoleAtNonPositiveInteger(f"B({a}, {b}): a + b = {total}")
        elif _is_nonpositive_integer(x + y):
            raise PoleAtNonPositiveInteger(f"B({a}, {b}): a + b = {x + y}")
        return mpmath.gamma(x) * mpmath.gamma(y) / mpmath.gamma(x + y)


def _ratio_bound(a, b, c, r, k: int):
    """Upper bound for |t_{m+1} / t_m| over all m >= k."""
    c_re = mpmath.re(c)
    if k + c_re <= 0:
        return mpmath.inf
    return r * (1 + abs(a - c) / (k + c_re)) * (1 + abs(b - 1) / (k + 1))


def hyp2f1(a, b, c, lam, precision: int = DEFAULT_PRECISION, margin=HYP2F1_MARGIN):
    """
    Classical 2F1(a, b; c; lam) by its power series, stopped once a geometric
    bound on the remaining tail drops below the working precision.

    Args:
        a, b, c: Rational parameters
        lam: Argument with |lam| < 1 - margin
        precision: Significant decimal digits
        margin: Distance kept from the unit circle

    Raises:
        PoleInC: If c is a non-positive integer
        OutsideConvergenceDomain: If |lam| >= 1 - margin
    """
    if _is_nonpositive_integer(c):
        raise PoleInC(f"2F1 is undefined for c = {c}")
    with mpmath.workdps(precision + GUARD_DIGITS):
        a_, b_, c_, z = _mp(a), _mp(b), _mp(c), _mp(lam)
        r = abs(z)
        if r >= 1 - _mp(margin):
            raise OutsideConvergenceDomain(f"|lambda| = {mpmath.nstr(r, 8)} is not below 1 - {margin}")

        eps = mpmath.mpf(10) ** (-(precision + 2))
        total = term = mpmath.mpf(1)
        k = 0
        while True:
            term = term * (a_ + k) * (b_ + k) / ((c_ + k) * (k + 1)) * z
            k += 1
            total += term
            if term == 0:
                break
            rho = _ratio_bound(a_, b_, c_, r, k)
            if rho < 1 and abs(term) * rho / (1 - rho) <= eps * abs(total):
                break
            if k > MAX_SERIES_TERMS:
                raise ConsistencyError(f"2F1({a}, {b}; {c}; {lam}) did not converge in {MAX_SERIES_TERMS} terms")
        return total


# Periods


@dataclass
class PeriodSet:
    """tau_n = int_0^1 omega_n and tau_n' = int_{1/lam}^oo omega_n, keyed by n."""
    family: CurveFamily
    lam: Any
    precision: int
    values: Dict[int, Tuple[Any, Any]] = field(default_factory=dict)

    def tau(self, n: int):
        return self.values[n][0]

    def tau_prime(self, n: int):
        return self.values[n][1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family.label,
            "lambda": str(self.lam),
            "precision": self.precision,
            "periods": {
                str(n): {"tau": _fmt(t, self.precision), "tau_prime": _fmt(tp, self.precision)}
                for n, (t, tp) in sorted(self.values.items())
            },
        }


def _residues(fam: CurveFamily, n: int) -> Tuple[int, int, int]:
    return ((n * fam.i) % fam.N, (n * fam.j) % fam.N, (n * fam.k) % fam.N)


def period_pair(fam: CurveFamily, n: int, lam, precision: int = DEFAULT_PRECISION):
    """
    (tau_n, tau_n') for n coprime to N, from the Beta/2F1 expressions with
    (i, j, k) replaced by their multiples n*i, n*j, n*k reduced mod N.

    (-1)^r is e^{i pi r}; powers of lam and 1 - lam are real and positive.

    Raises:
        NotCoprime: If gcd(n, N) != 1
        InvalidFamily: If N divides i + j + k
    """
    N = fam.N
    if gcd(n, N) != 1:
        raise NotCoprime(f"n={n} is not coprime to N={N}")
    if fam.divides_ijk:
        raise InvalidFamily(f"{fam.label}: N divides i + j + k")
    i, j, k = _residues(fam, n)
    s = i + j + k

    with mpmath.workdps(precision + GUARD_DIGITS):
        z = _unit_lambda(lam)
        tau = beta_fn(Rational(N - i, N), Rational(N - j, N), precision) * hyp2f1(
            Rational(k, N), Rational(N - i, N), Rational(2 * N - i - j, N), z, precision
        )
        tau_prime = (
            mpmath.expjpi(-_mp(Rational(k + j, N)))
            * mpmath.power(z, _mp(Rational(i + j - N, N)))
            * beta_fn(Rational(s - N, N), Rational(N - k, N), precision)
            * hyp2f1(Rational(j, N), Rational(s - N, N), Rational(i + j, N), z, precision)
        )
        return mpmath.mpc(tau), mpmath.mpc(tau_prime)


def period_set(fam: CurveFamily, lam, precision: int = DEFAULT_PRECISION) -> PeriodSet:
    """Periods for every n coprime to N."""
    result = PeriodSet(family=fam, lam=lam, precision=precision)
    for n in fam.units():
        result.values[n] = period_pair(fam, n, lam, precision)
    return result


def _require_primitive_pair(fam: CurveFamily):
    if fam.N not in QM_CYCLE_ORDERS:
        raise UnsupportedFamily(f"{fam.label}: N must be one of {QM_CYCLE_ORDERS}")
    if fam.divides_ij or fam.divides_ijk:
        raise InvalidFamily(f"{fam.label}: N must divide neither i + j nor i + j + k")
    if not fam.N < sum(fam.exponents) < 2 * fam.N:
        raise InvalidFamily(f"{fam.label}: i + j + k must lie strictly between N and 2N")


def period_tau(fam: CurveFamily, lam, precision: int = DEFAULT_PRECISION) -> PeriodSet:
    """
    tau_1, tau_1', tau_{N-1}, tau_{N-1}' for N in {3, 4, 6}.

    Raises:
        UnsupportedFamily: If N is not 3, 4 or 6
        InvalidFamily: If N | i+j, N | i+j+k or i+j+k is outside (N, 2N)
        InvalidParameter: If lam is not in (0, 1)
    """
    _require_primitive_pair(fam)
    result = PeriodSet(family=fam, lam=lam, precision=precision)
    for n in (1, fam.N - 1):
        result.values[n] = period_pair(fam, n, lam, precision)
    return result


def sine_ratio(fam: CurveFamily):
    """sin(i pi/N) sin(j pi/N) / (sin(k pi/N) sin((2N-i-j-k) pi/N)) at the working precision."""
    N, i, j, k = fam.N, fam.i, fam.j, fam.k
    sp = lambda m: mpmath.sinpi(mpmath.mpf(m) / N)
    return sp(i) * sp(j) / (sp(k) * sp(2 * N - i - j - k))


def gamma_ratio_check(fam: CurveFamily, lam, precision: int = DEFAULT_PRECISION) -> Tuple[bool, Any]:
    """tau_1' tau_{N-1}' / (tau_1 tau_{N-1}) against the sine formula."""
    periods = period_tau(fam, lam, precision)
    N = fam.N
    with mpmath.workdps(precision + GUARD_DIGITS):
        computed = (periods.tau_prime(1) * periods.tau_prime(N - 1)) / (periods.tau(1) * periods.tau(N - 1))
        residual = abs(computed - sine_ratio(fam))
    logger.debug("gamma ratio residual for %s at %s: %s", fam.label, lam, mpmath.nstr(residual, 5))
    return bool(residual <= _tolerance(precision)), residual


def _beta_gamma_quotient(N: int, i: int, j: int, k: int, precision: int):
    s = i + j + k
    with mpmath.workdps(precision + GUARD_DIGITS):
        num = beta_fn(Rational(N - i, N), Rational(N - j, N), precision)
        den = beta_fn(Rational(k, N), Rational(2 * N - s, N), precision)
        return num / den


def beta_quotient(N: int, i: int, j: int, k: int, precision: int = DEFAULT_PRECISION):
    """
    B((N-i)/N, (N-j)/N) / B(k/N, (2N-i-j-k)/N).

    Raises:
        InvalidParameter: Unless N < i + j + k < 2N
    """
    if not N < i + j + k < 2 * N:
        raise InvalidParameter(f"i + j + k = {i + j + k} must lie strictly between {N} and {2 * N}")
    return _beta_gamma_quotient(N, i, j, k, precision)


# Algebraic recognition


@dataclass(frozen=True)
class AlgebraicGuess:
    """
    PowerRational: x^degree = coefficients[0].
    QuadraticInPower: y^2 + b y + c = 0 with y = x^degree and (b, c) = coefficients.
    """
    form: str
    degree: Optional[int] = None
    coefficients: Tuple[Rational, ...] = ()
    precision: int = DEFAULT_PRECISION

    @property
    def recognized(self) -> bool:
        return self.form != "Unrecognized"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "form": self.form,
            "degree": self.degree,
            "coefficients": [str(c) for c in self.coefficients],
            "precision": self.precision,
        }


def _pslq(vector, tol, max_height: int):
    try:
        return mpmath.pslq(vector, tol=tol, maxcoeff=max_height, maxsteps=PSLQ_MAX_STEPS)
    except (ValueError, ZeroDivisionError):
        return None


def _real_value(value_fn: Callable[[], Any], tol):
    x = mpmath.mpmathify(value_fn())
    if mpmath.im(x) != 0 and abs(mpmath.im(x)) > tol * abs(x):
        return None
    return mpmath.re(x)


def _guess_residual(guess: AlgebraicGuess, x):
    y = x ** guess.degree
    if guess.form == "PowerRational":
        return abs(y - _mp(guess.coefficients[0])) / max(1, abs(y))
    b, c = (_mp(v) for v in guess.coefficients)
    return abs(y * y + b * y + c) / max(1, abs(y) ** 2)


def _verifies(guess: AlgebraicGuess, value_fn: Callable[[], Any], precision: int) -> bool:
    with mpmath.workdps(precision):
        tol = _tolerance(precision, 8)
        x = _real_value(value_fn, tol)
        return x is not None and _guess_residual(guess, x) <= tol


def recognize_algebraic(
    value_fn: Callable[[], Any],
    precision: int = DEFAULT_PRECISION,
    max_degree: int = MAX_RECOGNITION_DEGREE,
    max_height: int = MAX_RECOGNITION_HEIGHT,
) -> AlgebraicGuess:
    """
    Look for x^d in Q, then for x^d a root of a rational quadratic, d = 1..max_degree.

    value_fn is called with the working precision already set, once at
    `precision` for the search and again at twice that to confirm a guess.
    Unrecognized only means nothing was found within the bounds.
    """
    with mpmath.workdps(precision):
        tol = _tolerance(precision, 8)
        x = _real_value(value_fn, tol)
        if x is None:
            return AlgebraicGuess("Unrecognized", precision=precision)
        if x == 0:
            return AlgebraicGuess("PowerRational", 1, (Rational(0),), precision)

        candidates: List[AlgebraicGuess] = []
        for d in range(1, max_degree + 1):
            relation = _pslq([x ** d, 1], tol, max_height)
            if relation and relation[0] != 0:
                candidates.append(AlgebraicGuess("PowerRational", d, (Rational(-relation[1], relation[0]),), precision))
                break
        for d in range(1, max_degree + 1):
            if candidates:
                break
            y = x ** d
            relation = _pslq([y * y, y, 1], tol, max_height)
            if relation and relation[0] != 0:
                b, c = Rational(relation[1], relation[0]), Rational(relation[2], relation[0])
                candidates.append(AlgebraicGuess("QuadraticInPower", d, (b, c), precision))

    for guess in candidates:
        if _verifies(guess, value_fn, 2 * precision):
            return guess
        logger.debug("Guess %s failed re-verification at %d digits", guess, 2 * precision)
    return AlgebraicGuess("Unrecognized", precision=precision)


# Quaternionic multiplication


def default_qm_primes(M: int, count: int = QM_DEFAULT_PRIME_COUNT) -> List[int]:
    """First `count` primes p > 5 with p = 1 mod M."""
    primes: List[int] = []
    p = QM_MIN_PRIME
    while len(primes) < count:
        p = nextprime(p)
        if p % M == 1:
            primes.append(p)
    return primes


@dataclass
class QMResult:
    verdict: str
    family: CurveFamily
    M: int
    exponents: Tuple[int, int, int]
    finite_field: List[QuotientVerdict]
    quotient: Any
    recognition: AlgebraicGuess
    precision: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "family": self.family.label,
            "M": self.M,
            "jacobi_exponents": list(self.exponents),
            "finite_field": [v.to_dict() for v in self.finite_field],
            "beta_quotient": mpmath.nstr(self.quotient, self.precision),
            "recognition": self.recognition.to_dict(),
        }


def qm_check(
    N: int, i: int, j: int, k: int, primes: Optional[Sequence[int]] = None, precision: int = DEFAULT_PRECISION
) -> QMResult:
    """
    Decide whether the primitive part of J[N; i, j, k] has quaternionic multiplication.

    The finite-field channel tests J(eta^-k, eta^(i+j+k)) / J(eta^i, eta^j) for
    character-like behaviour at each prime; the numeric channel looks for an
    algebraic relation satisfied by B((N-i)/N, (N-j)/N) / B(k/N, (2N-i-j-k)/N).
    N = 3 is tested with characters of order 6 on doubled exponents.

    Returns:
        QMResult with verdict QM, NoQM or Inconclusive

    Raises:
        UnsupportedFamily: If N is not 3, 4 or 6
        InvalidFamily: If N divides i + j + k
    """
    if N not in QM_CYCLE_ORDERS:
        raise UnsupportedFamily(f"N must be one of {QM_CYCLE_ORDERS}, got {N}")
    fam = CurveFamily(N, i, j, k)
    if fam.divides_ijk:
        raise InvalidFamily(f"{fam.label}: N divides i + j + k")

    M, scale = (6, 2) if N == 3 else (N, 1)
    exponents = ((scale * i) % M, (-scale * k) % M, (scale * (i + j)) % M)
    primes = list(primes) if primes else default_qm_primes(M)

    finite_field = [
        character_quotient_test(M, *exponents, p, require_nondivisible=not fam.divides_ij)
        for p in primes
    ]
    with mpmath.workdps(precision):
        quotient = _beta_gamma_quotient(N, i, j, k, precision)
    recognition = recognize_algebraic(lambda: _beta_gamma_quotient(N, i, j, k, mpmath.mp.dps), precision)

    if not all(v.character_like for v in finite_field):
        verdict = "NoQM"
    elif recognition.recognized:
        verdict = "QM"
    else:
        verdict = "Inconclusive"
    logger.info("QM check %s: %s", fam.label, verdict)
    return QMResult(
        verdict=verdict,
        family=fam,
        M=M,
        exponents=exponents,
        finite_field=finite_field,
        quotient=quotient,
        recognition=recognition,
        precision=precision,
    )


# Period matrices


@dataclass
class PeriodMatrix:
    """Rows indexed by new differentials omega_n, columns by lattice generators."""
    family: CurveFamily
    lam: Any
    precision: int
    row_labels: List[int]
    rows: List[List[Any]]
    constants: Dict[str, Any] = field(default_factory=dict)

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def to_dict(self) -> Dict[str, Any]:
        digits = min(self.precision, 30)
        return {
            "family": self.family.label,
            "lambda": str(self.lam),
            "rows": {str(n): [_fmt(z, digits) for z in row] for n, row in zip(self.row_labels, self.rows)},
            "constants": {name: _fmt(value, digits) for name, value in sorted(self.constants.items())},
        }


def _lattice_row(N: int, n: int, tau, tau_prime, basis_exponents: Sequence[int]) -> List[Any]:
    """(tau sigma_n(v), tau' sigma_n(v)) for v the powers zeta_N^e, e in basis_exponents."""
    conjugates = [mpmath.expjpi(mpmath.mpf(2 * n * e) / N) for e in basis_exponents]
    return [tau * z for z in conjugates] + [tau_prime * z for z in conjugates]


def _generic_constants(fam: CurveFamily, lam) -> Dict[str, Any]:
    N, i, j, k = fam.N, fam.i, fam.j, fam.k
    alpha = (
        mpmath.expjpi(mpmath.mpf(k + j) / N)
        * mpmath.power(lam, mpmath.mpf(N - i - j) / N)
        * mpmath.power(1 - lam, mpmath.mpf(k + j - N) / N)
    )
    beta = beta_fn(Rational(i + j + k - N, N), Rational(N - k, N), mpmath.mp.dps) / beta_fn(
        Rational(i, N), Rational(j, N), mpmath.mp.dps
    )
    gamma = sine_ratio(fam)
    return {
        "alpha": alpha,
        "beta": beta,
        "gamma": gamma,
        "zeta": mpmath.expjpi(mpmath.mpf(2) / N),
        "J12": beta / alpha,
        "J21": gamma * alpha / beta,
    }


def _generic_matrix(fam: CurveFamily, lam, precision: int) -> PeriodMatrix:
    periods = period_tau(fam, lam, precision)
    N = fam.N
    with mpmath.workdps(precision + GUARD_DIGITS):
        z = _unit_lambda(lam)
        constants = _generic_constants(fam, z)
        t1, t2 = periods.tau(1), periods.tau(N - 1)
        rows = [
            _lattice_row(N, 1, t1, constants["J12"] * t2, (0, 1)),
            _lattice_row(N, N - 1, t2, constants["J21"] * t1, (0, 1)),
        ]
        constants["tau_prime_1"] = periods.tau_prime(1)
        constants["tau_prime_last"] = periods.tau_prime(N - 1)
        if fam == FAMILY_6_4_3_1:
            constants["beta1"] = periods.tau_prime(1) / t2
            constants["beta2"] = periods.tau_prime(N - 1) / t1
            constants["beta1_closed"] = (
                mpmath.expjpi(mpmath.mpf(-2) / 3)
                * mpmath.power(z, mpmath.mpf(1) / 6)
                * mpmath.power(1 - z, mpmath.mpf(1) / 3)
                * mpmath.cbrt(2)
            )
            constants["beta2_closed"] = (
                mpmath.expjpi(mpmath.mpf(2) / 3)
                * mpmath.power(z, mpmath.mpf(-1) / 6)
                * mpmath.power(1 - z, mpmath.mpf(-1) / 3)
                * mpmath.cbrt(4)
            )
    return PeriodMatrix(fam, lam, precision, [1, N - 1], rows, constants)


def _matrix_12_9_5_1(lam, precision: int) -> PeriodMatrix:
    fam = FAMILY_12_9_5_1
    pairs = {n: period_pair(fam, n, lam, precision) for n in (1, 11, 5, 7)}
    t1, t3 = pairs[1][0], pairs[11][0]
    with mpmath.workdps(precision + GUARD_DIGITS):
        z = _unit_lambda(lam)
        L = mpmath.power(z, mpmath.mpf(1) / 6)
        sqrt3 = mpmath.sqrt(3)
        u = 2 + sqrt3
        alpha = mpmath.sqrt(1 - z) * mpmath.sqrt(9 + 6 * sqrt3) / 3
        j = mpmath.mpc(0, 1)
        basis = (0, 1, 2, 3)
        rows = [
            _lattice_row(12, 1, t1, j * L * alpha * t3, basis),
            _lattice_row(12, 11, t3, j * u / (alpha * L) * t1, basis),
            _lattice_row(12, 5, alpha * t3, j / L * t1, basis),
            _lattice_row(12, 7, u / alpha * t1, j * L * t3, basis),
        ]
        constants = {
            "alpha": alpha,
            "L": L,
            "u": u,
            "zeta": mpmath.expjpi(mpmath.mpf(1) / 6),
            "beta_quotient": beta_fn(Rational(1, 4), Rational(7, 12), precision)
            / beta_fn(Rational(1, 12), Rational(3, 4), precision),
        }
        for n in (1, 11, 5, 7):
            constants[f"tau{n}"], constants[f"tau_prime{n}"] = pairs[n]
    return PeriodMatrix(fam, lam, precision, [1, 11, 5, 7], rows, constants)


def _matrix_10_2_7_7(lam, precision: int) -> PeriodMatrix:
    fam = FAMILY_10_2_7_7
    pairs = {n: period_pair(fam, n, lam, precision) for n in (1, 9, 3, 7)}
    with mpmath.workdps(precision + GUARD_DIGITS):
        z = _unit_lambda(lam)
        sqrt5 = mpmath.sqrt(5)
        golden_plus, golden_minus = (sqrt5 - 1) / 2, (-sqrt5 - 1) / 2
        alpha1 = (
            mpmath.expjpi(mpmath.mpf(7) / 5)
            * mpmath.power(z, mpmath.mpf(1) / 10)
            * mpmath.power(1 - z, mpmath.mpf(2) / 5)
        )
        beta1 = beta_fn(Rational(7, 10), Rational(2, 5), precision) / beta_fn(Rational(3, 10), Rational(4, 5), precision)
        alpha2 = (
            mpmath.expjpi(mpmath.mpf(1) / 5)
            * mpmath.power(z, mpmath.mpf(3) / 10)
            * mpmath.power(1 - z, mpmath.mpf(-4) / 5)
        )
        beta2 = beta_fn(Rational(1, 10), Rational(1, 5), precision) / beta_fn(Rational(9, 10), Rational(2, 5), precision)
        t1, t2, t3, t4 = (pairs[n][0] for n in (1, 9, 3, 7))
        basis = (0, 1, 2, 3)
        rows = [
            _lattice_row(10, 1, t1, golden_plus / (alpha1 * beta1) * t2, basis),
            _lattice_row(10, 9, t2, alpha1 * beta1 * t1, basis),
            _lattice_row(10, 3, t3, golden_minus / (alpha2 * beta2) * t4, basis),
            _lattice_row(10, 7, t4, alpha2 * beta2 * t3, basis),
        ]
        constants = {
            "alpha1": alpha1,
            "beta1": beta1,
            "alpha2": alpha2,
            "beta2": beta2,
            "zeta": mpmath.expjpi(mpmath.mpf(1) / 5),
        }
        for n in (1, 9, 3, 7):
            constants[f"tau{n}"], constants[f"tau_prime{n}"] = pairs[n]
    return PeriodMatrix(fam, lam, precision, [1, 9, 3, 7], rows, constants)


def period_matrix(fam: CurveFamily, lam, precision: int = DEFAULT_PRECISION) -> PeriodMatrix:
    """
    Period matrix of the primitive part of the Jacobian.

    Supported: every family accepted by period_tau, [12;9,5,1] and [10;2,7,7].

    Raises:
        UnsupportedFamily: For any other family
        InvalidParameter: If lam is not in (0, 1)
    """
    if fam == FAMILY_12_9_5_1:
        return _matrix_12_9_5_1(lam, precision)
    if fam == FAMILY_10_2_7_7:
        return _matrix_10_2_7_7(lam, precision)
    try:
        _require_primitive_pair(fam)
    except InvalidFamily as e:
        raise UnsupportedFamily(str(e)) from e
    return _generic_matrix(fam, lam, precision)


def real_rank(matrix: PeriodMatrix, tolerance=None) -> int:
    """Rank of the columns of the matrix viewed as vectors in R^(2 rows)."""
    with mpmath.workdps(matrix.precision + GUARD_DIGITS):
        rows, cols = matrix.shape
        realified = mpmath.matrix(2 * rows, cols)
        for r, row in enumerate(matrix.rows):
            for c, value in enumerate(row):
                realified[r, c] = mpmath.re(value)
                realified[rows + r, c] = mpmath.im(value)
        singular = mpmath.svd_r(realified, compute_uv=False)
        values = [abs(singular[t]) for t in range(len(singular))]
        cutoff = (tolerance if tolerance is not None else _tolerance(matrix.precision // 2, 0)) * max(values)
        return sum(1 for v in values if v > cutoff)


def _norm(value):
    if isinstance(value, mpmath.matrix):
        return mpmath.mnorm(value, 1)
    return abs(value)


def _generic_relations(pm: PeriodMatrix) -> Dict[str, Any]:
    c = pm.constants
    zeta = c["zeta"]
    eye = mpmath.eye(2)
    I = 2 * mpmath.diag([zeta, 1 / zeta]) - (zeta + 1 / zeta) * eye
    J = mpmath.matrix([[0, c["J12"]], [c["J21"], 0]])
    tau1, tau_last = pm.rows[0][0], pm.rows[1][0]
    residuals = {
        "I^2 = (zeta - 1/zeta)^2": _norm(I * I - (zeta - 1 / zeta) ** 2 * eye),
        "J^2 = gamma": _norm(J * J - c["gamma"] * eye),
        "IJ = -JI": _norm(I * J + J * I),
        "tau_1' = (beta/alpha) tau_{N-1}": _norm(c["tau_prime_1"] - c["J12"] * tau_last),
        "tau_{N-1}' = (gamma alpha/beta) tau_1": _norm(c["tau_prime_last"] - c["J21"] * tau1),
    }
    if "beta1" in c:
        residuals["beta1 beta2 = 2"] = _norm(c["beta1"] * c["beta2"] - 2)
        residuals["beta1 closed form"] = _norm(c["beta1"] - c["beta1_closed"])
        residuals["beta2 closed form"] = _norm(c["beta2"] - c["beta2_closed"])
    return residuals


def _zeta_shift(order: int, basis_size: int):
    """Integer matrix of multiplication by zeta_order on the power basis, acting on row vectors."""
    modulus = [int(c) for c in reversed(cyclotomic_poly(order, symbols("x"), polys=True).all_coeffs())]
    R = mpmath.zeros(basis_size, basis_size)
    for c in range(basis_size - 1):
        R[c + 1, c] = 1
    for e in range(basis_size):
        R[e, basis_size - 1] = -modulus[e]
    return R


def _relations_12_9_5_1(pm: PeriodMatrix) -> Dict[str, Any]:
    c = pm.constants
    zeta, L, u, alpha = c["zeta"], c["L"], c["u"], c["alpha"]
    j = mpmath.mpc(0, 1)
    eye = mpmath.eye(4)
    A = mpmath.diag([zeta, 1 / zeta, zeta ** 5, zeta ** -5])
    B = mpmath.matrix(4, 4)
    B[0, 2], B[1, 3], B[2, 0], B[3, 1] = j / L, j * L, j * L, j / L
    C = mpmath.matrix(4, 4)
    C[0, 1], C[1, 0] = j * u / (alpha * L), j * L * alpha
    C[2, 3], C[3, 2] = j * L / alpha, j * alpha / (u * L)
    A_inv, B_inv, C_inv = mpmath.inverse(A), mpmath.inverse(B), mpmath.inverse(C)

    labels = pm.row_labels
    tau = mpmath.matrix([c[f"tau{n}"] for n in labels])
    tau_prime = mpmath.matrix([TAU_PRIME_BRANCH_12[n] * c[f"tau_prime{n}"] for n in labels])
    computed = mpmath.matrix(
        [_lattice_row(12, n, tau[r], tau_prime[r], (0, 1, 2, 3)) for r, n in enumerate(labels)]
    )
    shift = _zeta_shift(12, 4)
    R_A = mpmath.zeros(8, 8)
    for r in range(4):
        for s in range(4):
            R_A[r, s] = R_A[4 + r, 4 + s] = shift[r, s]
    return {
        "A^4 - A^2 = -1": _norm(A ** 4 - A ** 2 + eye),
        "B^2 = -1": _norm(B * B + eye),
        "C^2 + A + A^-1 = -2": _norm(C * C + A + A_inv + 2 * eye),
        "BAB^-1 = A^3 - A": _norm(B * A * B_inv - (A ** 3 - A)),
        "CAC^-1 = A^-1": _norm(C * A * C_inv - A_inv),
        "CBC^-1 = (2 + A + A^-1)B": _norm(C * B * C_inv - (2 * eye + A + A_inv) * B),
        "tau_1' = -i L alpha tau_3": _norm(c["tau_prime1"] + j * L * alpha * c["tau11"]),
        "tau_5 = alpha tau_3": _norm(c["tau5"] - alpha * c["tau11"]),
        "tau_7 = (2+sqrt3)/alpha tau_1": _norm(c["tau7"] - u / alpha * c["tau1"]),
        "tau' = B^T tau": _norm(tau_prime - B.T * tau),
        "tau' = C^T tau": _norm(tau_prime - C.T * tau),
        "A Pi = Pi R_A": _norm(A * computed - computed * R_A),
        "lattice = computed periods": _norm(mpmath.matrix(pm.rows) - computed),
        "beta quotient^2 = 2 sqrt3/3 - 1": _norm(c["beta_quotient"] ** 2 - (2 * mpmath.sqrt(3) / 3 - 1)),
    }


def _relations_10_2_7_7(pm: PeriodMatrix) -> Dict[str, Any]:
    c = pm.constants
    zeta = c["zeta"]
    eye = mpmath.eye(4)
    sqrt5 = mpmath.sqrt(5)
    golden_plus, golden_minus = (sqrt5 - 1) / 2, (-sqrt5 - 1) / 2
    ab1, ab2 = c["alpha1"] * c["beta1"], c["alpha2"] * c["beta2"]
    A = mpmath.diag([zeta, 1 / zeta, zeta ** 3, zeta ** -3])
    B = mpmath.matrix(4, 4)
    B[0, 1], B[1, 0] = ab1, golden_plus / ab1
    B[2, 3], B[3, 2] = ab2, golden_minus / ab2
    A_inv = mpmath.inverse(A)
    return {
        "A^4 - A^3 + A^2 - A = -1": _norm(A ** 4 - A ** 3 + A ** 2 - A + eye),
        "B^2 = A^2 + A^-2": _norm(B * B - (A ** 2 + A_inv ** 2)),
        "BAB^-1 = A^-1": _norm(B * A * mpmath.inverse(B) - A_inv),
        "tau_1' = (sqrt5-1)/2 tau_2/(alpha1 beta1)": _norm(c["tau_prime1"] - golden_plus * c["tau9"] / ab1),
        "tau_2' = alpha1 beta1 tau_1": _norm(c["tau_prime9"] - ab1 * c["tau1"]),
        "tau_3' tau_4' = (-sqrt5-1)/2 tau_3 tau_4": _norm(
            c["tau_prime3"] * c["tau_prime7"] - golden_minus * c["tau3"] * c["tau7"]
        ),
    }


def relation_residuals(pm: PeriodMatrix) -> Tuple[bool, Dict[str, Any]]:
    """
    Residual of every endomorphism relation and period identity of pm; the
    relations hold when all residuals are below 10^-(precision-10).
    """
    with mpmath.workdps(pm.precision + GUARD_DIGITS):
        if pm.family == FAMILY_12_9_5_1:
            residuals = _relations_12_9_5_1(pm)
        elif pm.family == FAMILY_10_2_7_7:
            residuals = _relations_10_2_7_7(pm)
        else:
            residuals = _generic_relations(pm)
    tol = _tolerance(pm.precision)
    failed = [name for name, value in residuals.items() if value > tol]
    if failed:
        logger.warning("Relations failing for %s at %s: %s", pm.family.label, pm.lam, failed)
    return not failed, residuals


def endomorphism_relations_check(fam: CurveFamily, lam, precision: int = DEFAULT_PRECISION) -> Tuple[bool, Dict[str, Any]]:
    """
    Build the endomorphism generators from the period constants and measure
    every defining relation against the computed periods.
    """
    return relation_residuals(period_matrix(fam, lam, precision))
