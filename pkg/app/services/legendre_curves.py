import logging
from dataclasses import dataclass
from math import gcd
from typing import Any, Dict, List, Optional, Tuple

import mpmath
import numpy as np
from sympy import Poly, Rational, ilcm, isprime, symbols, totient

from app.services.charsums import CycNumber, character
from app.services.errors import (
    BadReduction,
    InvalidFamily,
    InvalidParameter,
    NonIntegerTotal,
    NotCoprime,
    WeilBoundViolation,
    WrongCongruence,
)
from app.services.ffield import FieldSpec, build_field, nth_power_count
from app.services.gaussian_hgf import CycRational, greene_2f1_def

logger = logging.getLogger(__name__)

# Constants
WEIL_TOLERANCE = 1e-6
ROOT_PRECISION = 40


@dataclass(frozen=True)
class CurveFamily:
    """Parameters [N; i, j, k] of y^N = x^i (1-x)^j (1-lam x)^k."""
    N: int
    i: int
    j: int
    k: int

    def __post_init__(self):
        if self.N < 2:
            raise InvalidFamily(f"cover degree must be at least 2, got {self.N}")
        if not all(1 <= e < self.N for e in (self.i, self.j, self.k)):
            raise InvalidFamily(f"exponents must lie in [1, {self.N}), got {self.exponents}")
        if gcd(gcd(gcd(self.i, self.j), self.k), self.N) != 1:
            raise InvalidFamily(f"gcd(i, j, k) must be coprime to N for {self.label}")

    @property
    def exponents(self) -> Tuple[int, int, int]:
        return (self.i, self.j, self.k)

    @property
    def label(self) -> str:
        return f"[{self.N};{self.i},{self.j},{self.k}]"

    @property
    def divides_ijk(self) -> bool:
        return (self.i + self.j + self.k) % self.N == 0

    @property
    def divides_ij(self) -> bool:
        return (self.i + self.j) % self.N == 0

    def units(self) -> List[int]:
        return [m for m in range(1, self.N) if gcd(m, self.N) == 1]


@dataclass(frozen=True)
class CurveInstance:
    family: CurveFamily
    lam: Rational

    def __post_init__(self):
        object.__setattr__(self, "lam", Rational(self.lam))
        if self.lam in (0, 1):
            raise InvalidParameter(f"lambda must avoid 0 and 1, got {self.lam}")


@dataclass(frozen=True)
class CountResult:
    q: int
    affine_sum: int
    n0: int
    n1: int
    n_inv_lambda: int
    n_inf: int
    total: int

    def to_dict(self) -> Dict[str, int]:
        return dict(self.__dict__)


@dataclass(frozen=True)
class LPolynomial:
    """L(T) = sum c_i T^i of degree 2g over F_p, coefficients low to high."""
    p: int
    g: int
    coeffs: Tuple[int, ...]

    @property
    def trace(self) -> int:
        return -self.coeffs[1] if len(self.coeffs) > 1 else 0

    def to_dict(self) -> Dict[str, Any]:
        return {"p": self.p, "g": self.g, "coeffs": list(self.coeffs)}


def parse_lambda(text: str) -> Rational:
    """Parse 'u/v' (or an integer) into a rational."""
    try:
        value = Rational(text.strip())
    except (TypeError, ValueError) as e:
        raise InvalidParameter(f"lambda must look like u/v, got {text!r}") from e
    return value


# Invariants


def genus(fam: CurveFamily) -> int:
    N, i, j, k = fam.N, fam.i, fam.j, fam.k
    branch = gcd(N, i + j + k) + gcd(N, i) + gcd(N, j) + gcd(N, k)
    return 1 + N - branch // 2


def dim_Vn(fam: CurveFamily, n: int) -> int:
    """
    Dimension of the zeta_N^n eigenspace of holomorphic differentials.

    Raises:
        NotCoprime: If gcd(n, N) != 1
    """
    if gcd(n, fam.N) != 1:
        raise NotCoprime(f"n={n} is not coprime to N={fam.N}")
    N = fam.N
    frac = lambda e: Rational(n * e, N) % 1
    value = frac(fam.i) + frac(fam.j) + frac(fam.k) - frac(fam.i + fam.j + fam.k)
    return int(value)


def schwarz_angles(a, b, c) -> Tuple[Tuple[Rational, Rational, Rational], Tuple[Optional[int], ...]]:
    """
    Schwarz triangle angles (|1-c|, |c-a-b|, |a-b|) and the triangle-group denominators.

    A zero angle has no finite denominator and is reported as None.
    """
    a, b, c = Rational(a), Rational(b), Rational(c)
    angles = (abs(1 - c), abs(c - a - b), abs(a - b))
    denominators = tuple(int(angle.q) if angle != 0 else None for angle in angles)
    return angles, denominators


def hypergeometric_parameters(fam: CurveFamily) -> Tuple[Rational, Rational, Rational]:
    """(a, b, c) = (k/N, (N-i)/N, (2N-i-j)/N) with tau_1 = B(b, c-b) 2F1(a, b; c; lam)."""
    N = fam.N
    return Rational(fam.k, N), Rational(N - fam.i, N), Rational(2 * N - fam.i - fam.j, N)


def family_from_parameters(a, b, c) -> CurveFamily:
    """Inverse conversion i = N(1-b), j = N(1+b-c), k = N a with N the common denominator."""
    a, b, c = Rational(a), Rational(b), Rational(c)
    N = int(ilcm(a.q, b.q, c.q))
    i, j, k = N * (1 - b), N * (1 + b - c), N * a
    return CurveFamily(N, int(i) % N, int(j) % N, int(k) % N)


# Reduction and counting


def reduce_lambda(inst: CurveInstance, f: FieldSpec) -> int:
    """
    Reduce lam = u/v into F_p.

    Raises:
        BadReduction: If p divides u, v, u-v or N
    """
    u, v, p = int(inst.lam.p), int(inst.lam.q), f.p
    if u % p == 0 or v % p == 0 or (u - v) % p == 0:
        raise BadReduction(f"p={p} divides the numerator, denominator or u-v of lambda={inst.lam}")
    if inst.family.N % p == 0:
        raise BadReduction(f"p={p} divides the cover degree {inst.family.N}")
    return f.from_rational(u, v)


def resolved_counts(inst: CurveInstance, f: FieldSpec) -> Tuple[int, int, int, int]:
    """
    Points of the smooth model lying over x = 0, 1, 1/lam and infinity.

    Returns:
        (n0, n1, n_inv_lambda, n_inf)
    """
    fam = inst.family
    N, i, j, k = fam.N, fam.i, fam.j, fam.k
    lam = reduce_lambda(inst, f)

    c1 = int(f.power(f.sub(1, lam), k))
    c_inv = int(f.mul(f.power(lam, -i), f.power(f.sub(1, f.inv(lam)), j)))
    c_inf = int(f.mul(f.power(f.neg(1), j), f.power(f.neg(lam), k)))

    e = (i + j + k) // N + 1
    n0 = nth_power_count(1, gcd(N, i), f)
    n1 = nth_power_count(c1, gcd(N, j), f)
    n_inv = nth_power_count(c_inv, gcd(N, k), f)
    n_inf = nth_power_count(c_inf, gcd(N, N * e - (i + j + k)), f)
    return n0, n1, n_inv, n_inf


def _curve_logs(inst: CurveInstance, f: FieldSpec) -> Tuple[np.ndarray, np.ndarray]:
    """dlog of x^i (1-x)^j (1-lam x)^k over F_q, and the mask of its zeros."""
    fam = inst.family
    lam = reduce_lambda(inst, f)
    xs = f.elements()
    factors = (xs, f.sub(1, xs), f.sub(1, f.mul(lam, xs)))
    zero = np.zeros(f.q, dtype=bool)
    logs = np.zeros(f.q, dtype=np.int64)
    for exponent, values in zip(fam.exponents, factors):
        zero |= values == 0
        logs += exponent * f.log_table[values]
    return logs % f.order, zero


def count_points_brute(inst: CurveInstance, f: FieldSpec) -> CountResult:
    """
    Count points of the smooth model over F_q by sweeping x and resolving the four branch points.

    Args:
        inst: Curve instance
        f: Field F_q

    Returns:
        CountResult
    """
    logs, zero = _curve_logs(inst, f)
    d = gcd(inst.family.N, f.order)
    per_x = np.where(zero, 1, np.where(logs % d == 0, d, 0))
    affine = int(per_x.sum())
    n0, n1, n_inv, n_inf = resolved_counts(inst, f)
    return CountResult(
        q=f.q, affine_sum=affine, n0=n0, n1=n1, n_inv_lambda=n_inv, n_inf=n_inf,
        total=affine + n0 + n1 + n_inv + n_inf - 3,
    )


def _hgf_term(inst: CurveInstance, f: FieldSpec, m: int, lam: int) -> CycRational:
    """xi^(mj)(-1) 2F1(xi^(-km), xi^(im); xi^(m(i+j)); lam)."""
    fam = inst.family
    xi = character(f, fam.N, 1)
    value = greene_2f1_def(xi ** (-fam.k * m), xi ** (fam.i * m), xi ** (m * (fam.i + fam.j)), lam)
    return value * (xi ** (m * fam.j)).at_minus_one()


def count_points_hgf(inst: CurveInstance, f: FieldSpec) -> CountResult:
    """
    Count points through 1 + q + q sum_m xi^(mj)(-1) 2F1(...) + n0 + n1 + n_inv + n_inf - 4.

    Raises:
        WrongCongruence: If q != 1 mod N
        NonIntegerTotal: If the cyclotomic total is not a rational integer
    """
    N = inst.family.N
    if f.order % N:
        raise WrongCongruence(f"q={f.q} is not 1 mod {N}")
    lam = reduce_lambda(inst, f)

    hgf_sum = CycRational.zero(N)
    for m in range(1, N):
        hgf_sum = hgf_sum + _hgf_term(inst, f, m, lam)
    scaled = hgf_sum * f.q
    if scaled.denominator != 1:
        raise NonIntegerTotal(f"q * sum of 2F1 values has denominator {scaled.denominator}")
    affine = f.q + scaled.numerator.to_int()

    n0, n1, n_inv, n_inf = resolved_counts(inst, f)
    return CountResult(
        q=f.q, affine_sum=affine, n0=n0, n1=n1, n_inv_lambda=n_inv, n_inf=n_inf,
        total=affine + n0 + n1 + n_inv + n_inf - 3,
    )


def _charsum(inst: CurveInstance, f: FieldSpec, m: int) -> CycNumber:
    N = inst.family.N
    logs, zero = _curve_logs(inst, f)
    exps = (m * logs[~zero]) % N
    return CycNumber.from_counts(N, np.bincount(exps, minlength=N))


def charsum_new(inst: CurveInstance, f: FieldSpec, m: int) -> CycNumber:
    """
    sum_x xi^m(x^i (1-x)^j (1-lam x)^k) for the canonical order-N character xi.

    Raises:
        NotCoprime: If gcd(m, N) != 1
        WrongCongruence: If q != 1 mod N
    """
    N = inst.family.N
    if gcd(m, N) != 1:
        raise NotCoprime(f"m={m} is not coprime to N={N}")
    if f.order % N:
        raise WrongCongruence(f"q={f.q} is not 1 mod {N}")
    return _charsum(inst, f, m)


def verify_charsum_hgf(inst: CurveInstance, f: FieldSpec, m: int) -> Tuple[bool, Dict[str, Any]]:
    """The curve character sum equals q xi^(mj)(-1) 2F1(xi^(-km), xi^(im); xi^(m(i+j)); lam)."""
    if f.order % inst.family.N:
        raise WrongCongruence(f"q={f.q} is not 1 mod {inst.family.N}")
    lam = reduce_lambda(inst, f)
    lhs = _charsum(inst, f, m)
    rhs = _hgf_term(inst, f, m, lam) * f.q
    return lhs == rhs, {"m": m, "lhs": lhs.to_dict(), "rhs": rhs.to_dict()}


def frobenius_trace_new(inst: CurveInstance, f: FieldSpec) -> int:
    """
    Trace of Frobenius on the new part: -sum over m coprime to N of charsum_new.

    For prime N and q != 1 mod N the whole Jacobian is new and its character sums
    vanish, so the trace is q + 1 - #X(F_q).

    Raises:
        WrongCongruence: If q != 1 mod N for composite N
        WeilBoundViolation: If |trace| > 2 phi(N) sqrt(q)
    """
    fam = inst.family
    if f.order % fam.N:
        if not isprime(fam.N):
            raise WrongCongruence(f"q={f.q} is not 1 mod {fam.N}")
        trace = f.q + 1 - count_points_brute(inst, f).total
    else:
        total = CycNumber.zero(fam.N)
        for m in fam.units():
            total = total + charsum_new(inst, f, m)
        trace = -total.to_int()

    bound = 2 * int(totient(fam.N))
    if trace * trace > bound * bound * f.q:
        raise WeilBoundViolation(f"trace {trace} exceeds {bound} sqrt({f.q})")
    return trace


# L-polynomials


def _newton_coefficients(power_sums: List[int]) -> List[int]:
    """c_0..c_g of prod (1 - alpha T) from the power sums of the alphas."""
    coeffs = [1]
    for k in range(1, len(power_sums) + 1):
        acc = sum(power_sums[i - 1] * coeffs[k - i] for i in range(1, k + 1))
        if acc % k:
            raise NonIntegerTotal(f"Newton identity at degree {k} is not integral")
        coeffs.append(-acc // k)
    return coeffs


def weil_check(lpoly: LPolynomial) -> Tuple[bool, float]:
    """
    Check every root of L(T) has modulus p^(-1/2).

    Returns:
        (ok, largest deviation of |root| from p^(-1/2))
    """
    T = symbols("T")
    poly = Poly(list(reversed(lpoly.coeffs)), T)
    _, factors = poly.sqf_list()
    deviation = mpmath.mpf(0)
    with mpmath.workdps(ROOT_PRECISION):
        target = mpmath.mpf(lpoly.p) ** mpmath.mpf(-0.5)
        for factor, _ in factors:
            coeffs = [int(c) for c in factor.all_coeffs()]
            if len(coeffs) < 2:
                continue
            for root in mpmath.polyroots(coeffs, maxsteps=200, extraprec=2 * ROOT_PRECISION):
                deviation = max(deviation, abs(abs(root) - target))
    deviation = float(deviation)
    return deviation <= WEIL_TOLERANCE, deviation


def l_polynomial(inst: CurveInstance, p: int) -> LPolynomial:
    """
    L-polynomial of the smooth model at a prime of good reduction.

    Counts over F_{p^s} for s = 1..g give the power sums p^s + 1 - N_s, Newton's
    identities give c_1..c_g and the functional equation c_{2g-i} = p^(g-i) c_i the rest.

    Raises:
        BadReduction: At bad primes
        FieldTooLarge: If p^g exceeds the field bound
        WeilBoundViolation: If the result fails the root-modulus check
    """
    g = genus(inst.family)
    power_sums = []
    for s in range(1, g + 1):
        f = build_field(p, s)
        total = count_points_brute(inst, f).total
        power_sums.append(p ** s + 1 - total)
        logger.debug("%s lam=%s over F_%d: %d points", inst.family.label, inst.lam, f.q, total)

    head = _newton_coefficients(power_sums)
    tail = [p ** (g - i) * head[i] for i in range(g - 1, -1, -1)]
    lpoly = LPolynomial(p=p, g=g, coeffs=tuple(head + tail))

    ok, deviation = weil_check(lpoly)
    if not ok:
        raise WeilBoundViolation(f"root modulus off by {deviation:.3g} for {inst.family.label} at p={p}")
    return lpoly


# Curve comparisons


def elliptic_trace(lam, p: int) -> int:
    """
    a_p of E: y^2 + xy + (lam/27) y = x^3 by counting points.

    Raises:
        BadReduction: If E has bad reduction at p
    """
    lam = Rational(lam)
    if p == 3 or int(lam.q) % p == 0:
        raise BadReduction(f"E is not defined mod {p}")
    f = build_field(p)
    c = f.from_rational(int(lam.p), 27 * int(lam.q))
    # Discriminant of E is c^3 (1 - lam)
    if c == 0 or f.from_rational(int(lam.q - lam.p), int(lam.q)) == 0:
        raise BadReduction(f"E has bad reduction at {p}")

    xs = f.elements()
    shifted = f.add(xs, c)
    disc = f.add(f.mul(shifted, shifted), f.mul(4, f.power(xs, 3)))
    legendre = np.where(disc == 0, 0, np.where(f.log_table[disc] % 2 == 0, 1, -1))
    return -int(legendre.sum())


def chi_minus3(p: int) -> int:
    """The quadratic character of Q(sqrt(-3)) at a prime p > 3."""
    return 1 if p % 3 == 1 else -1


def _sextic_sum(values: np.ndarray, f: FieldSpec, t: int) -> CycNumber:
    nonzero = values[values != 0]
    exps = (t * f.log_table[nonzero]) % 6
    return CycNumber.from_counts(6, np.bincount(exps, minlength=6))


def _reduce_s(s, p: int) -> int:
    s = Rational(s)
    if int(s.q) % p == 0:
        raise BadReduction(f"p={p} divides the denominator of s={s}")
    value = (int(s.p) * pow(int(s.q), -1, p)) % p
    if value in (0, 1):
        raise BadReduction(f"s={s} reduces to {value} mod {p}")
    return value


def check_366_trace_identity(s, p: int) -> Tuple[bool, Dict[str, Any]]:
    """
    For an order-6 character eta over F_p and f(x) = (x - 1/4)(x - s/4), g(x) = x^4 (1-x)^3 (1-sx):
    sum_x [eta^2 + eta^4](f(x^2)) - [eta^2 + eta^4](f(x)) = sum_x [eta + eta^5](g(x)).
    """
    if not isprime(p) or p <= 3 or p % 3 != 1:
        raise WrongCongruence(f"p={p} must be a prime congruent to 1 mod 3")
    f = build_field(p)
    s_e = _reduce_s(s, p)
    quarter = f.inv(f.from_int(4))

    xs = f.elements()

    def quadratic(values):
        return f.mul(f.sub(values, quarter), f.sub(values, f.mul(s_e, quarter)))

    f_x = quadratic(xs)
    f_x2 = quadratic(f.mul(xs, xs))
    g_x = f.mul(f.mul(f.power(xs, 4), f.power(f.sub(1, xs), 3)), f.sub(1, f.mul(s_e, xs)))

    lhs = (_sextic_sum(f_x2, f, 2) + _sextic_sum(f_x2, f, 4)) - (_sextic_sum(f_x, f, 2) + _sextic_sum(f_x, f, 4))
    rhs = _sextic_sum(g_x, f, 1) + _sextic_sum(g_x, f, 5)
    return lhs == rhs, {"s": str(s), "p": p, "lhs": lhs.to_dict(), "rhs": rhs.to_dict()}


def check_p1_coefficients(p: int, s=None) -> Tuple[bool, Dict[str, Any]]:
    """
    Compare the x^(p-1) coefficients of ((x^2 - 1/4)(x^2 - s/4))^((p-1)/3) and
    (x^4 (1-x)^3 (1-sx))^((p-1)/6) modulo p; with s=None the comparison is as
    polynomials in s.
    """
    if not isprime(p) or p <= 3 or p % 3 != 1:
        raise WrongCongruence(f"p={p} must be a prime congruent to 1 mod 3")
    x, s_sym = symbols("x s")
    quarter = pow(4, -1, p)

    if s is not None:
        s_e = _reduce_s(s, p)
        first = Poly((x ** 2 - quarter) * (x ** 2 - s_e * quarter), x, modulus=p) ** ((p - 1) // 3)
        second = Poly(x ** 4 * (1 - x) ** 3 * (1 - s_e * x), x, modulus=p) ** ((p - 1) // 6)
        a = int(first.coeff_monomial(x ** (p - 1))) % p
        b = int(second.coeff_monomial(x ** (p - 1))) % p
        return a == b, {"p": p, "s": str(s), "first": a, "second": b}

    first = Poly((x ** 2 - quarter) * (x ** 2 - s_sym * quarter), x, s_sym) ** ((p - 1) // 3)
    second = Poly(x ** 4 * (1 - x) ** 3 * (1 - s_sym * x), x, s_sym) ** ((p - 1) // 6)

    def in_s(poly: Poly) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for (ex, es), c in poly.terms():
            if ex == p - 1 and int(c) % p:
                out[es] = int(c) % p
        return out

    a, b = in_s(first), in_s(second)
    return a == b, {"p": p, "s": "symbolic", "first": a, "second": b}


def good_primes(inst: CurveInstance, primes) -> List[int]:
    """Primes from the list at which the instance has good reduction."""
    out = []
    for p in primes:
        if p <= 3 or not isprime(p):
            continue
        u, v = int(inst.lam.p), int(inst.lam.q)
        if u % p and v % p and (u - v) % p and inst.family.N % p:
            out.append(p)
    return out
