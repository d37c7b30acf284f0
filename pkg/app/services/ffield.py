import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Optional, Tuple

import numpy as np
from sympy import isprime, primefactors
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irred_p_rabin, gf_mul, gf_pow_mod, gf_rem, gf_strip

from app.services.errors import BadReduction, ConsistencyError, FieldTooLarge, NotPrime, ZeroElement

logger = logging.getLogger(__name__)

# Constants
MAX_FIELD_SIZE = 2 ** 24
MIN_CHARACTERISTIC = 5


def _to_digits(values, p: int, s: int) -> np.ndarray:
    """Split encoded elements v = sum c_t p^t into their coefficient vectors (last axis)."""
    values = np.asarray(values, dtype=np.int64)
    return (values[..., None] // (p ** np.arange(s, dtype=np.int64))) % p


def _from_digits(digits: np.ndarray, p: int) -> np.ndarray:
    digits = np.asarray(digits, dtype=np.int64)
    return (digits % p) @ (p ** np.arange(digits.shape[-1], dtype=np.int64))


def _to_gf_poly(v: int, p: int, s: int) -> list:
    """Encoded element to a sympy dense polynomial (highest degree first)."""
    return gf_strip([int(c) for c in reversed(_to_digits(v, p, s))])


def _from_gf_poly(poly: list, p: int) -> int:
    return sum(int(c) * p ** t for t, c in enumerate(reversed(poly)))


def _smallest_irreducible(p: int, s: int) -> Tuple[int, ...]:
    """
    Find the lexicographically smallest monic irreducible polynomial of degree s over F_p.

    Args:
        p: Field characteristic
        s: Extension degree

    Returns:
        Coefficients from the leading 1 down to the constant term
    """
    for r in range(p ** s):
        lower = [int(c) for c in reversed(_to_digits(r, p, s))]
        candidate = [1] + lower
        if gf_irred_p_rabin(candidate, p, ZZ):
            return tuple(candidate)
    raise ConsistencyError(f"no irreducible polynomial of degree {s} over F_{p}")


def _multiplication_matrix(c: int, p: int, s: int, modulus: Optional[Tuple[int, ...]]) -> np.ndarray:
    """Matrix acting on coefficient vectors as multiplication by the element c."""
    if s == 1:
        return np.array([[c % p]], dtype=np.int64)
    c_poly = _to_gf_poly(c, p, s)
    columns = []
    for t in range(s):
        monomial = [1] + [0] * t
        product = gf_rem(gf_mul(c_poly, monomial, p, ZZ), list(modulus), p, ZZ)
        columns.append(_to_digits(_from_gf_poly(product, p), p, s))
    return np.stack(columns, axis=1).astype(np.int64)


def _find_generator(p: int, s: int, modulus: Optional[Tuple[int, ...]]) -> int:
    """Smallest element (in the integer encoding) of exact multiplicative order q-1."""
    q = p ** s
    cofactors = [(q - 1) // r for r in primefactors(q - 1)]
    for g in range(2 if s == 1 else p, q):
        if s == 1:
            if all(pow(g, e, p) != 1 for e in cofactors):
                return g
            continue
        g_poly = _to_gf_poly(g, p, s)
        if all(gf_pow_mod(g_poly, e, list(modulus), p, ZZ) != [1] for e in cofactors):
            return g
    raise ConsistencyError(f"no generator found for F_{q}")


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """
    The finite field F_q, q = p^s, with its exponential and discrete-log tables.

    Elements are encoded as integers v = c_0 + c_1 p + ... + c_{s-1} p^{s-1} where
    c_t is the coefficient of x^t modulo the field's modulus. The prime subfield is
    {0, ..., p-1}. All arithmetic helpers accept numpy arrays of encoded elements.
    """
    p: int
    s: int
    q: int
    modulus: Optional[Tuple[int, ...]]
    generator: int
    exp_table: np.ndarray = field(repr=False)
    log_table: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        """Order of the multiplicative group."""
        return self.q - 1

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def digits(self, values) -> np.ndarray:
        return _to_digits(values, self.p, self.s)

    def from_digits(self, digits) -> np.ndarray:
        return _from_digits(digits, self.p)

    def add(self, a, b):
        return self.from_digits(self.digits(a) + self.digits(b))

    def sub(self, a, b):
        return self.from_digits(self.digits(a) - self.digits(b))

    def neg(self, a):
        return self.from_digits(-self.digits(a))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        logs = (self.log_table[a] + self.log_table[b]) % self.order
        return np.where((a == 0) | (b == 0), 0, self.exp_table[logs])

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroElement("0 has no inverse")
        return self.exp_table[(-self.log_table[a]) % self.order]

    def power(self, a, n: int):
        a = np.asarray(a, dtype=np.int64)
        if n == 0:
            return np.ones_like(a)
        if n < 0:
            a, n = self.inv(a), -n
        return np.where(a == 0, 0, self.exp_table[(self.log_table[a] * n) % self.order])

    def frobenius(self, a):
        """The map x -> x^p."""
        return self.power(a, self.p)

    def trace(self, a):
        """Absolute trace to the prime field, returned as residues in [0, p)."""
        total = np.zeros_like(np.asarray(a, dtype=np.int64))
        conjugate = np.asarray(a, dtype=np.int64)
        for _ in range(self.s):
            total = self.add(total, conjugate)
            conjugate = self.frobenius(conjugate)
        return total

    def from_int(self, n: int) -> int:
        return int(n) % self.p

    def from_rational(self, u: int, v: int = 1) -> int:
        """
        Reduce the rational u/v into the prime subfield.

        Raises:
            BadReduction: If p divides the denominator
        """
        if v % self.p == 0:
            raise BadReduction(f"denominator {v} is not invertible mod {self.p}")
        return (u * pow(v, -1, self.p)) % self.p

    def dlog(self, v: int) -> int:
        return dlog(v, self)


@lru_cache(maxsize=32)
def build_field(p: int, s: int = 1, max_size: int = MAX_FIELD_SIZE) -> FieldSpec:
    """
    Build F_{p^s} with a verified modulus, generator and log tables.

    Args:
        p: Prime characteristic, at least 5
        s: Extension degree
        max_size: Upper bound on q

    Returns:
        FieldSpec

    Raises:
        NotPrime: If p is not a prime above 3
        FieldTooLarge: If p^s exceeds max_size
    """
    if p < MIN_CHARACTERISTIC or not isprime(p):
        raise NotPrime(f"characteristic must be a prime > 3, got {p}")
    if s < 1:
        raise NotPrime(f"extension degree must be positive, got {s}")
    q = p ** s
    if q > max_size:
        raise FieldTooLarge(f"F_{p}^{s} has {q} elements, bound is {max_size}")

    modulus = _smallest_irreducible(p, s) if s > 1 else None
    generator = _find_generator(p, s, modulus)

    # Doubling: once g^0..g^{L-1} are known, g^L..g^{2L-1} is one matrix product away
    digits = np.zeros((q - 1, s), dtype=np.int64)
    digits[0, 0] = 1
    step_matrix = _multiplication_matrix(generator, p, s, modulus)
    filled = 1
    while filled < q - 1:
        g_filled = (step_matrix @ digits[filled - 1]) % p
        block = min(filled, q - 1 - filled)
        shift = _multiplication_matrix(int(_from_digits(g_filled, p)), p, s, modulus)
        digits[filled:filled + block] = (digits[:block] @ shift.T) % p
        filled += block

    exp_table = _from_digits(digits, p)
    log_table = np.full(q, -1, dtype=np.int64)
    log_table[exp_table] = np.arange(q - 1, dtype=np.int64)
    if np.any(log_table[1:] < 0):
        raise ConsistencyError(f"generator {generator} does not span F_{q}^x")

    exp_table.setflags(write=False)
    log_table.setflags(write=False)
    logger.debug("Built F_%d (modulus %s, generator %d)", q, modulus, generator)
    return FieldSpec(p=p, s=s, q=q, modulus=modulus, generator=generator,
                     exp_table=exp_table, log_table=log_table)


def dlog(v: int, f: FieldSpec) -> int:
    """Index t in [0, q-1) with generator^t = v."""
    if v == 0:
        raise ZeroElement("discrete log of 0 is undefined")
    return int(f.log_table[v])


def nth_power_counts(values, n: int, f: FieldSpec) -> np.ndarray:
    """
    Vectorised #{y in F_q : y^n = v} for an array of elements.

    Args:
        values: Encoded field elements (zero allowed)
        n: Positive exponent, need not divide q-1
        f: Field

    Returns:
        Array of counts
    """
    values = np.asarray(values, dtype=np.int64)
    d = gcd(n, f.order)
    residues = f.log_table[values] % d
    counts = np.where(residues == 0, d, 0)
    return np.where(values == 0, 1, counts)


def nth_power_count(v: int, n: int, f: FieldSpec) -> int:
    return int(nth_power_counts(np.array([v]), n, f)[0])
