import logging
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from math import gcd, lcm
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from sympy import Matrix, Poly, Rational, cyclotomic_poly, isprime, symbols, totient

from app.services.errors import (
    ExtensionFieldExactUnsupported,
    FieldMismatch,
    InvalidParameter,
    NonIntegerTotal,
    NonUnitQuotient,
    WrongCongruence,
)
from app.services.ffield import FieldSpec, build_field

logger = logging.getLogger(__name__)

_x = symbols("x")


@lru_cache(maxsize=256)
def power_basis(n: int) -> np.ndarray:
    """
    Coefficients of zeta_n^e, 0 <= e < n, in the basis 1, zeta_n, ..., zeta_n^{phi(n)-1}.

    Row e of the returned (n, phi(n)) integer matrix is the canonical form of zeta_n^e
    after reduction modulo the n-th cyclotomic polynomial.
    """
    phi = int(totient(n))
    phi_coeffs = [int(c) for c in reversed(Poly(cyclotomic_poly(n, _x), _x).all_coeffs())]
    rows = np.zeros((n, phi), dtype=np.int64)
    current = np.zeros(phi, dtype=np.int64)
    current[0] = 1
    for e in range(n):
        rows[e] = current
        top = current[-1]
        current = np.concatenate(([0], current[:-1]))
        current = current - top * np.array(phi_coeffs[:phi], dtype=np.int64)
    rows.setflags(write=False)
    return rows


@lru_cache(maxsize=64)
def product_tensor(n: int) -> np.ndarray:
    """T[a, b] = canonical form of zeta_n^(a+b) for basis indices a, b."""
    basis = power_basis(n)
    phi = basis.shape[1]
    idx = np.add.outer(np.arange(phi), np.arange(phi)) % n
    return basis[idx]


@lru_cache(maxsize=256)
def _phi(n: int) -> int:
    return int(totient(n))


@lru_cache(maxsize=256)
def _basis_object(n: int) -> np.ndarray:
    return power_basis(n).astype(object)


def _convolve2d(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), dtype=object)
    for r, c in zip(*np.nonzero(a)):
        out[r:r + b.shape[0], c:c + b.shape[1]] += a[r, c] * b
    return out


def _reduce_grid(grid: np.ndarray, M: int, p_order: int) -> np.ndarray:
    """Fold a grid of exponent counts (zeta_M^row * zeta_p^col) into canonical coefficients."""
    rows = _basis_object(M)[np.arange(grid.shape[0]) % M]
    cols = _basis_object(p_order)[np.arange(grid.shape[1]) % p_order]
    return rows.T @ grid.astype(object) @ cols


class CycNumber:
    """
    Exact element of Z[zeta_M] or Z[zeta_M, zeta_p].

    The coefficient grid has shape (phi(M), p-1), or (phi(M), 1) when there is no
    zeta_p part; entry [a, b] multiplies zeta_M^a zeta_p^b. The form is canonical, so
    equality of values is equality of grids.
    """

    __slots__ = ("M", "p", "coeffs")

    def __init__(self, M: int, coeffs, p: Optional[int] = None):
        grid = np.array(coeffs, dtype=object)
        if grid.ndim == 1:
            grid = grid.reshape(-1, 1)
        expected = (_phi(M), (p - 1) if p else 1)
        if grid.shape != expected:
            raise InvalidParameter(f"coefficient grid {grid.shape} does not match ring shape {expected}")
        self.M = M
        self.p = p
        self.coeffs = grid

    # Constructors

    @classmethod
    def zero(cls, M: int, p: Optional[int] = None) -> "CycNumber":
        return cls.from_int(0, M, p)

    @classmethod
    def from_int(cls, n: int, M: int, p: Optional[int] = None) -> "CycNumber":
        grid = np.zeros((_phi(M), (p - 1) if p else 1), dtype=object)
        grid[0, 0] = int(n)
        return cls(M, grid, p)

    @classmethod
    def root_of_unity(cls, M: int, a: int, p: Optional[int] = None) -> "CycNumber":
        """zeta_M^a."""
        grid = np.zeros((M, 1), dtype=object)
        grid[a % M, 0] = 1
        return cls.from_counts(M, grid, p)

    @classmethod
    def from_counts(cls, M: int, counts, p: Optional[int] = None) -> "CycNumber":
        """
        Build sum counts[a] zeta_M^a (1-D) or sum counts[a, b] zeta_M^a zeta_p^b (2-D).

        Args:
            M: Root-of-unity order of the first factor
            counts: Exponent multiplicities, as produced by numpy.bincount
            p: Order of the second root of unity, if any
        """
        grid = np.asarray(counts)
        if grid.ndim == 1:
            grid = grid.reshape(-1, 1)
        p_order = p or 1
        coeffs = _reduce_grid(grid, M, p_order)
        if not p:
            coeffs = coeffs[:, :1]
        return cls(M, coeffs, p)

    # Ring structure

    def _coerce(self, other) -> Tuple["CycNumber", "CycNumber"]:
        if isinstance(other, (int, np.integer)):
            other = CycNumber.from_int(int(other), self.M, self.p)
        if not isinstance(other, CycNumber):
            return NotImplemented, NotImplemented
        left, right = self, other
        if left.p and right.p and left.p != right.p:
            raise FieldMismatch(f"cannot combine zeta_{left.p} and zeta_{right.p} parts")
        p = left.p or right.p
        M = lcm(left.M, right.M)
        return left.lift(M).with_p_part(p), right.lift(M).with_p_part(p)

    def __add__(self, other):
        left, right = self._coerce(other)
        if left is NotImplemented:
            return NotImplemented
        return CycNumber(left.M, left.coeffs + right.coeffs, left.p)

    __radd__ = __add__

    def __neg__(self):
        return CycNumber(self.M, -self.coeffs, self.p)

    def __sub__(self, other):
        left, right = self._coerce(other)
        if left is NotImplemented:
            return NotImplemented
        return CycNumber(left.M, left.coeffs - right.coeffs, left.p)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return CycNumber(self.M, self.coeffs * int(other), self.p)
        left, right = self._coerce(other)
        if left is NotImplemented:
            return NotImplemented
        grid = _convolve2d(left.coeffs, right.coeffs)
        coeffs = _reduce_grid(grid, left.M, left.p or 1)
        return CycNumber(left.M, coeffs[:, :left.coeffs.shape[1]], left.p)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CycNumber":
        if n < 0:
            raise InvalidParameter("negative powers need divide_exact")
        result = CycNumber.from_int(1, self.M, self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, np.integer, CycNumber)):
            left, right = self._coerce(other)
            return bool(np.array_equal(left.coeffs, right.coeffs))
        return NotImplemented

    def __repr__(self) -> str:
        return f"CycNumber(M={self.M}, p={self.p}, coeffs={self.coeffs.tolist()})"

    # Maps

    def lift(self, M2: int) -> "CycNumber":
        """Image under Z[zeta_M] -> Z[zeta_M2], zeta_M -> zeta_M2^(M2/M)."""
        if M2 == self.M:
            return self
        if M2 % self.M:
            raise InvalidParameter(f"{self.M} does not divide {M2}")
        step = M2 // self.M
        images = _basis_object(M2)[(step * np.arange(self.coeffs.shape[0])) % M2]
        return CycNumber(M2, images.T @ self.coeffs, self.p)

    def with_p_part(self, p: Optional[int]) -> "CycNumber":
        if p == self.p or p is None:
            return self
        grid = np.zeros((self.coeffs.shape[0], p - 1), dtype=object)
        grid[:, 0] = self.coeffs[:, 0]
        return CycNumber(self.M, grid, p)

    def galois(self, t: int, t_p: int = 1) -> "CycNumber":
        """Apply zeta_M -> zeta_M^t (and zeta_p -> zeta_p^t_p)."""
        if gcd(t, self.M) != 1:
            raise InvalidParameter(f"{t} is not a unit mod {self.M}")
        p_order = self.p or 1
        rows = _basis_object(self.M)[(t * np.arange(self.coeffs.shape[0])) % self.M]
        cols = _basis_object(p_order)[(t_p * np.arange(self.coeffs.shape[1])) % p_order]
        coeffs = rows.T @ self.coeffs @ cols
        return CycNumber(self.M, coeffs[:, :self.coeffs.shape[1]], self.p)

    def conj(self) -> "CycNumber":
        return self.galois(-1, -1)

    def embed(self) -> complex:
        """Complex value under zeta_M = exp(2 pi i / M), zeta_p = exp(2 pi i / p)."""
        grid = self.coeffs.astype(np.float64)
        zm = np.exp(2j * np.pi * np.arange(grid.shape[0]) / self.M)
        zp = np.exp(2j * np.pi * np.arange(grid.shape[1]) / (self.p or 1))
        return complex(zm @ grid @ zp)

    def is_zero(self) -> bool:
        return not np.any(self.coeffs != 0)

    def is_integer(self) -> bool:
        rest = self.coeffs.copy()
        rest[0, 0] = 0
        return not np.any(rest != 0)

    def to_int(self) -> int:
        """
        The value as a rational integer.

        Raises:
            NonIntegerTotal: If the value is not in Z
        """
        if not self.is_integer():
            raise NonIntegerTotal(f"{self!r} is not a rational integer")
        return int(self.coeffs[0, 0])

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"M": self.M, "coeffs": [int(c) for c in self.coeffs[:, 0]]}
        if self.p:
            data["p_part"] = [[int(c) for c in row] for row in self.coeffs]
        return data


@dataclass(frozen=True, eq=False)
class MultCharacter:
    """chi(x) = zeta_M^(t * dlog x mod M) on F_q^x, extended by chi(0) = 0."""
    field: FieldSpec = field(repr=False)
    M: int
    t: int

    def __post_init__(self):
        if self.M < 1 or self.field.order % self.M:
            raise WrongCongruence(f"M={self.M} does not divide q-1={self.field.order}")
        object.__setattr__(self, "t", self.t % self.M)

    def _key(self) -> Tuple[int, int, Rational]:
        return (self.field.p, self.field.s, Rational(self.t, self.M))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultCharacter):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def order(self) -> int:
        return self.M // gcd(self.M, self.t)

    def is_trivial(self) -> bool:
        return self.t == 0

    def lift(self, M2: int) -> "MultCharacter":
        if M2 % self.M:
            raise InvalidParameter(f"{self.M} does not divide {M2}")
        return MultCharacter(self.field, M2, self.t * (M2 // self.M))

    def conj(self) -> "MultCharacter":
        return MultCharacter(self.field, self.M, -self.t)

    def __pow__(self, n: int) -> "MultCharacter":
        return MultCharacter(self.field, self.M, self.t * n)

    def __mul__(self, other: "MultCharacter") -> "MultCharacter":
        f, M, (a, b) = common_exponents(self, other)
        return MultCharacter(f, M, a + b)

    def __truediv__(self, other: "MultCharacter") -> "MultCharacter":
        return self * other.conj()

    def exponents(self, values) -> np.ndarray:
        """Exponents of zeta_M at each element; -1 marks zero."""
        values = np.asarray(values, dtype=np.int64)
        exps = (self.t * self.field.log_table[values]) % self.M
        return np.where(values == 0, -1, exps)

    def at_minus_one(self) -> int:
        """chi(-1) as +1 or -1."""
        exponent = (self.t * (self.field.order // 2)) % self.M
        return 1 if exponent == 0 else -1

    def __call__(self, x: int) -> CycNumber:
        if x == 0:
            return CycNumber.zero(self.M)
        return CycNumber.root_of_unity(self.M, int(self.exponents([x])[0]))


def character(f: FieldSpec, M: int, t: int = 1) -> MultCharacter:
    """The power xi_M^t of the canonical order-M character (xi_M(generator) = zeta_M)."""
    return MultCharacter(f, M, t)


def common_exponents(*chars: MultCharacter) -> Tuple[FieldSpec, int, List[int]]:
    """Rewrite characters over one modulus: (field, M, exponents)."""
    f = chars[0].field
    for chi in chars[1:]:
        if (chi.field.p, chi.field.s) != (f.p, f.s):
            raise FieldMismatch(f"characters on F_{f.q} and F_{chi.field.q}")
    M = reduce(lcm, (chi.M for chi in chars))
    return f, M, [chi.t * (M // chi.M) for chi in chars]


def _nontrivial_range(f: FieldSpec) -> np.ndarray:
    """Elements x with x, 1 - x both nonzero."""
    xs = np.arange(f.q, dtype=np.int64)
    return xs[(xs != 0) & (xs != 1)]


def gauss_sum(chi: MultCharacter) -> CycNumber:
    """
    Exact g(chi) = sum_x chi(x) zeta_p^x in Z[zeta_M, zeta_p].

    Raises:
        ExtensionFieldExactUnsupported: Over F_{p^s} with s > 1
    """
    f = chi.field
    if f.s > 1:
        raise ExtensionFieldExactUnsupported("exact Gauss sums need a prime field, use gauss_sum_numeric")
    xs = np.arange(1, f.p, dtype=np.int64)
    cells = chi.exponents(xs) * f.p + xs
    counts = np.bincount(cells, minlength=chi.M * f.p).reshape(chi.M, f.p)
    return CycNumber.from_counts(chi.M, counts, f.p)


def gauss_sum_numeric(chi: MultCharacter) -> complex:
    """Complex g(chi) over any F_q, additive character through the absolute trace."""
    f = chi.field
    xs = np.arange(1, f.q, dtype=np.int64)
    angles = chi.exponents(xs) / chi.M + f.trace(xs) / f.p
    return complex(np.exp(2j * np.pi * angles).sum())


def jacobi_sum(chi1: MultCharacter, chi2: MultCharacter) -> CycNumber:
    """Exact J(chi1, chi2) = sum_x chi1(x) chi2(1 - x) in Z[zeta_M]."""
    f, M, (t1, t2) = common_exponents(chi1, chi2)
    xs = _nontrivial_range(f)
    exps = (t1 * f.log_table[xs] + t2 * f.log_table[f.sub(1, xs)]) % M
    return CycNumber.from_counts(M, np.bincount(exps, minlength=M))


@lru_cache(maxsize=8)
def _jacobi_table(p: int, s: int) -> np.ndarray:
    f = build_field(p, s)
    n = f.order
    xs = _nontrivial_range(f)
    log_x = f.log_table[xs]
    log_y = f.log_table[f.sub(1, xs)]
    counts = np.zeros((n, n, n), dtype=np.int64)
    for a in range(n):
        exps = (a * log_x[None, :] + np.arange(n)[:, None] * log_y[None, :]) % n
        cells = exps + n * np.arange(n)[:, None]
        counts[a] = np.bincount(cells.ravel(), minlength=n * n).reshape(n, n)
    table = counts @ power_basis(n)
    table.setflags(write=False)
    return table


def jacobi_table(f: FieldSpec) -> np.ndarray:
    """
    All Jacobi sums of the order-(q-1) character.

    Returns:
        Integer array T of shape (q-1, q-1, phi(q-1)) with T[a, b] the canonical
        coefficients of J(xi^a, xi^b) in Z[zeta_{q-1}]
    """
    return _jacobi_table(f.p, f.s)


def _root_power(chi: MultCharacter, x: int, n: int) -> CycNumber:
    """chi(x)^n for x != 0 and any integer n."""
    exponent = int(chi.exponents([x])[0])
    return CycNumber.root_of_unity(chi.M, exponent * n)


def hasse_davenport_check(p: int, M: int, ell: int, a: int) -> Tuple[bool, Dict[str, Any]]:
    """
    Check the Hasse-Davenport product relation for chi = xi_M over F_p.

    Compares g(chi^(l a)) g(chi^(M/2))^(l-1) with
    chi(l)^(l a - M/2) chi(2^(M/2))^(1-l) prod_j g(chi^(a + (M/l) j)).

    Returns:
        (holds, witness) where the witness carries both sides
    """
    if M % 2 or M < 2:
        raise InvalidParameter(f"M must be even, got {M}")
    if not isprime(p) or (p - 1) % M:
        raise WrongCongruence(f"M={M} does not divide p-1 for p={p}")
    if ell < 1 or M % ell:
        raise InvalidParameter(f"l={ell} does not divide M={M}")

    f = build_field(p)
    chi = character(f, M, 1)
    half = chi ** (M // 2)

    lhs = gauss_sum(chi ** (ell * a)) * (gauss_sum(half) ** (ell - 1))
    rhs = _root_power(chi, ell % p, ell * a - M // 2) * _root_power(chi, pow(2, M // 2, p), 1 - ell)
    for j in range(ell):
        rhs = rhs * gauss_sum(chi ** (a + (M // ell) * j))

    holds = lhs == rhs
    witness = {"p": p, "M": M, "l": ell, "a": a, "lhs": lhs.to_dict(), "rhs": rhs.to_dict()}
    return holds, witness


def divide_exact(numerator: CycNumber, denominator: CycNumber) -> Tuple[Optional[CycNumber], List[Rational]]:
    """
    Divide in Q(zeta_M) by verified multiplication.

    Roots of unity are tried first, then the linear system
    denominator * F = numerator is solved over Q.

    Returns:
        (F, coefficients): F is None when the quotient is not in Z[zeta_M]

    Raises:
        NonUnitQuotient: If the denominator is zero
    """
    if numerator.p or denominator.p:
        raise InvalidParameter("divide_exact works in Z[zeta_M] without a zeta_p part")
    M = lcm(numerator.M, denominator.M)
    num, den = numerator.lift(M), denominator.lift(M)
    if den.is_zero():
        raise NonUnitQuotient("division by zero in Z[zeta_M]")

    for e in range(M):
        candidate = CycNumber.root_of_unity(M, e)
        if candidate * den == num:
            return candidate, [Rational(int(c)) for c in candidate.coeffs[:, 0]]

    phi = den.coeffs.shape[0]
    columns = [(den * CycNumber.root_of_unity(M, a)).coeffs[:, 0] for a in range(phi)]
    system = Matrix(phi, phi, lambda r, c: int(columns[c][r]))
    solution = system.LUsolve(Matrix([int(c) for c in num.coeffs[:, 0]]))
    coeffs = [Rational(v) for v in solution]
    if all(c.q == 1 for c in coeffs):
        return CycNumber(M, [int(c) for c in coeffs]), coeffs
    return None, coeffs


def _rational_embed(M: int, coeffs: List[Rational]) -> complex:
    powers = np.exp(2j * np.pi * np.arange(len(coeffs)) / M)
    return complex(sum(float(c) * z for c, z in zip(coeffs, powers)))


@dataclass
class QuotientVerdict:
    """Outcome of the character-quotient test."""
    character_like: bool
    M: int
    p: int
    exponent: Optional[int] = None
    quotients: Dict[int, Any] = field(default_factory=dict)
    witness: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": "CharacterLike" if self.character_like else "NotCharacterLike",
            "M": self.M,
            "p": self.p,
            "exponent": self.exponent,
            "quotients": {str(a): v for a, v in sorted(self.quotients.items())},
            "witness": self.witness,
        }


def character_quotient_test(
    M: int, i: int, j: int, k: int, p: int, require_nondivisible: bool = True
) -> QuotientVerdict:
    """
    Decide whether F(eta^a) = J(eta^(aj), eta^(a(k-j))) / J(eta^(ai), eta^(a(k-i)))
    behaves like a character value: F(eta) is an M-th root of unity and
    F(eta^a) = F(eta)^a for every unit a mod M.

    Args:
        M: Even character order, at least 4
        i, j, k: Exponent data
        p: Prime with p = 1 mod M
        require_nondivisible: Enforce that M divides none of i, j, k, k-i, k-j

    Returns:
        QuotientVerdict; exponent e means F(eta) = zeta_M^e
    """
    if M < 4 or M % 2:
        raise InvalidParameter(f"M must be even and at least 4, got {M}")
    if not isprime(p) or (p - 1) % M:
        raise WrongCongruence(f"p={p} is not a prime congruent to 1 mod {M}")
    if require_nondivisible and any(v % M == 0 for v in (i, j, k, k - i, k - j)):
        raise InvalidParameter(f"M={M} divides one of i, j, k, k-i, k-j")

    f = build_field(p)
    eta = character(f, M, 1)
    verdict = QuotientVerdict(character_like=False, M=M, p=p)
    base_exponent: Optional[int] = None

    for a in (u for u in range(1, M) if gcd(u, M) == 1):
        num = jacobi_sum(eta ** (a * j), eta ** (a * (k - j)))
        den = jacobi_sum(eta ** (a * i), eta ** (a * (k - i)))
        quotient, coeffs = divide_exact(num, den)
        exponent = root_exponent(quotient, M)

        if exponent is None:
            value = quotient.embed() if quotient is not None else _rational_embed(M, coeffs)
            verdict.quotients[a] = {"coeffs": [str(c) for c in coeffs]}
            verdict.witness = {
                "a": a,
                "reason": "quotient is not an M-th root of unity",
                "coeffs": [str(c) for c in coeffs],
                "value": [value.real, value.imag],
            }
            logger.debug("Quotient at a=%d, p=%d is not a root of unity", a, p)
            return verdict

        verdict.quotients[a] = {"exponent": exponent}
        if base_exponent is None:
            base_exponent = exponent
        elif exponent != (a * base_exponent) % M:
            verdict.witness = {
                "a": a,
                "reason": "F(eta^a) differs from F(eta)^a",
                "expected_exponent": (a * base_exponent) % M,
                "exponent": exponent,
            }
            return verdict

    verdict.character_like = True
    verdict.exponent = base_exponent
    return verdict


def root_exponent(value: Optional[CycNumber], M: int) -> Optional[int]:
    """e with value = zeta_M^e, or None when value is not an M-th root of unity."""
    if value is None:
        return None
    for e in range(M):
        if value == CycNumber.root_of_unity(M, e):
            return e
    return None
