import logging
from math import gcd
from typing import Any, Dict, Tuple, Union

import numpy as np

from app.services.charsums import (
    CycNumber,
    MultCharacter,
    character,
    common_exponents,
    jacobi_sum,
    jacobi_table,
    power_basis,
    product_tensor,
)
from app.services.errors import ConsistencyError, FieldTooLarge, InvalidParameter

logger = logging.getLogger(__name__)

# Constants
GREENE_SUM_MAX_Q = 128


class CycRational:
    """
    numerator / denominator with numerator in Z[zeta_M] and a positive integer denominator.

    Values are kept with the content of the numerator cancelled against the
    denominator, so Greene values carry the smallest power of q they need.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: CycNumber, denominator: int = 1):
        if denominator <= 0:
            raise InvalidParameter(f"denominator must be positive, got {denominator}")
        content = 0
        for c in numerator.coeffs.flat:
            content = gcd(content, int(c))
        common = gcd(content, denominator) or denominator
        if common > 1:
            numerator = CycNumber(numerator.M, numerator.coeffs // common, numerator.p)
            denominator //= common
        self.numerator = numerator
        self.denominator = denominator

    @classmethod
    def zero(cls, M: int) -> "CycRational":
        return cls(CycNumber.zero(M), 1)

    @property
    def M(self) -> int:
        return self.numerator.M

    def _coerce(self, other) -> "CycRational":
        if isinstance(other, CycRational):
            return other
        if isinstance(other, CycNumber):
            return CycRational(other, 1)
        if isinstance(other, (int, np.integer)):
            return CycRational(CycNumber.from_int(int(other), self.M), 1)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        numerator = self.numerator * other.denominator + other.numerator * self.denominator
        return CycRational(numerator, self.denominator * other.denominator)

    __radd__ = __add__

    def __neg__(self):
        return CycRational(-self.numerator, self.denominator)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CycRational(self.numerator * other.numerator, self.denominator * other.denominator)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.numerator * other.denominator == other.numerator * self.denominator

    def lift(self, M2: int) -> "CycRational":
        return CycRational(self.numerator.lift(M2), self.denominator)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def embed(self) -> complex:
        return self.numerator.embed() / self.denominator

    def to_dict(self) -> Dict[str, Any]:
        return {"numerator": self.numerator.to_dict(), "denominator": self.denominator}

    def __repr__(self) -> str:
        return f"CycRational({self.numerator!r} / {self.denominator})"


def greene_binomial(A: MultCharacter, B: MultCharacter) -> CycRational:
    """
    Greene's binomial coefficient (A choose B) = B(-1)/q * J(A, conj B).

    Args:
        A: Upper character
        B: Lower character, on the same field

    Returns:
        Exact CycRational value
    """
    common_exponents(A, B)
    return CycRational(jacobi_sum(A, B.conj()) * B.at_minus_one(), A.field.q)


def greene_2f1_def(A: MultCharacter, B: MultCharacter, C: MultCharacter, lam: int) -> CycRational:
    """
    Greene's 2F1(A, B; C; lam) from the defining sum
    eps(lam) BC(-1)/q sum_x B(x) conj(B)C(1-x) conj(A)(1-lam x).
    """
    f, M, (a, b, c) = common_exponents(A, B, C)
    if lam == 0:
        return CycRational.zero(M)

    xs = f.elements()
    one_minus_x = f.sub(1, xs)
    one_minus_lx = f.sub(1, f.mul(lam, xs))
    alive = (xs != 0) & (one_minus_x != 0) & (one_minus_lx != 0)
    exps = (
        b * f.log_table[xs[alive]]
        + (c - b) * f.log_table[one_minus_x[alive]]
        - a * f.log_table[one_minus_lx[alive]]
    ) % M
    total = CycNumber.from_counts(M, np.bincount(exps, minlength=M))
    sign = MultCharacter(f, M, b + c).at_minus_one()
    return CycRational(total * sign, f.q)


def greene_2f1_sum(A: MultCharacter, B: MultCharacter, C: MultCharacter, lam: int) -> CycRational:
    """
    Greene's 2F1 through the character expansion
    q/(q-1) sum_chi (A chi choose chi)(B chi choose C chi) chi(lam),
    computed in Z[zeta_{q-1}] over the full Jacobi-sum table.

    Raises:
        FieldTooLarge: If q exceeds GREENE_SUM_MAX_Q
    """
    f, _, _ = common_exponents(A, B, C)
    n = f.order
    if f.q > GREENE_SUM_MAX_Q:
        raise FieldTooLarge(f"character expansion limited to q <= {GREENE_SUM_MAX_Q}, got {f.q}")
    if lam == 0:
        return CycRational.zero(n)

    _, _, (a, b, c) = common_exponents(A.lift(n), B.lift(n), C.lift(n))
    table = jacobi_table(f)
    tensor = product_tensor(n)
    basis = power_basis(n)
    t = np.arange(n)

    # (A chi choose chi)(B chi choose C chi) = chi(-1) C chi(-1) / q^2 * J(A chi, chi^-1) J(B chi, (C chi)^-1)
    first = table[(a + t) % n, (-t) % n]
    second = table[(b + t) % n, (-c - t) % n]
    products = np.einsum("ta,tb,abk->tk", first, second, tensor)
    twists = basis[(t * int(f.log_table[lam])) % n]
    terms = np.einsum("tk,tm,kml->tl", products, twists, tensor)
    total = terms.sum(axis=0)

    if np.any(total % n):
        raise ConsistencyError(f"character expansion not divisible by q-1 at lam={lam}")
    numerator = CycNumber(n, (total // n).astype(object)) * C.at_minus_one()
    return CycRational(numerator, f.q)


def _witness(lhs: Union[CycRational, CycNumber], rhs: Union[CycRational, CycNumber], **context) -> Dict[str, Any]:
    return {**context, "lhs": lhs.to_dict(), "rhs": rhs.to_dict()}


def verify_thm36(A: MultCharacter, B: MultCharacter, C: MultCharacter, lam: int) -> Tuple[bool, Dict[str, Any]]:
    """The defining sum and the character expansion agree."""
    lhs = greene_2f1_def(A, B, C, lam)
    rhs = greene_2f1_sum(A, B, C, lam)
    return lhs == rhs, _witness(lhs, rhs, lam=lam)


def verify_jacobi_swap(A: MultCharacter, B: MultCharacter, C: MultCharacter, lam: int) -> Tuple[bool, Dict[str, Any]]:
    """
    J(A, conj C) 2F1(A, B; C; lam) = J(B, conj C) 2F1(B, A; C; lam).

    Raises:
        InvalidParameter: Unless A, B, A conj(C), B conj(C) are all nontrivial
    """
    if any(chi.is_trivial() for chi in (A, B, A / C, B / C)):
        raise InvalidParameter("A, B, A/C and B/C must all be nontrivial")
    lhs = greene_2f1_def(A, B, C, lam) * jacobi_sum(A, C.conj())
    rhs = greene_2f1_def(B, A, C, lam) * jacobi_sum(B, C.conj())
    return lhs == rhs, _witness(lhs, rhs, lam=lam)


def verify_cor8(A: MultCharacter, B: MultCharacter, lam: int) -> Tuple[bool, Dict[str, Any]]:
    """2F1(A, B; eps; lam) is symmetric in A and B."""
    eps = character(A.field, A.M, 0)
    lhs = greene_2f1_def(A, B, eps, lam)
    rhs = greene_2f1_def(B, A, eps, lam)
    return lhs == rhs, _witness(lhs, rhs, lam=lam)


def verify_prop9(A: MultCharacter, B: MultCharacter, C: MultCharacter, lam: int) -> Tuple[bool, Dict[str, Any]]:
    """
    2F1(A, B; C; lam) = AB(-1) conj(C)(-lam) C conj(A) conj(B)(1-lam)
        J(B, conj(B) C) / J(A, conj(A) C) 2F1(conj A, conj B; conj C; lam),
    compared after multiplying through by J(A, conj(A) C).

    Raises:
        InvalidParameter: If A or B is trivial, A or B equals C, or lam is 0 or 1
    """
    f = A.field
    if A.is_trivial() or B.is_trivial():
        raise InvalidParameter("A and B must be nontrivial")
    if A == C or B == C:
        raise InvalidParameter("A and B must differ from C")
    if lam in (0, 1):
        raise InvalidParameter(f"lam must avoid 0 and 1, got {lam}")

    factor = (
        C.conj()(int(f.neg(lam)))
        * (C / A / B)(int(f.sub(1, lam)))
        * jacobi_sum(B, C / B)
    ) * (A * B).at_minus_one()
    lhs = greene_2f1_def(A, B, C, lam) * jacobi_sum(A, C / A)
    rhs = greene_2f1_def(A.conj(), B.conj(), C.conj(), lam) * factor
    return lhs == rhs, _witness(lhs, rhs, lam=lam)


def verify_order12_chain(eta: MultCharacter, lam: int) -> Tuple[bool, Dict[str, Any]]:
    """
    For eta of order 12 and lam not in {0, 1}:
    2F1(eta, eta^3; eta^-2; lam) = eta^2(lam) 2F1(eta^5, eta^3; eta^2; lam)
        = eta(-27 (1-lam)^6) 2F1(eta^-5, eta^-3; eta^-2; lam)
        = eta(-27 lam^2 (1-lam)^6) 2F1(eta^-1, eta^-3; eta^2; lam).
    """
    f = eta.field
    if eta.order != 12:
        raise InvalidParameter(f"eta must have order 12, got {eta.order}")
    if lam in (0, 1):
        raise InvalidParameter(f"lam must avoid 0 and 1, got {lam}")

    one_minus_sixth = f.power(f.sub(1, lam), 6)
    minus_27 = f.from_int(-27)
    second_arg = int(f.mul(minus_27, one_minus_sixth))
    third_arg = int(f.mul(second_arg, f.power(lam, 2)))

    values = [
        greene_2f1_def(eta, eta ** 3, eta ** -2, lam),
        greene_2f1_def(eta ** 5, eta ** 3, eta ** 2, lam) * (eta ** 2)(lam),
        greene_2f1_def(eta ** -5, eta ** -3, eta ** -2, lam) * eta(second_arg),
        greene_2f1_def(eta ** -1, eta ** -3, eta ** 2, lam) * eta(third_arg),
    ]
    holds = all(values[0] == v for v in values[1:])
    return holds, {"lam": lam, "values": [v.to_dict() for v in values]}


def verify_order6_example(eta: MultCharacter, lam: int) -> Tuple[bool, Dict[str, Any]]:
    """2F1(eta, eta^2; conj eta; lam) = eta(lam) eta^2((1-lam)/4) 2F1(conj eta, conj eta^2; eta; lam)."""
    f = eta.field
    if eta.order != 6:
        raise InvalidParameter(f"eta must have order 6, got {eta.order}")
    if lam in (0, 1):
        raise InvalidParameter(f"lam must avoid 0 and 1, got {lam}")
    quarter = int(f.mul(f.sub(1, lam), f.inv(f.from_int(4))))
    lhs = greene_2f1_def(eta, eta ** 2, eta.conj(), lam)
    rhs = greene_2f1_def(eta.conj(), eta ** -2, eta, lam) * eta(lam) * (eta ** 2)(quarter)
    return lhs == rhs, _witness(lhs, rhs, lam=lam)


def admissible_triples(f, M: int):
    """All (A, B, C) of order dividing M, as characters xi_M^a."""
    chars = [character(f, M, t) for t in range(M)]
    for A in chars:
        for B in chars:
            for C in chars:
                yield A, B, C
