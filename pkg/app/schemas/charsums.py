from pydantic import BaseModel
from typing import Optional, List


class ComplexValue(BaseModel):
    """Complex embedding as decimal strings"""
    re: str
    im: str


class CycValue(BaseModel):
    """Exact element of Z[zeta_M] (with an optional zeta_p grid for Gauss sums)"""

    M: int
    coeffs: List[int]
    p_part: Optional[List[List[int]]] = None

    class Config:
        json_schema_extra = {
            "example": {"M": 6, "coeffs": [-1, 0]}
        }


class CycRationalValue(BaseModel):
    """Element of Q(zeta_M) written as numerator / denominator"""
    numerator: CycValue
    denominator: int
    complex: Optional[ComplexValue] = None


class FieldSummary(BaseModel):
    """Finite field F_q with its modulus and multiplicative generator"""

    p: int
    s: int
    q: int
    # Leading coefficient first
    modulus: Optional[List[int]] = None
    generator: int

    class Config:
        json_schema_extra = {
            "example": {"p": 7, "s": 2, "q": 49, "modulus": [1, 0, 1], "generator": 9}
        }


class GaussSumResponse(BaseModel):
    value: Optional[CycValue] = None
    complex: ComplexValue


class JacobiQuotient(BaseModel):
    value: Optional[CycValue] = None
    coeffs: List[str]
    root_exponent: Optional[int] = None


class JacobiSumResponse(BaseModel):
    """J(xi^a, xi^b), with the quotient by J(xi^c, xi^d) when requested"""

    value: CycValue
    complex: ComplexValue
    quotient: Optional[JacobiQuotient] = None

    class Config:
        json_schema_extra = {
            "example": {
                "quotient": {"value": {"M": 10, "coeffs": [0, 0, 0, -1]}, "coeffs": ["0", "0", "0", "-1"], "root_exponent": 8},
            }
        }


class HgfResponse(BaseModel):
    """Greene 2F1 from the defining sum and/or the character expansion"""
    definition: Optional[CycRationalValue] = None
    expansion: Optional[CycRationalValue] = None
    agree: Optional[bool] = None
