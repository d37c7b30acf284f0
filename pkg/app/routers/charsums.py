from enum import Enum
from typing import Optional
from fastapi import APIRouter, Query, HTTPException

from app.schemas.charsums import GaussSumResponse, HgfResponse, JacobiSumResponse
from app.services.charsums import character, divide_exact, gauss_sum, gauss_sum_numeric, jacobi_sum, root_exponent
from app.services.errors import ConsistencyError, PreconditionError
from app.services.ffield import build_field
from app.services.gaussian_hgf import greene_2f1_def, greene_2f1_sum


class Via(str, Enum):
    """How Greene's 2F1 is evaluated."""
    DEF = "def"
    SUM = "sum"
    BOTH = "both"


router = APIRouter(prefix="/charsums", tags=["character sums"])


def _complex(z: complex) -> dict:
    return {"re": f"{z.real:.12g}", "im": f"{z.imag:.12g}"}


@router.get("/gauss", response_model=GaussSumResponse)
def gauss(
    p: int = Query(..., description="Prime characteristic", example=7),
    M: int = Query(..., description="Character order, dividing p^s - 1", example=6),
    a: int = Query(..., description="Exponent of the order-M character", example=1),
    s: int = Query(1, description="Extension degree; s > 1 gives only the complex value", ge=1),
):
    """
    Gauss sum g(xi_M^a).

    Returns the exact value in Z[zeta_M, zeta_p] over prime fields and its complex embedding.
    """
    try:
        chi = character(build_field(p, s), M, a)
        if s > 1:
            return {"complex": _complex(gauss_sum_numeric(chi))}
        value = gauss_sum(chi)
    except PreconditionError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"value": value.to_dict(), "complex": _complex(value.embed())}


@router.get("/jacobi", response_model=JacobiSumResponse)
def jacobi(
    p: int = Query(..., description="Prime characteristic", example=11),
    M: int = Query(..., description="Character order, dividing p - 1", example=10),
    a: int = Query(..., example=1),
    b: int = Query(..., example=6),
    c: Optional[int] = Query(None, description="Denominator J(xi^c, xi^d), first exponent", example=2),
    d: Optional[int] = Query(None, description="Denominator J(xi^c, xi^d), second exponent", example=5),
):
    """
    Jacobi sum J(xi^a, xi^b).

    With c and d the exact quotient by J(xi^c, xi^d) is returned too, with its
    root-of-unity exponent when it is one.
    """
    if (c is None) != (d is None):
        raise HTTPException(status_code=400, detail="c and d must be given together")
    try:
        eta = character(build_field(p), M, 1)
        value = jacobi_sum(eta ** a, eta ** b)
        result = {"value": value.to_dict(), "complex": _complex(value.embed())}
        if c is not None:
            quotient, coeffs = divide_exact(value, jacobi_sum(eta ** c, eta ** d))
            result["quotient"] = {
                "value": None if quotient is None else quotient.to_dict(),
                "coeffs": [str(v) for v in coeffs],
                "root_exponent": None if quotient is None else root_exponent(quotient, quotient.M),
            }
    except PreconditionError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return result


@router.get("/hgf", response_model=HgfResponse)
def hgf(
    p: int = Query(..., description="Prime characteristic", example=7),
    M: int = Query(..., description="Character order", example=6),
    A: int = Query(..., example=1),
    B: int = Query(..., example=2),
    C: int = Query(..., example=-1),
    lam: int = Query(..., alias="lambda", description="Argument as an integer mod p", example=3),
    via: Via = Query(Via.BOTH, description="def: defining sum, sum: character expansion, both: compare"),
):
    """Greene's 2F1(xi^A, xi^B; xi^C; lambda) over F_p."""
    try:
        f = build_field(p)
        chars = [character(f, M, t) for t in (A, B, C)]
        x = f.from_int(lam)
        definition = greene_2f1_def(*chars, x) if via != Via.SUM else None
        expansion = greene_2f1_sum(*chars, x) if via != Via.DEF else None
    except PreconditionError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except ConsistencyError as e:
        raise HTTPException(status_code=500, detail=str(e))

    def dump(value):
        return None if value is None else {**value.to_dict(), "complex": _complex(value.embed())}

    return {
        "definition": dump(definition),
        "expansion": dump(expansion),
        "agree": definition == expansion if via == Via.BOTH else None,
    }
