from enum import Enum
from fastapi import APIRouter, Query, HTTPException

from app.schemas.curves import CountResponse, InvariantsSchema, LPolynomialSchema
from app.services.errors import ConsistencyError, PreconditionError
from app.services.ffield import build_field
from app.services.legendre_curves import (
    CurveFamily,
    CurveInstance,
    count_points_brute,
    count_points_hgf,
    dim_Vn,
    genus,
    hypergeometric_parameters,
    l_polynomial,
    parse_lambda,
    schwarz_angles,
)


class Method(str, Enum):
    """Point-counting method."""
    BRUTE = "brute"
    HGF = "hgf"
    BOTH = "both"


router = APIRouter(prefix="/curves", tags=["curves"])


@router.get("/count", response_model=CountResponse)
def count(
    N: int = Query(..., description="Cover degree", example=5),
    i: int = Query(..., example=1),
    j: int = Query(..., example=4),
    k: int = Query(..., example=1),
    lam: str = Query(..., alias="lambda", description="Rational parameter u/v", example="2/1"),
    p: int = Query(..., description="Prime characteristic", example=11),
    s: int = Query(1, description="Extension degree", ge=1),
    method: Method = Query(Method.BOTH),
):
    """
    Points of the smooth model of y^N = x^i (1-x)^j (1-lambda x)^k over F_{p^s}.

    Returns the brute-force and/or hypergeometric counts and whether they agree.
    """
    try:
        inst = CurveInstance(CurveFamily(N, i, j, k), parse_lambda(lam))
        f = build_field(p, s)
        brute = count_points_brute(inst, f).to_dict() if method != Method.HGF else None
        via_hgf = count_points_hgf(inst, f).to_dict() if method != Method.BRUTE else None
    except PreconditionError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except ConsistencyError as e:
        raise HTTPException(status_code=500, detail=str(e))
    agree = brute["total"] == via_hgf["total"] if method == Method.BOTH else None
    return {"brute": brute, "hgf": via_hgf, "agree": agree}


@router.get("/lpoly", response_model=LPolynomialSchema)
def lpoly(
    N: int = Query(..., example=5),
    i: int = Query(..., example=1),
    j: int = Query(..., example=4),
    k: int = Query(..., example=1),
    lam: str = Query(..., alias="lambda", description="Rational parameter u/v", example="2/1"),
    p: int = Query(..., description="Prime of good reduction", example=7),
):
    """L-polynomial of the smooth model, coefficients low degree first."""
    try:
        inst = CurveInstance(CurveFamily(N, i, j, k), parse_lambda(lam))
        return l_polynomial(inst, p).to_dict()
    except PreconditionError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except ConsistencyError as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.get("/invariants", response_model=InvariantsSchema)
def invariants(
    N: int = Query(..., example=6),
    i: int = Query(..., example=4),
    j: int = Query(..., example=3),
    k: int = Query(..., example=1),
):
    """Genus, dim V_n for n coprime to N and the Schwarz triangle of the family."""
    try:
        fam = CurveFamily(N, i, j, k)
    except PreconditionError as e:
        raise HTTPException(status_code=400, detail=str(e))
    params = hypergeometric_parameters(fam)
    angles, denominators = schwarz_angles(*params)
    return {
        "family": fam.label,
        "genus": genus(fam),
        "dim_Vn": {str(n): dim_Vn(fam, n) for n in fam.units()},
        "hypergeometric_parameters": [str(v) for v in params],
        "schwarz_angles": [str(v) for v in angles],
        "triangle_denominators": list(denominators),
    }
