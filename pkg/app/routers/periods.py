from typing import Optional
import mpmath
from fastapi import APIRouter, Query, HTTPException

from app.schemas.periods import PeriodsResponse, QMResponse
from app.services.errors import ConsistencyError, PreconditionError
from app.services.legendre_curves import CurveFamily
from app.services.periods import DEFAULT_PRECISION, QM_CYCLE_ORDERS, gamma_ratio_check, period_set, qm_check

# Constants
MAX_API_PRECISION = 200

router = APIRouter(prefix="/periods", tags=["periods"])


@router.get("/tau", response_model=PeriodsResponse)
def tau(
    N: int = Query(..., example=6),
    i: int = Query(..., example=4),
    j: int = Query(..., example=3),
    k: int = Query(..., example=1),
    lam: str = Query(..., alias="lambda", description="Real parameter in (0, 1)", example="0.3"),
    precision: int = Query(DEFAULT_PRECISION, description="Decimal digits", ge=5, le=MAX_API_PRECISION),
):
    """
    Periods tau_n = int_0^1 omega_n and tau_n' = int_{1/lambda}^oo omega_n.

    For N in {3, 4, 6} the Gamma-ratio identity for tau_1' tau_{N-1}' / (tau_1 tau_{N-1})
    is checked as well.
    """
    try:
        fam = CurveFamily(N, i, j, k)
        result = period_set(fam, lam, precision)
        gamma_check = None
        if N in QM_CYCLE_ORDERS and not fam.divides_ij and N < i + j + k < 2 * N:
            ok, residual = gamma_ratio_check(fam, lam, precision)
            gamma_check = {"passed": ok, "residual": mpmath.nstr(residual, 5)}
    except PreconditionError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except ConsistencyError as e:
        raise HTTPException(status_code=500, detail=str(e))
    data = result.to_dict()
    return {"family": fam.label, "precision": precision, "periods": data["periods"], "gamma_check": gamma_check}


@router.get("/qm-check", response_model=QMResponse)
def qm(
    N: int = Query(..., description="Cover degree: 3, 4 or 6", example=6),
    i: int = Query(..., example=4),
    j: int = Query(..., example=3),
    k: int = Query(..., example=1),
    primes: Optional[str] = Query(None, description="Comma-separated primes for the character test", example="7,13,19"),
    precision: int = Query(DEFAULT_PRECISION, ge=10, le=MAX_API_PRECISION),
):
    """
    Decide whether the primitive part of the Jacobian has quaternionic multiplication.

    Returns the verdict (QM, NoQM or Inconclusive) with the per-prime character tests
    and the algebraic recognition of the Beta quotient.
    """
    try:
        prime_list = [int(v) for v in primes.split(",") if v.strip()] if primes else None
    except ValueError:
        raise HTTPException(status_code=400, detail=f"primes must be comma-separated integers, got {primes!r}")
    try:
        return qm_check(N, i, j, k, primes=prime_list, precision=precision).to_dict()
    except PreconditionError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except ConsistencyError as e:
        raise HTTPException(status_code=500, detail=str(e))
