from fastapi import APIRouter, Path, Query, HTTPException

from app.schemas.charsums import FieldSummary
from app.services.errors import PreconditionError
from app.services.ffield import build_field

router = APIRouter(prefix="/fields", tags=["fields"])


@router.get("/{p}", response_model=FieldSummary)
def field_summary(
    p: int = Path(..., description="Prime characteristic, at least 5", example=7),
    s: int = Query(1, description="Extension degree", ge=1, example=2),
) -> FieldSummary:
    """
    Describe F_{p^s}.

    Returns the size, the irreducible modulus (leading coefficient first, only for s > 1)
    and the generator used for discrete logarithms.
    """
    try:
        f = build_field(p, s)
    except PreconditionError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return FieldSummary(
        p=f.p,
        s=f.s,
        q=f.q,
        modulus=list(f.modulus) if f.modulus else None,
        generator=f.generator,
    )
