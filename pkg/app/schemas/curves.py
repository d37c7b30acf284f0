from pydantic import BaseModel
from typing import Dict, Optional, List


class CountSchema(BaseModel):
    """Point count of the smooth model, split into the affine sweep and the four resolved fibres"""

    q: int
    affine_sum: int
    n0: int
    n1: int
    n_inv_lambda: int
    n_inf: int
    total: int

    class Config:
        json_schema_extra = {
            "example": {"q": 7, "affine_sum": 9, "n0": 1, "n1": 1, "n_inv_lambda": 1, "n_inf": 1, "total": 10}
        }


class CountResponse(BaseModel):
    brute: Optional[CountSchema] = None
    hgf: Optional[CountSchema] = None
    agree: Optional[bool] = None


class LPolynomialSchema(BaseModel):
    """L-polynomial over F_p, coefficients from T^0 up to T^(2g)"""

    p: int
    g: int
    coeffs: List[int]

    class Config:
        json_schema_extra = {
            "example": {"p": 7, "g": 4, "coeffs": [1, 0, 0, 0, -2, 0, 0, 0, 2401]}
        }


class InvariantsSchema(BaseModel):
    """Genus, eigenspace dimensions and hypergeometric data of a family"""

    family: str
    genus: int
    dim_Vn: Dict[str, int]
    hypergeometric_parameters: List[str]
    schwarz_angles: List[str]
    triangle_denominators: List[Optional[int]]

    class Config:
        json_schema_extra = {
            "example": {
                "family": "[6;4,3,1]",
                "genus": 3,
                "dim_Vn": {"1": 1, "5": 1},
                "hypergeometric_parameters": ["1/6", "1/3", "5/6"],
                "schwarz_angles": ["1/6", "1/3", "1/6"],
                "triangle_denominators": [6, 3, 6],
            }
        }
