from pydantic import BaseModel
from typing import Any, Dict, Optional, List


class PeriodsResponse(BaseModel):
    """tau_n and tau_n' for n coprime to N, with the Gamma-ratio check when it applies"""

    family: str
    precision: int
    periods: Dict[str, Any]
    gamma_check: Optional[Dict[str, Any]] = None

    class Config:
        json_schema_extra = {
            "example": {
                "family": "[6;4,3,1]",
                "precision": 20,
                "gamma_check": {"passed": True, "residual": "1.2e-25"},
            }
        }


class RecognitionSchema(BaseModel):
    form: str
    degree: Optional[int] = None
    coefficients: List[str]
    precision: int


class QMResponse(BaseModel):
    """QM verdict with the finite-field and numeric evidence"""

    verdict: str
    family: str
    M: int
    jacobi_exponents: List[int]
    finite_field: List[Dict[str, Any]]
    beta_quotient: str
    recognition: RecognitionSchema

    class Config:
        json_schema_extra = {
            "example": {
                "verdict": "QM",
                "family": "[6;4,3,1]",
                "M": 6,
                "jacobi_exponents": [4, 5, 1],
                "finite_field": [{"verdict": "CharacterLike", "M": 6, "p": 7}],
                "beta_quotient": "0.62996052494743658238360530363911",
                "recognition": {"form": "PowerRational", "degree": 3, "coefficients": ["1/4"], "precision": 50},
            }
        }
