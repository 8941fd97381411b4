from pydantic import BaseModel, Field, field_validator
from typing import Dict, List

from app.core.linalg import parse_rational


class BracketEntry(BaseModel):
    i: int = Field(..., ge=1, description="1-based index of the first basis vector")
    j: int = Field(..., ge=1, description="1-based index of the second basis vector")
    coeffs: Dict[str, str] = Field(..., description="k -> c^k_ij as 'p/q'")

    @field_validator("coeffs", mode="before")
    @classmethod
    def validate_coeffs(cls, v):
        if not isinstance(v, dict):
            raise ValueError("coeffs must be an object mapping k to a rational")
        cleaned = {}
        for key, value in v.items():
            if not str(key).strip().isdigit() or int(key) < 1:
                raise ValueError(f"coefficient key {key!r} is not a positive index")
            if isinstance(value, float):
                raise ValueError("coefficients must be integers or 'p/q' strings")
            try:
                parse_rational(value)
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"coefficient {value!r} is not a rational")
            cleaned[str(int(key))] = str(value)
        return cleaned


class AlgebraFile(BaseModel):
    name: str = Field(..., min_length=1)
    layer_dims: List[int] = Field(..., min_length=1)
    brackets: List[BracketEntry] = []

    @field_validator("layer_dims")
    @classmethod
    def validate_layer_dims(cls, v: List[int]) -> List[int]:
        if any(d < 1 for d in v):
            raise ValueError("every layer dimension must be positive")
        return v
