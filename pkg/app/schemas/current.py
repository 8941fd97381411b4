from pydantic import BaseModel, Field, field_validator
from typing import List, Optional, Union

from app.core.linalg import parse_rational


def _check_rational(value: Union[str, int]) -> str:
    if isinstance(value, float):
        raise ValueError("exact quantities must be integers or 'p/q' strings")
    try:
        parse_rational(value)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"{value!r} is not a rational number")
    return str(value)


def _check_box(v: List[List[Union[str, int]]]) -> List[List[str]]:
    box = []
    for interval in v:
        if len(interval) != 2:
            raise ValueError("every box entry must be a [lo, hi] pair")
        lo, hi = (_check_rational(x) for x in interval)
        if parse_rational(lo) > parse_rational(hi):
            raise ValueError(f"empty interval [{lo}, {hi}]")
        box.append([lo, hi])
    return box


class GridSpec(BaseModel):
    box: List[List[Union[str, int]]] = Field(..., min_length=1, description="[lo, hi] per coordinate")
    h: Union[str, int] = Field(..., description="base spacing as 'p/q'")

    @field_validator("box")
    @classmethod
    def validate_box(cls, v):
        return _check_box(v)

    @field_validator("h")
    @classmethod
    def validate_h(cls, v):
        v = _check_rational(v)
        if parse_rational(v) <= 0:
            raise ValueError("h must be positive")
        return v


class CoefficientEntry(BaseModel):
    point: List[int] = Field(..., description="0-based grid multi-index")
    basis: int = Field(..., ge=0, description="0-based index into the E0^m basis")
    value: Union[str, int, float]

    @field_validator("point")
    @classmethod
    def validate_point(cls, v: List[int]) -> List[int]:
        if any(i < 0 for i in v):
            raise ValueError("grid indices are nonnegative")
        return v

    @field_validator("value")
    @classmethod
    def validate_value(cls, v):
        if isinstance(v, str):
            try:
                parse_rational(v)
            except (ValueError, ZeroDivisionError):
                try:
                    float(v)
                except ValueError:
                    raise ValueError(f"{v!r} is not a number")
        return v


class CurrentFile(BaseModel):
    algebra: str = Field(..., description="catalog name or algebra file path")
    grid: GridSpec
    dimension: int = Field(..., ge=0)
    coefficients: List[CoefficientEntry] = []


class ProbeParams(BaseModel):
    algebra: str = "heisenberg(1)"
    dimension: int = Field(1, ge=1)
    box: List[List[Union[str, int]]] = Field(..., min_length=1, description="the compact set K")
    h: Union[str, int] = Field("1/2", description="coarsest spacing")
    nu: Union[str, int] = Field("1", description="normal-mass bound")
    epsilon: Union[str, int] = Field("1/5", description="net radius in the flat norm")
    samples: int = Field(50, ge=1)
    levels: int = Field(2, ge=1)
    seed: int = 0
    support_size: Optional[int] = Field(None, ge=1)

    @field_validator("box")
    @classmethod
    def validate_box(cls, v):
        return _check_box(v)

    @field_validator("h", "nu", "epsilon")
    @classmethod
    def validate_rationals(cls, v):
        v = _check_rational(v)
        if parse_rational(v) < 0:
            raise ValueError("must be nonnegative")
        return v
