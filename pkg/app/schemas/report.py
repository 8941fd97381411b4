from pydantic import BaseModel, Field
from typing import Dict, List, Optional


class AxiomFailure(BaseModel):
    axiom: str = Field(..., description="antisymmetry, jacobi, grading or generation")
    detail: str


class ValidationReport(BaseModel):
    algebra: str
    passed: bool
    failures: List[AxiomFailure] = []

    def failed_axioms(self) -> List[str]:
        return sorted({failure.axiom for failure in self.failures})


class CheckResult(BaseModel):
    name: str
    passed: Optional[bool] = Field(
        ..., description="None when the check is outside its hypothesis"
    )
    detail: str = ""
    offending: List[str] = []


class DegreeReport(BaseModel):
    degree: int
    dim: int
    weights: List[int] = Field(..., description="distinct E0 weights in this degree")
    basis_weights: List[int]
    form_weights: List[int] = Field(..., description="weights of all left-invariant forms of this degree")
    dc_orders: List[int] = Field(..., description="weight jumps of d_c leaving this degree")
    dc_derivative_orders: List[int] = []


class ComplexReport(BaseModel):
    algebra: str
    dim: int
    step: int
    Q: int
    delta: Optional[int]
    degrees: List[DegreeReport]
    projection_iterations: int
    checks: Dict[str, Optional[bool]] = {}
    operators: Optional[Dict[str, str]] = None


class VerificationReport(BaseModel):
    algebra: str
    passed: bool
    delta: Optional[int]
    Q: int
    checks: List[CheckResult]

    def as_flags(self) -> Dict[str, Optional[bool]]:
        return {check.name: check.passed for check in self.checks}

    def failed(self) -> List[CheckResult]:
        return [check for check in self.checks if check.passed is False]


class WitnessSummary(BaseModel):
    mass_S: str
    mass_R: str
    support_S: int
    support_R: int


class FlatNormReport(BaseModel):
    algebra: str
    dimension: int
    mode: str
    mass: str
    normal_mass: str
    flat_primal: Optional[str] = None
    flat_dual: Optional[str] = None
    gap: Optional[str] = None
    witness: Optional[WitnessSummary] = None


class ProbeLevelReport(BaseModel):
    level: int
    h: str
    net_size: int
    max_pairwise_flat: str
    runtime_ms: Optional[int] = None


class ProbeReport(BaseModel):
    algebra: str
    dimension: int
    mode: str
    nu: str
    epsilon: str
    samples: int
    seed: int
    levels: List[ProbeLevelReport]
