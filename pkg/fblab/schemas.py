"""Pydantic schemas for JSON documents and reports."""
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel


class Status(str, Enum):
    """Outcome of a certified check."""

    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class ZeroTableSchema(BaseModel):
    """Schema for a cached zero table."""

    nu: float
    zeros: List[float]
    brackets: List[Tuple[float, float]]
    tolerance: float


class IdentityCheck(BaseModel):
    """One zero-sum identity with its tail enclosure."""

    name: str
    target: float
    partial_sum: float
    residual: float
    tail_lower: float
    tail_upper: float
    status: Status


class IdentityReport(BaseModel):
    """Schema for the Rayleigh/Calogero residual report."""

    nu: float
    n: int
    tail: int
    checks: List[IdentityCheck]

    @property
    def status(self) -> Status:
        """Worst status over the checks."""
        statuses = {check.status for check in self.checks}
        if Status.FAIL in statuses:
            return Status.FAIL
        if Status.INCONCLUSIVE in statuses:
            return Status.INCONCLUSIVE
        return Status.PASS


class CoefficientVectorSchema(BaseModel):
    """Schema for expansion coefficients against a system."""

    setting: str
    nu_or_ab: List[float]
    coeffs: List[float]


class UniformBoundReport(BaseModel):
    """Schema for empirical sup-norm growth of an essential system."""

    nu: float
    n_max: int
    sup_eigenfunction: List[float]
    sup_derivative: List[float]
    eigenfunction_exponent: float
    derivative_exponent: float
    eigenfunction_bound: float
    derivative_bound: float
    within_bound: bool


class RatioReport(BaseModel):
    """Schema for kernel/comparator ratio extremes."""

    kernel: str
    comparator: str
    parameters: Dict[str, float]
    t_values: List[float]
    grid: int
    resolved_points: int
    min_ratio: float
    max_ratio: float
    cap: Optional[float] = None
    config: Dict[str, float]

    @property
    def spread(self) -> float:
        return self.max_ratio / self.min_ratio


class SandwichReport(BaseModel):
    """Schema for the Trotter sandwich check."""

    nu: float
    c: float
    t_values: List[float]
    grid: int
    violations: int
    unresolved: int
    passed: bool


class CalderonReport(BaseModel):
    """Schema for the Sobolev/potential norm equivalence report."""

    nu: float
    p: float
    samples: int
    seed: int
    min_ratio: float
    max_ratio: float
    baseline_band: Optional[Tuple[float, float]] = None
    exact_band: Optional[Tuple[float, float]] = None
    within_band: bool


class DiagnosticEntry(BaseModel):
    """Truncated-norm growth of one derivative."""

    derivative: str
    measure: str
    epsilons: List[float]
    norms: List[float]
    growth_exponent: float
    divergent: bool


class DiagnosticReport(BaseModel):
    """Schema for the old-versus-new derivative diagnostic."""

    nu: float
    p: float
    function: str
    entries: List[DiagnosticEntry]


class CheckResult(BaseModel):
    """Schema for one verification check."""

    check_id: str
    anchor: str
    status: Status
    measured: Optional[float] = None
    detail: str = ""


class VerifyReport(BaseModel):
    """Schema for a verification run."""

    seed: int
    suites: List[str]
    results: List[CheckResult]

    @property
    def failed(self) -> List[CheckResult]:
        return [r for r in self.results if r.status is Status.FAIL]

    @property
    def inconclusive(self) -> List[CheckResult]:
        return [r for r in self.results if r.status is Status.INCONCLUSIVE]


class RieszProbeReport(BaseModel):
    """Schema for an empirical L^p probe of a Riesz transform."""

    setting: str
    variant: str
    nu: float
    p: float
    samples: int
    seed: int
    max_ratio: float
    bound: float
    modified_bound: Optional[float] = None
    asserted: bool
    within_bound: bool


class TableDocument(BaseModel):
    """Schema for tabular CLI output: evaluations, kernels, coefficients."""

    kind: str
    setting: str
    parameters: List[float]
    columns: List[str]
    rows: List[List[float]]
    metadata: Dict[str, float] = {}
