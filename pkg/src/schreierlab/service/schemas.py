"""Pydantic request/response models for the compute service.

Exact values travel as strings: rationals in lowest terms ("3/2"),
thresholds possibly wrapped in sqrt(...), ordinals in the text syntax
("w^2+3").  Structured objects (vectors, points, certificates, measures)
use the wire-format dictionaries documented in schreierlab.wire.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field


class OrdinalCompareRequest(BaseModel):
    a: str
    b: str


class OrdinalCompareResponse(BaseModel):
    order: str  # LT | EQ | GT


class OrdinalClassifyRequest(BaseModel):
    ordinal: str


class OrdinalClassifyResponse(BaseModel):
    kind: str  # zero | successor | limit
    predecessor: Optional[str] = None


class OrdinalAssocRequest(BaseModel):
    ordinal: str
    n: int = Field(ge=1)


class OrdinalAssocResponse(BaseModel):
    result: str


class MemberRequest(BaseModel):
    alpha: str
    elements: List[int]


class MemberResponse(BaseModel):
    member: bool


class EnumRequest(BaseModel):
    alpha: str
    lo: int
    hi: int
    maximal: bool = False
    budget: Optional[int] = None  # window-width cap


class EnumResponse(BaseModel):
    sets: List[List[int]]


class ThresholdRequest(BaseModel):
    from_level: str
    to_level: str
    width: int


class ThresholdResponse(BaseModel):
    n: int
    verified_up_to: int


class RestrictFamilyRequest(BaseModel):
    family: Dict[str, Any]  # {"kind":"schreier","alpha":...} or {"kind":"explicit","members":[[...]]}
    m: List[int]
    window: Optional[Tuple[int, int]] = None


class RestrictFamilyResponse(BaseModel):
    members: List[List[int]]


class NormEvalRequest(BaseModel):
    model: Dict[str, Any]
    vec: Dict[str, Any]


class NormEvalResponse(BaseModel):
    norm: str


class A1SearchRequest(BaseModel):
    model: Dict[str, Any]
    lo: int
    hi: int
    coeff_grid: List[str] = ["1"]
    budget: Optional[int] = None


class A1SearchResponse(BaseModel):
    worst_ratio: Optional[str]
    witness: Optional[List[Dict[str, Any]]]
    evaluations: int
    partial: bool
    violation: bool


class KPointsRequest(BaseModel):
    model: Dict[str, Any]
    lo: int
    hi: int
    depth: Optional[int] = None


class KPointsResponse(BaseModel):
    points: List[Dict[str, Any]]


class Find0Request(BaseModel):
    model: Dict[str, Any]
    lo: int
    hi: int
    eps: str
    budget: Optional[int] = None  # verify budget


class Find0Response(BaseModel):
    cert: Dict[str, Any]
    verified: bool
    tau_hat: str
    delta: str
    eps0: str
    m: int
    m0: int
    proof_scale_m0: int


class VerifyCertRequest(BaseModel):
    cert: Dict[str, Any]
    budget: Optional[int] = None


class VerifyCertResponse(BaseModel):
    passed: bool
    condition: Optional[int] = None
    violating: Optional[List[int]] = None


class RestrictCertRequest(BaseModel):
    cert: Dict[str, Any]
    i0: List[int]


class RestrictCertResponse(BaseModel):
    cert: Dict[str, Any]


class TauRequest(BaseModel):
    model: Dict[str, Any]
    lo: int
    hi: int
    budget: Optional[int] = None


class TauResponse(BaseModel):
    lower: str
    witness: Optional[List[int]]
    window: Tuple[int, int]
    budget_spent: int
    partial: bool


class ChainSearchRequest(BaseModel):
    model: Dict[str, Any]
    alpha: str
    lo: int
    hi: int
    delta: str
    length: int
    eps_seq: Optional[List[str]] = None
    budget: Optional[int] = None


class ChainSearchResponse(BaseModel):
    chain: Dict[str, Any]
    t0: Dict[str, Any]
    points: List[Dict[str, Any]]
    tau_hat: str
    delta: str


class ChainVerifyRequest(BaseModel):
    chain: Dict[str, Any]
    budget: Optional[int] = None


class ChainVerifyResponse(BaseModel):
    passed: bool
    condition: Optional[str] = None
    detail: str = ""


class CheckL3Request(BaseModel):
    chain: Dict[str, Any]
    points: List[Dict[str, Any]]
    tau_hat: str
    delta: str
    j: List[int]


class CheckL3Response(BaseModel):
    lhs: str
    rhs: str
    holds: bool


class CheckL4Request(BaseModel):
    chain: Dict[str, Any]
    t0: Dict[str, Any]
    points: List[Dict[str, Any]]
    tau_hat: str
    delta: str


class CheckL4Response(BaseModel):
    holds: bool
    violations: List[Tuple[int, int]]


class MsepRunRequest(BaseModel):
    family: Dict[str, Any]
    alpha: str
    rho: str
    window: List[int]
    eps_seq: Optional[Dict[str, Any]] = None
    q_max: Optional[int] = None


class MsepRunResponse(BaseModel):
    ok: bool
    failing_step: Optional[str]
    selected: List[int]
    image: List[int]
    transcript: Optional[Dict[str, Any]]


class CheckNormingRequest(BaseModel):
    family: Dict[str, Any]
    pool: List[int]
    coeff_grid: List[str] = ["1"]
    rho: str
    max_support: int = 1


class CheckNormingResponse(BaseModel):
    passed: bool
    worst: str
    witness: Optional[Dict[str, Any]]
    grid_size: int
    note: str


class GoodRequest(BaseModel):
    family: Dict[str, Any]  # carries the model; first member is tested when measure omitted
    measure_index: int = 0
    prefix: List[int]
    n: int
    rho: str
    eps_seq: Optional[Dict[str, Any]] = None


class GoodResponse(BaseModel):
    good: bool


class ErrorBody(BaseModel):
    kind: str  # usage | resource
    message: str
