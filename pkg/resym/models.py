"""
models.py - Serializable records for certificates, cache rows and corpus lines.

Algebraic numbers are stored as decimal-string integer coordinates with an
explicit basis tag, never as floats.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel

from resym.biquad import BiquadInt
from resym.quadfield import QuadInt

# --- Algebraic numbers ---


class QuadIntRecord(BaseModel):
    basis: Literal["(1, sqrt(d))/2"] = "(1, sqrt(d))/2"
    d: str
    coords: Tuple[str, str]      # numerators over 2


class BiquadRecord(BaseModel):
    basis: Literal["(1, sqrt(m), sqrt(beta), sqrt(m)sqrt(beta))/4"] = \
        "(1, sqrt(m), sqrt(beta), sqrt(m)sqrt(beta))/4"
    m: str
    beta: QuadIntRecord
    coords: Tuple[str, str, str, str]   # numerators over 4


def quad_record(u: QuadInt) -> QuadIntRecord:
    return QuadIntRecord(d=str(u.d), coords=(str(u.A), str(u.B)))


def quad_from_record(r: QuadIntRecord) -> QuadInt:
    return QuadInt(int(r.coords[0]), int(r.coords[1]), int(r.d))


def biquad_record(x: BiquadInt) -> BiquadRecord:
    return BiquadRecord(m=str(x.m), beta=quad_record(x.beta),
                        coords=tuple(str(c) for c in x.coords4()))


def biquad_from_record(r: BiquadRecord) -> BiquadInt:
    return BiquadInt.from_coords4(tuple(int(c) for c in r.coords), quad_from_record(r.beta))


# --- Solutions and certificates ---


class RationalSolutionRecord(BaseModel):
    p1: str
    p2: str
    x: str
    y: str
    z: str
    m: str
    alpha: QuadIntRecord


class RelativeSolutionRecord(BaseModel):
    p1: str
    p3: str
    alpha: QuadIntRecord
    X: QuadIntRecord
    Y: QuadIntRecord
    Z: QuadIntRecord
    case_tag: Literal["Z_odd", "Y_odd"]
    unit: Literal["theta", "-theta", "eps*theta", "-eps*theta"]
    order: int
    height: int
    lambda_witness: BiquadRecord


class RedeiRecord(BaseModel):
    p1: str
    p2: str
    p3: str
    symbol: int
    s1: str
    residue: str
    solution: RationalSolutionRecord


class KCertificateRecord(BaseModel):
    p1: str
    p2: str
    p3: str
    case_tag: Literal["Z_odd", "Y_odd"]
    h: str
    redei: RationalSolutionRecord
    relsol: RelativeSolutionRecord
    thetas: List[BiquadRecord]           # theta_1..4 (Z_odd) or eta_1..4 (Y_odd)
    theta_primes: List[BiquadRecord]     # empty in case Z_odd


class SymbolRecord(BaseModel):
    p1: str
    p2: str
    p3: str
    p4: str
    symbol: int
    embedding_roots: Dict[str, str]
    characters: List[int]
    certificate: KCertificateRecord


# --- Cache rows and corpus lines ---


class CacheEntry(BaseModel):
    kind: Literal["legendre_eq", "relative_conic", "redei", "symbol4"]
    primes: List[str]
    avoid: List[str]
    payload: Dict[str, Any]
    timestamp: str
    budget: int


class CorpusLine(BaseModel):
    kind: Literal["triple", "quad"]
    primes: List[int]
    symbol: int
    certificate: Dict[str, Any]


# --- Plain report rows ---


@dataclass
class ValidationReport:
    primes: Tuple[int, ...]
    failed: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed


@dataclass
class VerifyOutcome:
    line_no: int
    kind: str
    primes: Tuple[int, ...]
    ok: bool
    detail: Optional[str] = None    # first mismatch
