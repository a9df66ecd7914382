"""
Core data structures for the non-malleable code toolkit.

This module defines the Pydantic models used across the system for parameter
validation, JSON (de)serialization and the report records emitted by the
certifiers and the CLI.
"""

from __future__ import annotations

from enum import IntEnum
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from tools.gf2 import Gf2Error, Gf2Matrix

Probability = Union[str, float]


def format_probability(value: Union[Fraction, float, int]) -> Probability:
    """Exact values as ``"num/den"``, sampled values as plain floats."""
    if isinstance(value, float):
        return value
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_probability(value: Probability) -> Union[Fraction, float]:
    if isinstance(value, float):
        return value
    return Fraction(value)


class AmdParams(BaseModel):
    """Parameters of the polynomial-tag AMD code over GF(2^m)."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=2, le=8, description="Field degree")
    u: int = Field(..., ge=1, description="Message blocks (field elements)")

    @field_validator("u")
    @classmethod
    def validate_u(cls, v: int) -> int:
        """The tag degree u + 2 must be odd in characteristic 2."""
        if (v + 2) % 2 == 0:
            raise ValueError(f"u + 2 must be odd, got u = {v}")
        return v

    @property
    def rho(self) -> Fraction:
        return Fraction(self.u + 1, 1 << self.m)

    @property
    def message_bits(self) -> int:
        return self.u * self.m

    @property
    def codeword_bits(self) -> int:
        return (self.u + 2) * self.m


class LecssParams(BaseModel):
    """Coset-style LECSS: E(msg, r) = msg * G_msg + r * G_rnd."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, le=64)
    k_msg: int = Field(..., ge=1)
    z: int = Field(..., ge=0)
    d: int = Field(..., ge=1, description="Certified distance")
    t: int = Field(..., ge=0, description="Certified secrecy")
    g_msg: Tuple[str, ...] = Field(..., description="Message generator rows as hex")
    g_rnd: Tuple[str, ...] = Field(default=(), description="Randomness generator rows as hex")
    certified: bool = False

    @model_validator(mode="after")
    def validate_generators(self) -> "LecssParams":
        if len(self.g_msg) != self.k_msg:
            raise ValueError(f"g_msg has {len(self.g_msg)} rows, expected k_msg = {self.k_msg}")
        if len(self.g_rnd) != self.z:
            raise ValueError(f"g_rnd has {len(self.g_rnd)} rows, expected z = {self.z}")
        try:
            stacked = self.msg_matrix.stack(self.rnd_matrix)
        except Gf2Error as exc:
            raise ValueError(str(exc)) from exc
        if not stacked.has_full_row_rank():
            raise ValueError("Stacked generator [G_msg; G_rnd] is not of full row rank")
        return self

    @property
    def msg_matrix(self) -> Gf2Matrix:
        return Gf2Matrix.from_hex_rows(self.g_msg, self.n)

    @property
    def rnd_matrix(self) -> Gf2Matrix:
        return Gf2Matrix.from_hex_rows(self.g_rnd, self.n)

    @property
    def generator(self) -> Gf2Matrix:
        return self.msg_matrix.stack(self.rnd_matrix)

    @property
    def meets_theorem_premise(self) -> bool:
        """d > 3n/8, required by the affine-tampering theorem."""
        return 8 * self.d > 3 * self.n

    @property
    def meets_bitwise_premise(self) -> bool:
        """d > n/4, required by the bitwise-tampering theorem."""
        return 4 * self.d > self.n

    @classmethod
    def from_matrices(
        cls, g_msg: Gf2Matrix, g_rnd: Gf2Matrix, d: int, t: int, certified: bool = False
    ) -> "LecssParams":
        return cls(
            n=g_msg.cols,
            k_msg=g_msg.n_rows,
            z=g_rnd.n_rows,
            d=d,
            t=t,
            g_msg=tuple(g_msg.to_hex_rows()),
            g_rnd=tuple(g_rnd.to_hex_rows()),
            certified=certified,
        )


class SchemeParams(BaseModel):
    """The composed scheme Enc(s) = E(A(s)): an AMD section feeding a LECSS section."""

    model_config = ConfigDict(frozen=True)

    name: Optional[str] = None
    amd: AmdParams
    lecss: LecssParams

    @model_validator(mode="after")
    def validate_interface(self) -> "SchemeParams":
        if self.amd.codeword_bits != self.lecss.k_msg:
            raise ValueError(
                f"AMD codeword length (u+2)*m = {self.amd.codeword_bits} "
                f"does not match LECSS k_msg = {self.lecss.k_msg}"
            )
        return self

    @property
    def k(self) -> int:
        return self.amd.message_bits

    @property
    def n(self) -> int:
        return self.lecss.n

    @property
    def randomness_size(self) -> int:
        return (1 << self.amd.m) << self.lecss.z


class ProofCase(IntEnum):
    """The four parameter regimes of the affine-tampering security argument."""

    CASE1 = 1  # p <= t - r
    CASE2 = 2  # p >= n - t
    CASE3 = 3  # t - r < p <= (n - r) / 2
    CASE4 = 4  # (n - r) / 2 < p <= n - t


class Partition(BaseModel):
    """Positions split by action kind: constants, identity/flip, affine."""

    b1: List[int] = Field(default_factory=list)
    b2: List[int] = Field(default_factory=list)
    b3: List[int] = Field(default_factory=list)

    @computed_field
    @property
    def p(self) -> int:
        return len(self.b1)

    @computed_field
    @property
    def q(self) -> int:
        return len(self.b2)

    @computed_field
    @property
    def r(self) -> int:
        return len(self.b3)

    @property
    def n(self) -> int:
        return self.p + self.q + self.r


class Violation(BaseModel):
    check: Literal["support_size", "rank", "position"]
    detail: str
    positions: List[int] = Field(default_factory=list)


class ValidationReport(BaseModel):
    """Result of checking a tampering function against its family bound."""

    ok: bool
    ell: int
    rank: int
    required_rank: int
    violations: List[Violation] = Field(default_factory=list)
    beyond_proof_regime: bool = Field(False, description="r > t: outside the analysed regime")


class CertificateResult(BaseModel):
    """Outcome of one exhaustive or sampled property check."""

    name: str
    passed: bool
    exhaustive: bool
    checked: int
    counterexample: Optional[Dict[str, str]] = None


class LecssCertificate(BaseModel):
    n: int
    k_msg: int
    z: int
    d: int
    t: int
    min_distance: int
    dual_distance: int
    correctness: CertificateResult
    distance: CertificateResult
    linearity: CertificateResult
    secrecy: CertificateResult
    secrecy_agrees_with_dual_distance: bool
    meets_theorem_premise: bool

    @computed_field
    @property
    def passed(self) -> bool:
        return (
            self.min_distance >= self.d
            and self.dual_distance > self.t
            and self.correctness.passed
            and self.distance.passed
            and self.linearity.passed
            and self.secrecy.passed
            and self.secrecy_agrees_with_dual_distance
        )


class AmdAuditReport(BaseModel):
    m: int
    u: int
    rho: str
    max_acceptance: str
    worst_message: Optional[str] = None
    worst_delta: Optional[str] = None
    enumerated: int
    passed: bool


class SearchResult(BaseModel):
    found: bool
    n: int
    k_msg: int
    d_target: int
    t_target: int
    trials: int
    seed: int
    trial: Optional[int] = None
    params: Optional[LecssParams] = None


class BoundPremises(BaseModel):
    d_gt_3n_over_8: bool
    t_even: bool
    t_gt_6: bool
    r_le_t: Optional[bool] = None

    @property
    def met(self) -> bool:
        return self.d_gt_3n_over_8 and self.t_even and self.t_gt_6 and self.r_le_t is not False


class BoundComponents(BaseModel):
    rho: float
    rho_exact: Optional[str] = None
    two_pow_neg_t: float
    tail_term: Optional[float] = Field(None, description="None when the bound is unbounded")
    case_tail: Optional[float] = None


class BoundReport(BaseModel):
    """The epsilon bound max(rho, 2^-t + tail) with its premise flags."""

    case: Optional[int] = None
    epsilon: float
    raw_epsilon: Optional[float] = Field(None, description="Unclamped value, None when unbounded")
    vacuous: bool
    premises: BoundPremises
    components: BoundComponents
    notes: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def premises_met(self) -> bool:
        return self.premises.met


class CertificationReport(BaseModel):
    """Non-malleability verdict for one tampering function on one scheme."""

    model_config = ConfigDict(populate_by_name=True)

    case: int
    p: int
    q: int
    r: int
    mode: Literal["exact", "sampled"]
    samples: Optional[int] = None
    seed: Optional[int] = None
    epsilon: float
    epsilon_components: BoundComponents
    premises: BoundPremises
    bitwise_premise: Optional[bool] = Field(None, description="d > n/4, reported for affine-free functions")
    criterion: Literal["theorem", "substitute"]
    threshold: Probability
    escape_probability: Probability
    acceptance_probability: Probability
    acceptance_threshold: Probability = Field(..., description="max(rho, Pr[D(delta) != bot])")
    max_sd: Probability
    tolerance: float = 0.0
    per_s_sd: Optional[Dict[str, Probability]] = None
    df: Dict[str, Probability]
    message_independent: Optional[bool] = None
    fact_violations: List[List[int]] = Field(default_factory=list)
    passed: bool = Field(..., alias="pass")

    def to_json_dict(self) -> Dict:
        return self.model_dump(by_alias=True, mode="json")


__all__ = [
    "AmdAuditReport",
    "AmdParams",
    "BoundComponents",
    "BoundPremises",
    "BoundReport",
    "CertificateResult",
    "CertificationReport",
    "LecssCertificate",
    "LecssParams",
    "Partition",
    "Probability",
    "ProofCase",
    "SchemeParams",
    "SearchResult",
    "ValidationReport",
    "Violation",
    "format_probability",
    "parse_probability",
]
