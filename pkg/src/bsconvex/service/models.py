"""Pydantic request/response models for the HTTP service.

Responses mirror the payload dicts built in :mod:`bsconvex.reports`; large
integers travel as decimal strings and rationals as exact ``a/b`` text.
The wire field ``schema`` (model attribute ``schema_version``) versions
every top-level document.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..cayley import DEFAULT_CONFIRM_RADIUS, DEFAULT_MEMORY_BUDGET

DEFAULT_MAX_RADIUS = 24


class Schemed(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=1, alias="schema")


class PFractionModel(BaseModel):
    num: str
    exp: int = Field(ge=0)


class ElementModel(BaseModel):
    f: PFractionModel
    c: int


class GeneratorSpec(BaseModel):
    """An element given as a (num, exp, c) triple; num may be a decimal string."""

    num: int
    exp: int = Field(default=0, ge=0)
    c: int = 0

    @field_validator("num", mode="before")
    @classmethod
    def _coerce_num(cls, v):
        if isinstance(v, str):
            return int(v)
        return v


class GroupConfig(BaseModel):
    p: int
    generators: list[GeneratorSpec] = Field(min_length=1)
    memory_budget_bytes: int = Field(default=DEFAULT_MEMORY_BUDGET, gt=0)
    max_radius: int = Field(default=DEFAULT_MAX_RADIUS, ge=0)
    confirm_radius: int = Field(default=DEFAULT_CONFIRM_RADIUS, ge=1)
    workers: int = Field(default=1, ge=1)

    @field_validator("p")
    @classmethod
    def _check_p(cls, v):
        if abs(v) < 2:
            raise ValueError("|p| must be at least 2")
        return v


def std_generator_specs() -> list[dict]:
    return [{"num": 1, "exp": 0, "c": 0}, {"num": 0, "exp": 0, "c": 1}]


# --------------------------------------------------------------------------
# Requests


class ConstantsRequest(BaseModel):
    config: GroupConfig


class BallRequest(BaseModel):
    config: GroupConfig
    n: int = Field(ge=0)


class WordLengthRequest(BaseModel):
    config: GroupConfig
    element: GeneratorSpec
    max_r: Optional[int] = Field(default=None, ge=0)


class AcTableRequest(BaseModel):
    config: GroupConfig
    n_max: int = Field(ge=0)
    k: int = Field(default=2, ge=1)


class Lemma1Request(BaseModel):
    config: GroupConfig
    n: int = Field(ge=0)


class Lemma2Request(BaseModel):
    config: GroupConfig
    r: int = Field(ge=1)
    n: int = Field(ge=0)


class WitnessRequest(BaseModel):
    config: GroupConfig
    k: int = Field(ge=2)
    j: int = Field(default=1, ge=1)
    cert_k_max: int = Field(default=12, ge=1)


# --------------------------------------------------------------------------
# Responses


class HealthResponse(Schemed):
    status: Literal["ok"]


class ConstantsResponse(Schemed):
    p: int
    generators: list[ElementModel]
    c: int
    ell: int
    eps: int
    f_star_abs: str
    f_star_gen: ElementModel
    f_dstar: str
    kappa: str
    kappa_at: int
    M: str
    j_star: int


class BallResponse(Schemed):
    p: int
    n: int
    size: int
    rows: list[tuple[str, int, int, int]]


class WordLengthResponse(Schemed):
    p: int
    element: ElementModel
    max_r: int
    status: Literal["found", "not-found"]
    length: Optional[int]


class AcRowModel(BaseModel):
    n: int
    k: int
    N: int
    max_pair_distance: int
    witness_g: Optional[ElementModel]
    witness_h: Optional[ElementModel]


class AcTableResponse(Schemed):
    p: int
    k: int
    n_max: int
    truncated: bool
    completed_radius: Optional[int]
    rows: list[AcRowModel]


class Lemma1Violation(BaseModel):
    element: ElementModel
    kind: str
    value: str


class Lemma1Response(Schemed):
    p: int
    n: int
    M: str
    checked: int
    ok: bool
    violations: list[Lemma1Violation]
    max_ratio_dichotomy: float
    max_ratio_joint: float
    worst_dichotomy: Optional[ElementModel]
    worst_joint: Optional[ElementModel]


class Lemma2Violation(BaseModel):
    pair: list[ElementModel]
    kind: str
    value: str


class Lemma2Response(Schemed):
    p: int
    r: int
    ball_radius: int
    M: str
    pairs_checked: int
    ok: bool
    violations: list[Lemma2Violation]
    max_ratio_abs: float
    max_ratio_denom: float
    worst_pair: Optional[list[ElementModel]]


class DivergenceRowModel(BaseModel):
    k: int
    reduction_ok: bool
    abs_branch_ok: bool
    denom_branch_ok: bool
    lower_bound: float


class DivergenceModel(BaseModel):
    j_star: int
    k_max: int
    monotone: bool
    all_ok: bool
    rows: list[DivergenceRowModel]


class LowerBoundModel(BaseModel):
    delta: str
    value: float


class WitnessResponse(Schemed):
    p: int
    k: int
    j: int
    radius: int
    T: ElementModel
    S: ElementModel
    ST: ElementModel
    alpha: ElementModel
    beta: ElementModel
    alpha_word: list[str]
    beta_word: list[str]
    identities_ok: bool
    st_abs: str
    st_denom: str
    d_alpha_beta: int
    partial: bool
    completed_radius: Optional[int]
    ell_alpha: Optional[int]
    ell_beta: Optional[int]
    L: Optional[int]
    p_prime: Optional[ElementModel]
    projection: Optional[ElementModel]
    projection_word: Optional[list[str]]
    d_p_st: Optional[int]
    lower_bound: Optional[LowerBoundModel]
    soundness_ok: Optional[bool]
    gap_abs: Optional[str]
    gap_denom: Optional[str]
    gap_threshold: Optional[str]
    dichotomy_holds: Optional[bool]
    certification: DivergenceModel
    ok: bool


class ErrorDetail(BaseModel):
    code: str
    message: str
    completed_radius: Optional[int] = None


class ErrorResponse(Schemed):
    error: ErrorDetail
