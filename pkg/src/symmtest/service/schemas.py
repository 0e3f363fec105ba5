"""Request/response models for the symmetry-test service."""

from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, Field

StatName = Literal["jn", "kn", "sign", "ks"]
NullName = Literal["uniform", "normal", "logistic", "laplace", "cauchy"]
AltName = Literal["g1", "g2", "g3", "g4", "g5", "g6", "g7"]


class TestRequest(BaseModel):
    values: List[float] = Field(min_length=1)
    statistic: StatName
    b_resamples: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0)


class TestResponse(BaseModel):
    statistic: StatName
    value: float
    scaled_value: Optional[float]
    p_value: Optional[float]
    n: int
    B: int
    seed: Optional[int]


class EigenRequest(BaseModel):
    dist: NullName
    m: int = Field(default=1000, ge=10)
    k: int = Field(default=5, ge=1)
    truncation_A: Optional[float] = Field(default=None, gt=0)


class EigenResponse(BaseModel):
    dist: NullName
    m: int
    truncation_A: float
    nystrom_nu1: float
    closed_form_roots: Optional[List[float]]  # uniform only


class CurveRequest(BaseModel):
    dist: NullName
    m_coarse: int = Field(default=200, ge=10)
    m_fine: int = Field(default=1000, ge=10)
    grid_size: int = Field(default=256, ge=8)


class CurveResponse(BaseModel):
    dist: NullName
    m_coarse: int
    m_fine: int
    t: List[float]
    nu1: List[float]
    argmax_t: float
    sup_value: float


class SlopeRequest(BaseModel):
    dist: NullName
    alt: AltName
    beta: Optional[float] = None
    eigen_m: int = Field(default=1000, ge=10)
    curve_m_coarse: int = Field(default=200, ge=10)
    curve_m_fine: int = Field(default=1000, ge=10)
    curve_grid_size: int = Field(default=256, ge=8)


class SlopeCell(BaseModel):
    statistic: Literal["jn", "kn"]
    index: float
    b_coefficient: float
    tail_constant: float
    argmax_t: Optional[float] = None


class SlopeResponse(BaseModel):
    dist: NullName
    alt: AltName
    beta: Optional[float]
    nu1: float
    kappa0: float
    jn: SlopeCell
    kn: SlopeCell


class PowerRequest(BaseModel):
    null: NullName
    alt: AltName
    beta: Optional[float] = None
    thetas: List[float] = Field(min_length=1)
    n: int = Field(ge=1)
    N: int = Field(ge=100)
    level: float = Field(default=0.05, gt=0, lt=1)
    stats: List[StatName] = Field(default=["jn", "kn"], min_length=1)
    seed: int = Field(ge=0)
    orientation: Literal["standard", "as_printed"] = "standard"


class PowerRow(BaseModel):
    statistic: StatName
    theta: float
    power: float
    se: float


class PowerResponse(BaseModel):
    config: dict
    method: Literal["warp_speed", "classical"]
    rows: List[PowerRow]
    wall_time_s: float


class LimitNullRequest(BaseModel):
    dist: NullName
    k_eigen: int = Field(default=50, ge=1)
    draws: int = Field(ge=1, le=10_000_000)
    seed: int = Field(default=0, ge=0)
    nystrom_m: int = Field(default=500, ge=10)


class LimitNullResponse(BaseModel):
    dist: NullName
    k_eigen: int
    seed: int
    eigenvalues: List[float]
    values: List[float]
