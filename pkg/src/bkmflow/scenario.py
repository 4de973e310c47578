"""Scenario files: one JSON document describing a full run."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError
from .flows import FlowConfig, Method
from .operators import BkmSpec, Chart, ReductionSpec
from .poly import Poly
from .stackel import PhasePoint, eigen_to_companion

SCHEMA_VERSION = 1

CHECK_NAMES = (
    "level",
    "drift",
    "pde",
    "pde_constraint",
    "base",
    "solitonic",
    "separation",
    "consistency",
    "kb_closed_form",
    "asymptotics",
    "bkm2_q",
)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", ser_json_inf_nan="constants")


class BkmModel(_Strict):
    n: int = Field(ge=1)
    m: list[float] = Field(description="ascending coefficients of m(mu)")
    lam: Union[float, Literal["inf"]] = "inf"
    chart: Chart = Chart.FIRST_COMPANION

    @field_validator("m")
    @classmethod
    def _m_nonzero(cls, v):
        if not v or all(c == 0 for c in v):
            raise ValueError("m must be a nonzero polynomial")
        return v

    @model_validator(mode="after")
    def _m_degree(self):
        if Poly(self.m).degree > self.n:
            raise ValueError(f"deg m must not exceed n = {self.n}")
        return self

    @property
    def lam_value(self) -> float:
        return math.inf if self.lam == "inf" else float(self.lam)


class ReductionModel(_Strict):
    N: int = Field(ge=1)
    c: Optional[list[float]] = Field(default=None, description="ascending coefficients of c(mu)")
    c_roots: Optional[list[float]] = Field(default=None, description="roots of the monic c(mu)")

    @model_validator(mode="after")
    def _one_form(self):
        if (self.c is None) == (self.c_roots is None):
            raise ValueError("give exactly one of c or c_roots")
        return self

    def poly(self) -> Poly:
        return Poly(self.c) if self.c is not None else Poly.from_roots(self.c_roots)


class StartModel(_Strict):
    w: Optional[list[float]] = None
    p: Optional[list[float]] = None
    q: Optional[list[float]] = Field(default=None, description="eigenvalues of M at the start")
    p_q: Optional[list[float]] = Field(default=None, description="momenta conjugate to q")
    p_q_signs: Optional[list[float]] = Field(
        default=None, description="signs s with p_q = s*sqrt(-2c(q)/m(q)), placing the start on the level set"
    )

    @model_validator(mode="after")
    def _one_form(self):
        companion = self.w is not None or self.p is not None
        eigen = self.q is not None
        if companion == eigen:
            raise ValueError("give either (w, p) or eigenvalue data q")
        if companion and (self.w is None or self.p is None or len(self.w) != len(self.p)):
            raise ValueError("w and p must both be given with equal length")
        if eigen:
            if (self.p_q is None) == (self.p_q_signs is None):
                raise ValueError("with q give exactly one of p_q or p_q_signs")
            other = self.p_q if self.p_q is not None else self.p_q_signs
            if len(other) != len(self.q):
                raise ValueError("q and its momenta must have equal length")
        return self

    @property
    def dim(self) -> int:
        return len(self.w) if self.w is not None else len(self.q)


class AxisModel(_Strict):
    min: float
    max: float
    count: int = Field(ge=1)

    @model_validator(mode="after")
    def _order(self):
        if self.count > 1 and not self.max > self.min:
            raise ValueError("max must exceed min")
        return self

    def nodes(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


class GridModel(_Strict):
    t: AxisModel
    x: AxisModel


class FlowModel(_Strict):
    rel_tol: float = Field(default=1e-10, gt=0)
    abs_tol: float = Field(default=1e-12, gt=0)
    max_step: float = Field(default=math.inf, gt=0)
    blowup_norm: float = Field(default=1e8, gt=1)
    method: Method = Method.ADAPTIVE_RK78

    def config(self) -> FlowConfig:
        return FlowConfig(self.rel_tol, self.abs_tol, self.max_step, self.blowup_norm, self.method)


class Scenario(_Strict):
    schema_version: Literal[1] = SCHEMA_VERSION
    name: str = Field(min_length=1)
    description: str = ""
    notes: str = ""
    bkm: BkmModel
    reduction: ReductionModel
    start: StartModel
    grid: GridModel
    flow: FlowModel = FlowModel()
    checks: dict[str, float] = Field(default_factory=dict)
    outputs: list[Literal["csv", "frames"]] = Field(default_factory=lambda: ["csv"])
    seed: int = 0

    @field_validator("checks")
    @classmethod
    def _known_checks(cls, v):
        bad = sorted(set(v) - set(CHECK_NAMES))
        if bad:
            raise ValueError(f"unknown checks {bad}; allowed: {list(CHECK_NAMES)}")
        if any(not (t >= 0) for t in v.values()):
            raise ValueError("check thresholds must be non-negative")
        return v

    @model_validator(mode="after")
    def _consistency(self):
        n, N = self.bkm.n, self.reduction.N
        c = self.reduction.poly()
        if c.degree != 2 * N + n:
            raise ValueError(f"reduction.c must have degree 2N+n = {2 * N + n}, got {c.degree}")
        if abs(c.lead - 1.0) > 1e-14:
            raise ValueError("reduction.c must be monic")
        if self.start.dim != N:
            raise ValueError(f"start data must have dimension N = {N}")
        needs7 = {"pde", "pde_constraint", "solitonic"} & set(self.checks)
        if needs7 and (self.grid.t.count < 7 or self.grid.x.count < 7):
            raise ValueError("residual checks need at least 7 nodes per axis")
        if "base" in self.checks and self.grid.x.count < 7:
            raise ValueError("base-equation check needs at least 7 x-nodes")
        if "bkm2_q" in self.checks and (self.bkm.lam == "inf" or Poly(self.bkm.m)(self.bkm.lam_value) != 0.0):
            raise ValueError("bkm2_q needs a finite lambda that is a root of m")
        return self

    # -- domain objects -------------------------------------------------
    def bkm_spec(self) -> BkmSpec:
        return BkmSpec(self.bkm.n, Poly(self.bkm.m), self.bkm.lam_value, self.bkm.chart)

    def reduction_spec(self) -> ReductionSpec:
        return ReductionSpec(self.reduction.N, self.reduction.poly())

    def start_point(self) -> PhasePoint:
        s = self.start
        if s.w is not None:
            return PhasePoint(s.w, s.p)
        q = np.asarray(s.q, dtype=float)
        if s.p_q is not None:
            p_q = np.asarray(s.p_q, dtype=float)
        else:
            c, m = self.reduction.poly(), Poly(self.bkm.m)
            energy = -2.0 * c(q) / m(q)
            # roots of c sit exactly at zero; tiny negative rounding is clipped
            if np.any(energy < -1e-12 * (1.0 + np.abs(c(q)))):
                raise ConfigError("start.q lies where -c/m < 0; no real momentum puts it on the level set")
            p_q = np.asarray(s.p_q_signs, dtype=float) * np.sqrt(np.maximum(energy, 0.0))
        return eigen_to_companion(q, p_q)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def _format_errors(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "; ".join(lines)


def parse_scenario(data) -> Scenario:
    try:
        if isinstance(data, (str, bytes)):
            return Scenario.model_validate_json(data)
        return Scenario.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid scenario: {_format_errors(exc)}") from None


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from None
    try:
        json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario {path} is not valid JSON: {exc}") from None
    return parse_scenario(text)
