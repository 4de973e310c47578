"""HTTP service exposing presets, runs, verification and export."""

from __future__ import annotations

from typing import Any, Literal, Optional

import json

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, model_validator

from . import __version__, service
from .errors import BkmError, ConfigError


class PresetInfo(BaseModel):
    name: str
    description: str
    notes: str


class RunRequest(BaseModel):
    preset: Optional[str] = Field(None, examples=["kb-exact"])
    scenario: Optional[dict[str, Any]] = None
    out_dir: Optional[str] = None
    workers: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.preset is None) == (self.scenario is None):
            raise ValueError("give exactly one of preset or scenario")
        return self


class CheckOut(BaseModel):
    value: float
    threshold: float
    passed: bool
    report: dict[str, Any]


class RunResponse(BaseModel):
    scenario: str
    status: Literal["pass", "fail", "error"]
    exit_code: int
    error: Optional[str] = None
    c_new: Optional[list[float]] = None
    checks: dict[str, CheckOut]
    warnings: list[str]
    timings: dict[str, float]
    out_dir: Optional[str] = None


class DirRequest(BaseModel):
    directory: str


class ExportRequest(DirRequest):
    format: Literal["csv", "frames"] = "csv"


class ExportResponse(BaseModel):
    format: str
    files: list[str]


class FloatJSONResponse(JSONResponse):
    """Keeps inf/nan check values (a failed residual can be infinite) as JSON constants."""

    def render(self, content) -> bytes:
        return json.dumps(content, allow_nan=True, separators=(",", ":")).encode("utf-8")


app = FastAPI(title="bkmflow", version=__version__, default_response_class=FloatJSONResponse)


def _config_error(exc: ConfigError):
    return HTTPException(status_code=422, detail={"error": exc.describe(), "exit_code": exc.exit_code})


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.get("/presets", response_model=list[PresetInfo])
def presets_list():
    return service.list_presets()


@app.get("/presets/{name}")
def presets_show(name: str):
    try:
        return service.show_preset(name)
    except ConfigError as exc:
        raise HTTPException(status_code=404, detail={"error": exc.describe(), "exit_code": exc.exit_code})


@app.post("/run", response_model=RunResponse)
def run(req: RunRequest):
    try:
        return service.run(req.scenario if req.scenario is not None else req.preset, req.out_dir, req.workers)
    except ConfigError as exc:
        raise _config_error(exc)


@app.post("/verify", response_model=RunResponse)
def verify(req: DirRequest):
    try:
        return service.verify(req.directory)
    except ConfigError as exc:
        raise _config_error(exc)


@app.post("/export", response_model=ExportResponse)
def export(req: ExportRequest):
    try:
        return service.export_dir(req.directory, req.format)
    except ConfigError as exc:
        raise _config_error(exc)
    except BkmError as exc:  # pragma: no cover - stored solutions are already valid
        raise HTTPException(status_code=500, detail={"error": exc.describe(), "exit_code": exc.exit_code})
