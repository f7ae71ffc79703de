"""HTTP service wrapping the verification core.

Stateless request/response: a scenario config (inline or by preset name) goes
in, a deterministic report plus CSV artifact payloads come out. The CLI is a
thin client of this app; one-shot runs mount it in-process.
"""

from __future__ import annotations

import math
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .config import (
    ConfigError,
    ScenarioConfig,
    load_preset,
    preset_names,
    scenario_from_dict,
)
from .checks import bochner_random_charts, commutator_random_charts, identity_suite
from .heat import circle_log_curvature_spread, heat_residuals, line_varadhan_defect
from .runner import VerificationReport, run_scenario


class PresetInfo(BaseModel):
    name: str
    description: str


class PresetListResponse(BaseModel):
    presets: list[PresetInfo]


class RunRequest(BaseModel):
    preset: Optional[str] = None
    config: Optional[dict] = None
    overrides: dict = Field(default_factory=dict)


class RunResponse(BaseModel):
    report: VerificationReport
    artifacts: dict[str, str] = Field(default_factory=dict)


class IdentitySuiteRequest(BaseModel):
    trials: int = Field(default=100, ge=1, le=2000)
    dims: list[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    seed: int = 0
    tolerance: float = 1e-8


class RandomSuiteResponse(BaseModel):
    name: str
    status: str
    max_residual: Optional[float]
    mean_residual: Optional[float]
    tolerance: Optional[float]
    details: dict


class CommutatorSuiteRequest(BaseModel):
    trials: int = Field(default=200, ge=1, le=2000)
    dims: list[int] = Field(default_factory=lambda: [1, 2, 3])
    seed: int = 0
    tolerance: float = 1e-7


class BochnerSuiteRequest(BaseModel):
    trials: int = Field(default=50, ge=1, le=2000)
    dims: list[int] = Field(default_factory=lambda: [1, 2, 3])
    seed: int = 0
    tolerance: float = 1e-6


class HeatDemoRequest(BaseModel):
    kind: str = Field(default="line", pattern="^(line|circle)$")
    times: list[float] = Field(default_factory=lambda: [0.1, 0.01, 0.001])
    points: list[float] = Field(default_factory=lambda: [0.25, 0.8, 1.5])
    circumference: float = 2.0 * math.pi


class HeatDemoResponse(BaseModel):
    kind: str
    rows: list[dict]
    line_defects: Optional[list[float]] = None
    circle_spread: Optional[float] = None


def _scenario_from_request(req: RunRequest) -> ScenarioConfig:
    if (req.preset is None) == (req.config is None):
        raise HTTPException(status_code=400, detail="provide exactly one of preset or config")
    try:
        if req.preset is not None:
            cfg = load_preset(req.preset)
        else:
            cfg = scenario_from_dict(req.config)
        if req.overrides:
            data = cfg.model_dump()
            _apply_overrides(data, req.overrides)
            cfg = scenario_from_dict(data)
        return cfg
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


_OVERRIDE_PATHS = {
    "seed": ("seed",),
    "tol": ("tolerances", "identities"),
    "kmax": ("checks", "excited_states_kmax"),
    "gram_kmax": ("checks", "gram_kmax"),
    "grid": ("checks", "spectrum", "grid"),
    "radius": ("checks", "spectrum", "radius"),
    "samples": ("samples",),
}


def _apply_overrides(data: dict, overrides: dict) -> None:
    for key, value in overrides.items():
        path = _OVERRIDE_PATHS.get(key)
        if path is None:
            raise HTTPException(status_code=400, detail=f"unknown override {key!r}")
        node = data
        for part in path[:-1]:
            node = node.setdefault(part, {})
        node[path[-1]] = value


def create_app() -> FastAPI:
    app = FastAPI(
        title="formladder",
        version=__version__,
        description="Ladder operators on weighted form spaces: scenario verification service",
    )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/presets", response_model=PresetListResponse)
    def presets() -> PresetListResponse:
        infos = []
        for name in preset_names():
            cfg = load_preset(name)
            infos.append(PresetInfo(name=name, description=cfg.description))
        return PresetListResponse(presets=infos)

    @app.get("/presets/{name}")
    def preset_config(name: str) -> dict:
        try:
            return load_preset(name).model_dump()
        except ConfigError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.post("/run", response_model=RunResponse)
    def run(req: RunRequest) -> RunResponse:
        cfg = _scenario_from_request(req)
        try:
            report, artifacts = run_scenario(cfg)
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return RunResponse(report=report, artifacts=artifacts)

    @app.post("/identities", response_model=RandomSuiteResponse)
    def identities(req: IdentitySuiteRequest) -> RandomSuiteResponse:
        res = identity_suite(req.trials, req.seed, dims=req.dims, tolerance=req.tolerance)
        return RandomSuiteResponse(
            name=res.name, status=res.status, max_residual=res.max_residual,
            mean_residual=res.mean_residual, tolerance=res.tolerance, details=res.details,
        )

    @app.post("/commutator", response_model=RandomSuiteResponse)
    def commutator(req: CommutatorSuiteRequest) -> RandomSuiteResponse:
        res = commutator_random_charts(req.trials, req.seed, dims=req.dims,
                                       tolerance=req.tolerance)
        return RandomSuiteResponse(
            name=res.name, status=res.status, max_residual=res.max_residual,
            mean_residual=res.mean_residual, tolerance=res.tolerance, details=res.details,
        )

    @app.post("/bochner", response_model=RandomSuiteResponse)
    def bochner(req: BochnerSuiteRequest) -> RandomSuiteResponse:
        res = bochner_random_charts(req.trials, req.seed, dims=req.dims,
                                    tolerance=req.tolerance)
        return RandomSuiteResponse(
            name=res.name, status=res.status, max_residual=res.max_residual,
            mean_residual=res.mean_residual, tolerance=res.tolerance, details=res.details,
        )

    @app.post("/heat-demo", response_model=HeatDemoResponse)
    def heat_demo(req: HeatDemoRequest) -> HeatDemoResponse:
        samples = heat_residuals(req.kind, req.times, req.points, circumference=req.circumference)
        rows = [
            {
                "t": s.t, "x": s.x,
                "varadhan_residual": s.varadhan_residual,
                "identity_residual": s.identity_residual,
            }
            for s in samples
        ]
        line_defects = [line_varadhan_defect(t) for t in req.times] if req.kind == "line" else None
        spread = circle_log_curvature_spread(0.5, req.circumference) if req.kind == "circle" else None
        return HeatDemoResponse(kind=req.kind, rows=rows, line_defects=line_defects,
                                circle_spread=spread)

    return app


app = create_app()
