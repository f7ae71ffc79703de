"""Scenario configuration: pydantic schema, presets, and compilation to
charts and weights.

A scenario is one chart plus one weight plus verification toggles. Expression
fields are strings in the package DSL; alpha and gamma accept numbers, exact
rational strings like "3/2", or "fit".
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from .chart import Chart, ChartError, ScalarField
from .expr import ExprError, eval_rational, parse
from .weighted import WeightSpec


class ConfigError(ValueError):
    """Invalid scenario configuration, with a JSON-pointer-ish location."""

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}" if pointer else message)


class ChartConfig(BaseModel):
    dim: int = Field(ge=1, le=4)
    coords: list[str]
    metric: list[list[str]]
    domain: Optional[list[list[Optional[float]]]] = None
    periodic: Optional[list[Optional[float]]] = None

    @model_validator(mode="after")
    def _shapes(self):
        if len(self.coords) != self.dim:
            raise ValueError("coords length must equal dim")
        if len(self.metric) != self.dim or any(len(r) != self.dim for r in self.metric):
            raise ValueError("metric must be a dim x dim matrix of expressions")
        if self.domain is not None and len(self.domain) != self.dim:
            raise ValueError("domain must have one [lo, hi] pair per coordinate")
        if self.periodic is not None and len(self.periodic) != self.dim:
            raise ValueError("periodic must have one entry (period or null) per coordinate")
        return self


class WeightConfig(BaseModel):
    h: str
    alpha: Union[float, str, None] = None
    gamma: Union[float, str, None] = None

    @field_validator("alpha", "gamma")
    @classmethod
    def _fit_or_number(cls, v):
        if isinstance(v, str) and v != "fit":
            try:
                eval_rational(parse(v, []))
            except ExprError as exc:
                raise ValueError(f"not a rational constant or 'fit': {exc}") from exc
        return v


class SpectrumConfig(BaseModel):
    enabled: bool = False
    grid: int = 2000
    radius: float = 10.0
    count: int = 5


class LevelSetConfig(BaseModel):
    enabled: bool = False
    axis: int = 0
    values: list[float] = Field(default_factory=lambda: [0.5, 1.0, 1.5, 2.0])


class ChecksConfig(BaseModel):
    conditions: bool = True
    commutator_trials: int = 0
    identity_trials: int = 0
    excited_states_kmax: int = 0
    gram_kmax: int = 0
    distance: bool = False
    hessian_bound: bool = False
    ricci_constant: float = 0.0
    bochner_trials: int = 0
    moments_jmax: int = -1
    spectrum: SpectrumConfig = Field(default_factory=SpectrumConfig)
    heat: bool = False
    level_sets: LevelSetConfig = Field(default_factory=LevelSetConfig)


class TolerancesConfig(BaseModel):
    conditions: float = 1e-8
    commutator: float = 1e-7
    identities: float = 1e-8
    exact_cross_check: float = 1e-8
    gram: float = 1e-8
    norm_law: float = 1e-7
    spectrum: float = 2e-3
    distance_roundtrip: float = 1e-12
    distance_harmonic: float = 1e-7
    distance_gradient: float = 1e-9
    hessian_identity: float = 1e-8
    bochner: float = 1e-6
    level_sets: float = 1e-9
    heat_identity: float = 1e-10
    heat_varadhan: float = 1e-12


class ScenarioConfig(BaseModel):
    name: str
    description: str = ""
    chart: ChartConfig
    weight: WeightConfig
    checks: ChecksConfig = Field(default_factory=ChecksConfig)
    tolerances: TolerancesConfig = Field(default_factory=TolerancesConfig)
    samples: int = 1000
    sample_radius: float = 3.0
    quadrature_radius: float = 12.0
    quadrature_nodes: int = 200
    seed: int = 0


def _pointer(loc) -> str:
    return "/" + "/".join(str(p) for p in loc)


def scenario_from_dict(data: dict) -> ScenarioConfig:
    from pydantic import ValidationError

    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(first["msg"], _pointer(first["loc"])) from exc


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return scenario_from_dict(data)


def compile_chart(cfg: ChartConfig) -> Chart:
    domain = None
    if cfg.domain is not None:
        domain = [(lo, hi) for lo, hi in cfg.domain]
    try:
        return Chart(cfg.coords, metric=cfg.metric, domain=domain, periods=cfg.periodic)
    except (ExprError, ChartError) as exc:
        raise ConfigError(str(exc), "/chart") from exc


def _constant(value, name: str):
    if value is None or value == "fit":
        return None, None
    if isinstance(value, str):
        frac = eval_rational(parse(value, []))
        return float(frac), frac
    if isinstance(value, (int, float)):
        f = float(value)
        exact = Fraction(value) if isinstance(value, int) or f.is_integer() else None
        return f, exact
    raise ConfigError(f"cannot interpret {name}={value!r}", f"/weight/{name}")


def compile_weight(chart: Chart, cfg: WeightConfig) -> tuple[WeightSpec, Optional[Fraction], Optional[Fraction]]:
    """Build the weight; also return exact rational constants when available."""
    try:
        h = ScalarField.from_expression(chart, cfg.h, name="h")
    except (ExprError, ChartError) as exc:
        raise ConfigError(str(exc), "/weight/h") from exc
    alpha, alpha_exact = _constant(cfg.alpha, "alpha")
    gamma, gamma_exact = _constant(cfg.gamma, "gamma")
    if alpha is not None and alpha <= 0:
        raise ConfigError(f"alpha must be positive, got {alpha}", "/weight/alpha")
    return WeightSpec(chart, h, alpha=alpha, gamma=gamma), alpha_exact, gamma_exact


# --- presets -----------------------------------------------------------------


def _preset_r1_gaussian() -> dict:
    return {
        "name": "r1-gaussian",
        "description": "Euclidean line with the Gaussian weight h = -x^2/2 (alpha=1, gamma=0); "
                       "the full ladder, Gram, spectrum and heat suite",
        "chart": {"dim": 1, "coords": ["x"], "metric": [["1"]]},
        "weight": {"h": "-(1/2)*x^2", "alpha": "1", "gamma": "0"},
        "checks": {
            "conditions": True,
            "commutator_trials": 25,
            "identity_trials": 25,
            "excited_states_kmax": 12,
            "gram_kmax": 6,
            "distance": True,
            "hessian_bound": True,
            "ricci_constant": 0.0,
            "bochner_trials": 10,
            "moments_jmax": 4,
            "spectrum": {"enabled": True, "grid": 2000, "radius": 10.0, "count": 5},
            "heat": True,
        },
    }


def _preset_rxt2() -> dict:
    return {
        "name": "rxt2-volume-preserving",
        "description": "Line times flat 2-torus with the volume-preserving deformation "
                       "diag(1, e^s, e^-s) and h = -s^2/2; curved, non-product ladder weight",
        "chart": {
            "dim": 3,
            "coords": ["s", "x1", "x2"],
            "metric": [["1", "0", "0"], ["0", "exp(s)", "0"], ["0", "0", "exp(-s)"]],
            "periodic": [None, 1.0, 1.0],
        },
        "weight": {"h": "-(1/2)*s^2", "alpha": "1", "gamma": "0"},
        "checks": {
            "conditions": True,
            "commutator_trials": 10,
            "identity_trials": 10,
            "excited_states_kmax": 8,
            "distance": True,
            "hessian_bound": True,
            "ricci_constant": 0.5,
            "bochner_trials": 5,
            "moments_jmax": 3,
            "level_sets": {"enabled": True, "axis": 0, "values": [0.5, 1.0, 1.5, 2.0]},
        },
        "sample_radius": 2.5,
        "quadrature_radius": 10.0,
        "quadrature_nodes": 120,
    }


def _preset_r2_gaussian() -> dict:
    return {
        "name": "r2-gaussian",
        "description": "Gaussian weight on the Euclidean plane: the standard counterexample "
                       "whose two admissibility conditions demand different alphas",
        "chart": {"dim": 2, "coords": ["x", "y"], "metric": [["1", "0"], ["0", "1"]]},
        "weight": {"h": "-(1/2)*(x^2 + y^2)", "alpha": "fit", "gamma": "fit"},
        "checks": {"conditions": True},
    }


def _preset_r2_directional() -> dict:
    return {
        "name": "r2-directional",
        "description": "Single-direction weight h = -x^2/2 on the Euclidean plane; conditions "
                       "hold but the weighted volume is infinite (moment evidence flags it)",
        "chart": {"dim": 2, "coords": ["x", "y"], "metric": [["1", "0"], ["0", "1"]]},
        "weight": {"h": "-(1/2)*x^2", "alpha": "1", "gamma": "0"},
        "checks": {
            "conditions": True,
            "commutator_trials": 10,
            "distance": True,
            "moments_jmax": 3,
        },
        "quadrature_radius": 8.0,
        "quadrature_nodes": 80,
    }


def _preset_rxt2_control() -> dict:
    return {
        "name": "rxt2-control",
        "description": "Non-volume-preserving control metric diag(1, e^s, 1); level-set volumes "
                       "vary and the admissibility conditions fail, as they should",
        "chart": {
            "dim": 3,
            "coords": ["s", "x1", "x2"],
            "metric": [["1", "0", "0"], ["0", "exp(s)", "0"], ["0", "0", "1"]],
            "periodic": [None, 1.0, 1.0],
        },
        "weight": {"h": "-(1/2)*s^2", "alpha": "fit", "gamma": "fit"},
        "checks": {
            "conditions": True,
            "level_sets": {"enabled": True, "axis": 0, "values": [0.5, 1.0, 1.5]},
        },
        "sample_radius": 2.0,
    }


_PRESETS = {
    "r1-gaussian": _preset_r1_gaussian,
    "rxt2-volume-preserving": _preset_rxt2,
    "r2-gaussian": _preset_r2_gaussian,
    "r2-directional": _preset_r2_directional,
    "rxt2-control": _preset_rxt2_control,
}


def preset_names() -> list[str]:
    return sorted(_PRESETS)


def load_preset(name: str) -> ScenarioConfig:
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return scenario_from_dict(_PRESETS[name]())
