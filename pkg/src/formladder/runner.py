"""Scenario orchestration: compile a config, run its enabled checks in
dependency order, and assemble a deterministic machine-readable report.

Reports carry no wall-clock data; identical config and seed produce identical
bytes. Exit-code mapping: 0 all hard checks pass, 2 some hard check failed,
1 usage or configuration error.
"""

from __future__ import annotations

import json
from typing import Optional

import numpy as np
import scipy
from pydantic import BaseModel, Field

from . import __version__
from .checks import (
    CheckResult,
    Scenario,
    check_adjointness,
    check_bochner,
    check_commutator_scenario,
    check_conditions_scenario,
    check_distance,
    check_excited_exact,
    check_gram,
    check_ground_state_transform,
    check_heat,
    check_hessian_bound,
    check_ladder_kernel,
    check_level_sets,
    check_moments,
    check_spectrum,
    identity_suite,
)
from .config import ScenarioConfig

REPORT_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2


class CheckEntry(BaseModel):
    name: str
    status: str
    max_residual: Optional[float] = None
    mean_residual: Optional[float] = None
    tolerance: Optional[float] = None
    provenance: str = "numeric"
    details: dict = Field(default_factory=dict)
    artifact_files: list[str] = Field(default_factory=list)


class VerificationReport(BaseModel):
    report_version: int = REPORT_VERSION
    scenario: str
    description: str = ""
    seed: int = 0
    config: dict
    versions: dict
    conventions: dict
    checks: list[CheckEntry]
    passed: bool
    hard_failures: list[str]

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True, indent=2) + "\n"


_CONVENTIONS = {
    "laplacian": "nonnegative; on the Euclidean line it is -d^2/dx^2",
    "heat_kernel": "d(rho)/dt = -(1/2) lap rho, variance t on the line",
    "orientation": "coordinate order",
    "weighted_measure": "e^{2h} times the Riemannian volume",
    "completeness": "completeness of the underlying manifold is asserted by the user; "
                    "a chart-local computation cannot verify it",
}


def _entry(result: CheckResult) -> CheckEntry:
    return CheckEntry(
        name=result.name,
        status=result.status,
        max_residual=result.max_residual,
        mean_residual=result.mean_residual,
        tolerance=result.tolerance,
        provenance=result.provenance,
        details=result.details,
        artifact_files=sorted(result.artifacts),
    )


def run_scenario(config: ScenarioConfig) -> tuple[VerificationReport, dict]:
    """Run every enabled check; returns the report and artifact payloads."""
    sc = Scenario.compile(config)
    checks: list[CheckResult] = []
    cfg = config.checks

    def guarded(fn, *args, **kwargs):
        try:
            out = fn(*args, **kwargs)
        except Exception as exc:  # surface module errors with scenario context
            name = getattr(fn, "__name__", str(fn)).replace("check_", "")
            checks.append(CheckResult(name=name, status="fail",
                                      details={"error": f"{type(exc).__name__}: {exc}"}))
            return
        if isinstance(out, CheckResult):
            checks.append(out)
        elif isinstance(out, tuple):
            checks.extend(out)
        else:
            checks.extend(out)

    if cfg.conditions:
        guarded(check_conditions_scenario, sc)
    if cfg.commutator_trials > 0:
        guarded(check_commutator_scenario, sc)
    if cfg.identity_trials > 0:
        guarded(identity_suite, cfg.identity_trials, config.seed,
                chart=sc.chart, tolerance=config.tolerances.identities,
                label="identities-scenario")
        guarded(check_ladder_kernel, sc)
    if cfg.excited_states_kmax > 0:
        guarded(check_excited_exact, sc)
    if cfg.gram_kmax > 0:
        guarded(check_gram, sc)
        guarded(check_adjointness, sc)
    if cfg.moments_jmax >= 0:
        guarded(check_moments, sc)
    if cfg.spectrum.enabled:
        guarded(check_spectrum, sc)
        guarded(check_ground_state_transform, sc)
    if cfg.distance:
        guarded(check_distance, sc)
    if cfg.hessian_bound:
        guarded(check_hessian_bound, sc)
    if cfg.bochner_trials > 0:
        guarded(check_bochner, sc)
    if cfg.level_sets.enabled:
        guarded(check_level_sets, sc)
    if cfg.heat:
        guarded(check_heat, sc)

    hard_failures = [c.name for c in checks if c.status == "fail"]
    report = VerificationReport(
        scenario=config.name,
        description=config.description,
        seed=config.seed,
        config=config.model_dump(),
        versions={
            "formladder": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        conventions=_CONVENTIONS,
        checks=[_entry(c) for c in checks],
        passed=not hard_failures,
        hard_failures=hard_failures,
    )
    artifacts: dict[str, str] = {}
    for c in checks:
        artifacts.update(c.artifacts)
    return report, artifacts


def exit_code_for(reports: list[VerificationReport]) -> int:
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED
