"""Command-line client for the verification service.

By default the CLI mounts the service in-process (no server needed); pass
--server URL to target a running instance instead. Reports are written as
deterministic JSON (wall-clock time goes to a separate run_meta.json), CSV
artifacts land next to them.

Exit codes: 0 all hard checks passed, 2 some check failed, 1 usage/config error.
"""

from __future__ import annotations

import concurrent.futures
import datetime
import json
import sys
from pathlib import Path

import click
import httpx

from . import __version__
from .runner import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # mount the service in-process so one-shot runs need no server
    import warnings

    from .service import app

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    return TestClient(app)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_USAGE)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        _fail(str(detail))
    return resp.json()


def _write_outputs(out_dir: Path, name: str, report: dict, artifacts: dict) -> Path:
    scenario_dir = out_dir / name
    scenario_dir.mkdir(parents=True, exist_ok=True)
    report_path = scenario_dir / "report.json"
    report_path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    meta = {"written_at": datetime.datetime.now(datetime.timezone.utc).isoformat()}
    (scenario_dir / "run_meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    for fname, content in sorted(artifacts.items()):
        (scenario_dir / fname).write_text(content)
    return report_path


def _print_summary(report: dict) -> None:
    click.echo(f"scenario {report['scenario']}: {'PASS' if report['passed'] else 'FAIL'}")
    for check in report["checks"]:
        mark = {"pass": "ok  ", "fail": "FAIL", "evidence": "info"}[check["status"]]
        resid = check.get("max_residual")
        resid_txt = f" max_residual={resid:.3e}" if resid is not None else ""
        click.echo(f"  [{mark}] {check['name']}{resid_txt}")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__)
def main() -> None:
    """Verification suite for ladder operators on weighted form spaces."""


server_option = click.option("--server", default=None, metavar="URL",
                             help="Remote service URL (defaults to in-process).")
out_option = click.option("--out", default="out", metavar="DIR", show_default=True,
                          help="Output directory for reports and CSV artifacts.")
json_option = click.option("--json", "as_json", is_flag=True,
                           help="Print the report JSON to stdout.")
seed_option = click.option("--seed", default=0, show_default=True, type=int)


@main.command()
@server_option
def presets(server) -> None:
    """List built-in scenario presets."""
    with _client(server) as client:
        data = client.get("/presets").json()
    for p in data["presets"]:
        click.echo(f"{p['name']:26s} {p['description']}")


@main.command()
@click.option("--config", "configs", multiple=True, type=click.Path(exists=True),
              help="Scenario config JSON (repeatable).")
@click.option("--preset", "presets_", multiple=True, help="Built-in preset name (repeatable).")
@click.option("--tol", default=None, type=float, help="Override the identity tolerance.")
@click.option("--kmax", default=None, type=int, help="Override the exact-ladder depth.")
@click.option("--grid", default=None, type=int, help="Override the spectrum grid size.")
@click.option("--radius", default=None, type=float, help="Override the spectrum radius.")
@seed_option
@out_option
@json_option
@server_option
def run(configs, presets_, tol, kmax, grid, radius, seed, out, as_json, server) -> None:
    """Run full verification scenarios and write reports."""
    jobs: list[dict] = []
    for path in configs:
        try:
            payload = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            _fail(f"invalid JSON in {path}: {exc}")
        jobs.append({"config": payload})
    for name in presets_:
        jobs.append({"preset": name})
    if not jobs:
        _fail("provide at least one --config or --preset")

    overrides = {"seed": seed}
    if tol is not None:
        overrides["tol"] = tol
    if kmax is not None:
        overrides["kmax"] = kmax
    if grid is not None:
        overrides["grid"] = grid
    if radius is not None:
        overrides["radius"] = radius
    for job in jobs:
        job["overrides"] = overrides

    out_dir = Path(out)
    results = []
    with _client(server) as client:
        if len(jobs) == 1:
            results.append(_post(client, "/run", jobs[0]))
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=min(4, len(jobs))) as pool:
                results = list(pool.map(lambda j: _post(client, "/run", j), jobs))

    all_passed = True
    for res in results:
        report, artifacts = res["report"], res["artifacts"]
        _write_outputs(out_dir, report["scenario"], report, artifacts)
        if as_json:
            click.echo(json.dumps(report, sort_keys=True, indent=2))
        else:
            _print_summary(report)
        all_passed &= report["passed"]
    sys.exit(EXIT_OK if all_passed else EXIT_CHECK_FAILED)


@main.command("verify-identities")
@click.option("--trials", default=100, show_default=True, type=int)
@click.option("--dims", default="1,2,3,4", show_default=True,
              help="Comma-separated chart dimensions to cycle through.")
@click.option("--tol", default=1e-8, show_default=True, type=float)
@seed_option
@out_option
@json_option
@server_option
def verify_identities(trials, dims, tol, seed, out, as_json, server) -> None:
    """Exterior-calculus identity battery on random charts."""
    dims_list = [int(d) for d in dims.split(",") if d.strip()]
    payload = {"trials": trials, "dims": dims_list, "seed": seed, "tolerance": tol}
    with _client(server) as client:
        data = _post(client, "/identities", payload)
    out_dir = Path(out) / "identities"
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
    if as_json:
        click.echo(json.dumps(data, sort_keys=True, indent=2))
    else:
        click.echo(f"form identities: {data['status'].upper()} "
                   f"(max residual {data['max_residual']:.3e}, tolerance {data['tolerance']:.1e})")
    sys.exit(EXIT_OK if data["status"] == "pass" else EXIT_CHECK_FAILED)


@main.command()
@click.option("--trials", default=200, show_default=True, type=int)
@click.option("--dims", default="1,2,3", show_default=True)
@click.option("--tol", default=1e-7, show_default=True, type=float)
@seed_option
@json_option
@server_option
def commutator(trials, dims, tol, seed, as_json, server) -> None:
    """Two-path ladder-commutator check on random charts and weights."""
    dims_list = [int(d) for d in dims.split(",") if d.strip()]
    payload = {"trials": trials, "dims": dims_list, "seed": seed, "tolerance": tol}
    with _client(server) as client:
        data = _post(client, "/commutator", payload)
    if as_json:
        click.echo(json.dumps(data, sort_keys=True, indent=2))
    else:
        click.echo(f"commutator formula: {data['status'].upper()} "
                   f"(max residual {data['max_residual']:.3e})")
    sys.exit(EXIT_OK if data["status"] == "pass" else EXIT_CHECK_FAILED)


@main.command("check-conditions")
@click.option("--preset", default=None, help="Built-in preset name.")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@seed_option
@json_option
@server_option
def check_conditions_cmd(preset, config_path, seed, as_json, server) -> None:
    """Run only the weight-admissibility condition check of a scenario."""
    job = _single_scenario_payload(preset, config_path, seed)
    job.setdefault("overrides", {})
    with _client(server) as client:
        cfg = _fetch_config(client, job)
        cfg["checks"] = {"conditions": True}
        data = _post(client, "/run", {"config": cfg, "overrides": job["overrides"]})
    report = data["report"]
    if as_json:
        click.echo(json.dumps(report, sort_keys=True, indent=2))
    else:
        _print_summary(report)
        for check in report["checks"]:
            if check["name"] == "conditions" and "incompatibility" in check["details"]:
                click.echo(f"  note: {check['details']['incompatibility']}")
    sys.exit(EXIT_OK if report["passed"] else EXIT_CHECK_FAILED)


def _single_scenario_payload(preset, config_path, seed) -> dict:
    if (preset is None) == (config_path is None):
        _fail("provide exactly one of --preset or --config")
    job: dict = {"overrides": {"seed": seed}}
    if preset is not None:
        job["preset"] = preset
    else:
        try:
            job["config"] = json.loads(Path(config_path).read_text())
        except json.JSONDecodeError as exc:
            _fail(f"invalid JSON in {config_path}: {exc}")
    return job


def _fetch_config(client: httpx.Client, job: dict) -> dict:
    if "config" in job:
        return job["config"]
    resp = client.get(f"/presets/{job['preset']}")
    if resp.status_code >= 400:
        _fail(resp.json().get("detail", resp.text))
    return resp.json()


@main.command("excited-states")
@click.option("--alpha", default="1", show_default=True, help="Rational constant, e.g. 3/2.")
@click.option("--gamma", default="0", show_default=True)
@click.option("--kmax", default=12, show_default=True, type=int)
@out_option
@json_option
@server_option
def excited_states(alpha, gamma, kmax, out, as_json, server) -> None:
    """Exact ladder tables and eigen-identities over Q[sqrt 2]."""
    # realize the constants on the line: h = -(alpha/2) x^2 + gamma/alpha
    # satisfies both admissibility conditions for exactly this (alpha, gamma)
    cfg = {
        "name": "excited-states",
        "chart": {"dim": 1, "coords": ["x"], "metric": [["1"]]},
        "weight": {
            "h": f"-(({alpha})/2)*x^2 + ({gamma})/({alpha})",
            "alpha": alpha,
            "gamma": gamma,
        },
        "checks": {"conditions": True, "excited_states_kmax": kmax},
    }
    with _client(server) as client:
        data = _post(client, "/run", {"config": cfg})
    report, artifacts = data["report"], data["artifacts"]
    out_dir = Path(out)
    _write_outputs(out_dir, "excited-states", report, artifacts)
    if as_json:
        click.echo(json.dumps(report, sort_keys=True, indent=2))
    else:
        _print_summary(report)
    sys.exit(EXIT_OK if report["passed"] else EXIT_CHECK_FAILED)


@main.command()
@click.option("--preset", default="r1-gaussian", show_default=True)
@click.option("--kmax", default=6, show_default=True, type=int)
@click.option("--radius", default=12.0, show_default=True, type=float)
@out_option
@json_option
@server_option
def gram(preset, kmax, radius, out, as_json, server) -> None:
    """Gram matrix of the excited states under the weighted inner product."""
    with _client(server) as client:
        cfg = _fetch_config(client, {"preset": preset})
        cfg["checks"] = {"conditions": True, "gram_kmax": kmax}
        cfg["quadrature_radius"] = radius
        data = _post(client, "/run", {"config": cfg})
    report, artifacts = data["report"], data["artifacts"]
    _write_outputs(Path(out), f"{report['scenario']}-gram", report, artifacts)
    if as_json:
        click.echo(json.dumps(report, sort_keys=True, indent=2))
    else:
        _print_summary(report)
    sys.exit(EXIT_OK if report["passed"] else EXIT_CHECK_FAILED)


@main.command()
@click.option("--preset", default="r1-gaussian", show_default=True)
@click.option("--grid", default=2000, show_default=True, type=int)
@click.option("--radius", default=10.0, show_default=True, type=float)
@click.option("--count", default=5, show_default=True, type=int)
@out_option
@json_option
@server_option
def spectrum(preset, grid, radius, count, out, as_json, server) -> None:
    """Finite-difference spectrum of the conjugated number operator."""
    with _client(server) as client:
        cfg = _fetch_config(client, {"preset": preset})
        cfg["checks"] = {
            "conditions": False,
            "spectrum": {"enabled": True, "grid": grid, "radius": radius, "count": count},
        }
        data = _post(client, "/run", {"config": cfg})
    report, artifacts = data["report"], data["artifacts"]
    _write_outputs(Path(out), f"{report['scenario']}-spectrum", report, artifacts)
    if as_json:
        click.echo(json.dumps(report, sort_keys=True, indent=2))
    else:
        _print_summary(report)
        for check in report["checks"]:
            if check["name"] == "spectrum":
                evs = ", ".join(f"{v:.6f}" for v in check["details"]["eigenvalues"])
                click.echo(f"  eigenvalues: {evs}")
    sys.exit(EXIT_OK if report["passed"] else EXIT_CHECK_FAILED)


@main.command("heat-demo")
@click.option("--kind", default="line", show_default=True,
              type=click.Choice(["line", "circle"]))
@click.option("--times", default="0.1,0.01,0.001", show_default=True)
@click.option("--points", default="0.25,0.8,1.5", show_default=True)
@json_option
@server_option
def heat_demo(kind, times, points, as_json, server) -> None:
    """Closed-form heat-kernel residual table (line or circle)."""
    payload = {
        "kind": kind,
        "times": [float(t) for t in times.split(",") if t.strip()],
        "points": [float(x) for x in points.split(",") if x.strip()],
    }
    with _client(server) as client:
        data = _post(client, "/heat-demo", payload)
    if as_json:
        click.echo(json.dumps(data, sort_keys=True, indent=2))
    else:
        for row in data["rows"]:
            click.echo(f"t={row['t']:<8g} x={row['x']:<6g} "
                       f"varadhan={row['varadhan_residual']: .6e} "
                       f"identity={row['identity_residual']: .3e}")
        if data.get("circle_spread") is not None:
            click.echo(f"circle log-curvature spread at t=0.5: {data['circle_spread']:.4f}")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port) -> None:
    """Start the verification service."""
    import uvicorn

    uvicorn.run("formladder.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
