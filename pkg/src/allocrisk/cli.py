"""Command-line interface for allocrisk.

Reproduces the numerical artifacts of the study (risk-ratio tables, the
contour study, verification suites) and exposes the library operations.
Outputs are CSV or JSON and are byte-identical across reruns of the same
command and seed; the contour and convergence report paths also render a
PNG figure next to the delimited output.

Usage:
    allocrisk risk --set ellipsoid --spec spec.json --alloc 1,1
    allocrisk risk --set hyperrect --alpha 1 --beta 0 --uniform 100
    allocrisk allocate --set hyperrect --spec spec.json --budget 2 --method exact
    allocrisk table 1 --format csv --out table1.csv
    allocrisk contour --grid 400x400 --out rho_grid.csv
    allocrisk verify --suite identities
    allocrisk simulate --spec spec.json --alloc 1,1 --replications 100000 --seed 42
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import ellipsoid, hyperrect, montecarlo
from .asymptotics import (
    SobolevParams,
    TABLE_ALPHAS,
    TABLE_BETAS,
    contour_grid,
    rho_ellipsoid,
    rho_hyperrect,
)
from .errors import AllocRiskError
from .model import Allocation, SequenceSpec, UniformAllocation, spec_from_json
from .montecarlo import SimConfig
from .verify import SUITES, run_suite

__all__ = ["cli", "main"]


def _round_half_up(x: float, nd: int) -> float:
    return math.floor(x * 10**nd + 0.5) / 10**nd


def _fail(message: str, code: int = 2) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _resolve_spec(spec, set_, alpha, beta, dim, quality, noise) -> SequenceSpec:
    if spec is not None:
        return spec_from_json(spec)
    if alpha is None or beta is None:
        _fail("provide --spec, or --alpha and --beta for a power-law instance")
    if set_ == "ellipsoid":
        return SequenceSpec.sobolev_ellipsoid(alpha, beta, Q=quality, sigma2=noise, D=dim)
    return SequenceSpec.sobolev_hyperrect(alpha, beta, Q=quality, sigma2=noise, D=dim)


def _resolve_alloc(spec: SequenceSpec, alloc, uniform, trunc) -> Allocation | None:
    if alloc is not None and uniform is not None:
        _fail("give either --alloc or --uniform, not both")
    if alloc is not None:
        try:
            values = [float(v) for v in alloc.split(",") if v.strip() != ""]
        except ValueError:
            _fail(f"could not parse allocation {alloc!r}")
        return Allocation.of(values)
    if uniform is not None:
        return UniformAllocation(uniform, trunc).expand(spec.D)
    return None


def _floats(obj):
    """Recursively convert numpy scalars/arrays for JSON emission."""
    if isinstance(obj, dict):
        return {k: _floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_floats(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _emit_json(data: dict, out: str | None) -> None:
    text = json.dumps(_floats(data), indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


def _csv_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _emit_csv(columns: list[str], rows: list[dict], out: str | None) -> None:
    lines = [",".join(columns)]
    lines.extend(",".join(_csv_cell(row[c]) for c in columns) for row in rows)
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


def _emit(data: dict, columns: list[str], rows: list[dict], fmt: str, out: str | None) -> None:
    if fmt == "json":
        _emit_json(data, out)
    else:
        _emit_csv(columns, rows, out)


_SPEC_OPTIONS = [
    click.option("--spec", "-s", default=None, help="Spec JSON: a file path or an inline object."),
    click.option("--alpha", type=float, default=None, help="Power-law smoothness (with --beta)."),
    click.option("--beta", type=float, default=None, help="Power-law noise growth (with --alpha)."),
    click.option("--dim", type=int, default=200, show_default=True, help="Truncation dimension for --alpha/--beta specs."),
    click.option("--quality", type=float, default=1.0, show_default=True, help="Scale Q of a_i^2."),
    click.option("--noise", type=float, default=1.0, show_default=True, help="Scale of sigma_i^2."),
]


def _spec_options(f):
    for opt in reversed(_SPEC_OPTIONS):
        f = opt(f)
    return f


@click.group()
@click.version_option(version="0.1.0", prog_name="allocrisk")
def cli():
    """Minimax linear risk and measurement-budget allocation toolkit."""


@cli.command("risk")
@_spec_options
@click.option("--set", "set_", type=click.Choice(["ellipsoid", "hyperrect"]), required=True)
@click.option("--alloc", default=None, help="Comma-separated measurement counts.")
@click.option("--uniform", type=float, default=None, help="Uniform level k per coordinate.")
@click.option("--trunc", type=int, default=None, help="Truncate the uniform allocation after d coordinates.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", default=None, help="Output path (default: stdout).")
def cmd_risk(spec, alpha, beta, dim, quality, noise, set_, alloc, uniform, trunc, fmt, out):
    """Minimax linear risk of an allocation over the chosen set."""
    try:
        sp = _resolve_spec(spec, set_, alpha, beta, dim, quality, noise)
        allocation = _resolve_alloc(sp, alloc, uniform, trunc)
        if set_ == "ellipsoid":
            if allocation is None:
                _fail("ellipsoid risk needs --alloc or --uniform")
            sol = ellipsoid.risk(sp, allocation)
            data = {
                "set": set_,
                "risk": sol.risk,
                "t": sol.t,
                "active_dim": sol.active_dim,
                "effective_budget": sol.effective_budget,
                "budget": allocation.budget,
            }
        else:
            if allocation is None and uniform is None:
                _fail("hyperrect risk needs --alloc or --uniform")
            if alloc is None and trunc is None:
                value = hyperrect.uniform_risk(sp, uniform)
                data = {"set": set_, "risk": value, "uniform_level": uniform, "budget": None}
            else:
                value = hyperrect.risk(sp, allocation)
                data = {"set": set_, "risk": value, "budget": allocation.budget}
    except AllocRiskError as exc:
        _fail(str(exc))
    cols = [c for c in ("set", "risk", "t", "active_dim", "effective_budget", "budget", "uniform_level") if c in data]
    _emit(data, cols, [data], fmt, out)


@cli.command("allocate")
@_spec_options
@click.option("--set", "set_", type=click.Choice(["ellipsoid", "hyperrect"]), required=True)
@click.option("--budget", type=float, required=True, help="Total measurement budget n.")
@click.option(
    "--method",
    type=click.Choice(["exact", "suboptimal", "numeric"]),
    required=True,
    help="exact: hyperrect closed form; suboptimal/numeric: ellipsoid.",
)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", default=None)
def cmd_allocate(spec, alpha, beta, dim, quality, noise, set_, budget, method, fmt, out):
    """Optimal or sub-optimal measurement allocation under a budget."""
    if method == "exact" and set_ != "hyperrect":
        _fail("method 'exact' applies to --set hyperrect only")
    if method in ("suboptimal", "numeric") and set_ != "ellipsoid":
        _fail(f"method {method!r} applies to --set ellipsoid only")
    try:
        sp = _resolve_spec(spec, set_, alpha, beta, dim, quality, noise)
        if method == "exact":
            sol = hyperrect.optimal_allocation_general(sp, budget)
            data = {
                "set": set_,
                "method": method,
                "budget": budget,
                "allocation": list(sol.alloc.n),
                "risk": sol.risk,
                "risk_tail": sol.risk_tail,
                "active_set": list(sol.active),
                "lagrange_mu": sol.lagrange_mu,
            }
        elif method == "suboptimal":
            sol = ellipsoid.suboptimal_allocation(sp, budget)
            data = {
                "set": set_,
                "method": method,
                "budget": budget,
                "allocation": list(sol.alloc.n),
                "risk": sol.risk,
                "t": sol.t,
                "active_dim": sol.active_dim,
            }
        else:
            sub = ellipsoid.suboptimal_allocation(sp, budget)
            best, best_risk = ellipsoid.optimal_allocation(sp, budget)
            data = {
                "set": set_,
                "method": method,
                "budget": budget,
                "allocation": list(best.n),
                "risk": best_risk,
                "certified_upper_bound": sub.risk,
            }
    except AllocRiskError as exc:
        _fail(str(exc))
    rows = [
        {"coordinate": i + 1, "n": v}
        for i, v in enumerate(data["allocation"])
    ]
    _emit(data, ["coordinate", "n"], rows, fmt, out)


@cli.command("table")
@click.argument("which", type=click.Choice(["1", "2"]))
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--out", default=None)
def cmd_table(which, fmt, out):
    """Limit risk-ratio table over the published (alpha, beta) grid.

    Table 1 covers the ellipsoid ratio, table 2 the hyperrectangle ratio.
    ``rho_printed`` rounds to the published precision (2 decimals, except
    the 3-decimal ellipsoid cell at alpha=0.5, beta=1).
    """
    fn = rho_ellipsoid if which == "1" else rho_hyperrect
    rows = []
    for b in TABLE_BETAS:
        for a in TABLE_ALPHAS:
            value = fn(SobolevParams(a, b))
            nd = 3 if (which == "1" and a == 0.5 and b == 1.0) else 2
            rows.append(
                {
                    "table": int(which),
                    "set": "ellipsoid" if which == "1" else "hyperrect",
                    "beta": b,
                    "alpha": a,
                    "rho": value,
                    "rho_printed": _round_half_up(value, nd),
                }
            )
    data = {"table": int(which), "rows": rows}
    _emit(data, ["table", "set", "beta", "alpha", "rho", "rho_printed"], rows, fmt, out)


@cli.command("contour")
@click.option("--alpha", "alpha_range", default="0.02:3", show_default=True, help="Alpha range lo:hi (log-spaced).")
@click.option("--beta", "beta_range", default="0.5:2.2", show_default=True, help="Beta range lo:hi (linear).")
@click.option("--grid", default="400x400", show_default=True, help="Resolution WxH.")
@click.option("--out", default="rho_contour.csv", show_default=True, help="Grid CSV path.")
@click.option("--summary-out", default=None, help="Summary JSON path (default: stdout).")
@click.option("--plot/--no-plot", default=True, show_default=True, help="Render a PNG next to the grid CSV.")
def cmd_contour(alpha_range, beta_range, grid, out, summary_out, plot):
    """Dense grid of the ellipsoid risk ratio plus its sub-unit region and minimum."""
    try:
        a_lo, a_hi = (float(v) for v in alpha_range.split(":"))
        b_lo, b_hi = (float(v) for v in beta_range.split(":"))
        W, H = (int(v) for v in grid.lower().split("x"))
    except ValueError:
        _fail(f"could not parse ranges {alpha_range!r}/{beta_range!r} or grid {grid!r}")
    try:
        study = contour_grid((a_lo, a_hi), (b_lo, b_hi), (W, H))
    except AllocRiskError as exc:
        _fail(str(exc))
    rows = []
    for j, b in enumerate(study.betas):
        for i, a in enumerate(study.alphas):
            rows.append({"alpha": float(a), "beta": float(b), "value": float(study.values[j, i])})
    _emit_csv(["alpha", "beta", "value"], rows, out)
    bbox = study.sub_unit_bbox
    summary = {
        "min_value": study.min_value,
        "min_location": {"alpha": study.min_alpha, "beta": study.min_beta},
        "S_bounding_box": None
        if bbox is None
        else {"alpha_min": bbox[0], "alpha_max": bbox[1], "beta_min": bbox[2], "beta_max": bbox[3]},
        "S_point_count": len(study.sub_unit_points),
        "grid": {"width": W, "height": H},
        "ranges": {"alpha": [a_lo, a_hi], "beta": [b_lo, b_hi]},
    }
    _emit_json(summary, summary_out)
    if plot:
        from .plotting import save_contour_figure

        fig_path = Path(out).with_suffix(".png")
        save_contour_figure(study, fig_path)
        click.echo(f"wrote {fig_path}")


@cli.command("verify")
@click.option("--suite", type=click.Choice(sorted(SUITES)), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None, help="Report JSON path (default: stdout).")
@click.option("--plot/--no-plot", default=True, show_default=True, help="Render a PNG for the convergence suite when --out is given.")
def cmd_verify(suite, seed, out, plot):
    """Run a verification suite; nonzero exit on hard-invariant failure.

    Conjecture violations are reported in the JSON but exit zero.
    """
    report = run_suite(suite, seed)
    study = report.pop("study", None)
    _emit_json(report, out)
    if suite == "convergence" and study is not None and out and plot:
        from .plotting import save_convergence_figure

        fig_path = Path(out).with_suffix(".png")
        save_convergence_figure(study, fig_path)
        click.echo(f"wrote {fig_path}")
    if not report["passed"]:
        sys.exit(1)


@cli.command("simulate")
@_spec_options
@click.option("--alloc", default=None, help="Comma-separated measurement counts.")
@click.option("--uniform", type=float, default=None, help="Uniform level k per coordinate.")
@click.option("--trunc", type=int, default=None)
@click.option("--theta", default=None, help="Comma-separated true parameter (default: ellipsoid saddle).")
@click.option("--weights", default=None, help="Comma-separated estimator weights (default: ellipsoid saddle).")
@click.option("--replications", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None)
def cmd_simulate(spec, alpha, beta, dim, quality, noise, alloc, uniform, trunc, theta, weights, replications, seed, out):
    """Monte Carlo check of a linear estimator's risk formula.

    Without --theta/--weights the ellipsoid saddle point of the allocation
    is simulated, so the empirical risk should match the minimax linear
    risk within a few standard errors.
    """
    try:
        sp = _resolve_spec(spec, "ellipsoid", alpha, beta, dim, quality, noise)
        allocation = _resolve_alloc(sp, alloc, uniform, trunc)
        if allocation is None:
            _fail("simulate needs --alloc or --uniform")
        if theta is None or weights is None:
            sol = ellipsoid.risk(sp, allocation)
            th = tuple(float(v) for v in np.sqrt(sol.theta_o_sq)) if theta is None else None
            lam = sol.lambda_o if weights is None else None
        if theta is not None:
            th = tuple(float(v) for v in theta.split(","))
        if weights is not None:
            lam = [float(v) for v in weights.split(",")]
        cfg = SimConfig(spec=sp, alloc=allocation, theta=th, replications=replications, seed=seed)
        rep = montecarlo.simulate(cfg, lam)
    except AllocRiskError as exc:
        _fail(str(exc))
    data = {
        "replications": replications,
        "seed": seed,
        "report": rep.to_json(),
        "theta": list(th),
        "weights": [float(v) for v in np.asarray(lam, dtype=float)],
    }
    _emit_json(data, out)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
