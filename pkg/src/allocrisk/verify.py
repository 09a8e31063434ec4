"""Verification suites behind the CLI ``verify`` subcommand.

Each suite returns a JSON-compatible report listing every check with its
measured values and tolerance.  Hard checks are mathematical invariants of
the implementation; a hard failure makes the suite fail.  Conjecture checks
(the ellipsoid beta-function bound) are reported but never fail the suite.
"""

from __future__ import annotations

import math

import numpy as np

from . import ellipsoid, hyperrect, montecarlo
from .asymptotics import (
    SobolevParams,
    ellipsoid_sub_risk_coef,
    ellipsoid_uniform_dim_coef,
    ellipsoid_uniform_risk_coef,
    beta_inequality_ellipsoid,
    beta_inequality_hyperrect,
    hyperrect_opt_risk_coef,
    hyperrect_trunc_uniform_risk_coef,
    hyperrect_uniform_risk_coef,
    rho_ellipsoid_forms,
    rho_hyperrect_forms,
)
from .model import Allocation, SequenceSpec, UniformAllocation
from .montecarlo import SimConfig
from .numerics import beta as beta_fn

__all__ = [
    "SUITES",
    "convergence_study",
    "run_suite",
]


def _check(name: str, passed: bool, hard: bool = True, **detail) -> dict:
    return {"name": name, "passed": bool(passed), "hard": hard, "detail": detail}


def _report(suite: str, seed: int | None, checks: list[dict]) -> dict:
    hard_failures = sum(1 for c in checks if c["hard"] and not c["passed"])
    conjecture_violations = sum(1 for c in checks if not c["hard"] and not c["passed"])
    return {
        "suite": suite,
        "seed": seed,
        "checks": checks,
        "hard_failures": hard_failures,
        "conjecture_violations": conjecture_violations,
        "passed": hard_failures == 0,
    }


def run_identities(seed: int = 0) -> dict:
    checks: list[dict] = []

    alphas = np.exp(np.linspace(math.log(0.05), math.log(50.0), 50))
    betas = np.linspace(-0.45, 10.0, 50)
    worst = 0.0
    for a in alphas:
        for b in betas:
            c, e = rho_ellipsoid_forms(SobolevParams(float(a), float(b)))
            worst = max(worst, abs(c - e) / max(abs(e), 1.0))
    checks.append(
        _check("rho_ellipsoid_composition", worst <= 1e-10, max_rel_dev=worst, tolerance=1e-10)
    )

    worst = 0.0
    for a in alphas:
        for b in betas:
            p = SobolevParams(float(a), float(b))
            composed, printed = rho_hyperrect_forms(p)
            worst = max(worst, abs(composed - printed) / max(abs(printed), 1.0))
    checks.append(
        _check("rho_hyperrect_composition", worst <= 1e-10, max_rel_dev=worst, tolerance=1e-10)
    )

    # coefficient identity linking the truncated-uniform and uniform constants,
    # re-evaluated in plain (non-log) arithmetic
    worst = 0.0
    for a in alphas:
        for b in betas:
            s2 = 2.0 * a + 2.0 * b + 1.0
            direct = ((a + b + 1.0) / a) * (
                2.0 * a * hyperrect_uniform_risk_coef(a, b) / s2
            ) ** (s2 / (s2 + 1.0))
            ours = hyperrect_trunc_uniform_risk_coef(a, b)
            worst = max(worst, abs(direct - ours) / max(abs(direct), 1.0))
    checks.append(
        _check("trunc_uniform_coefficient_identity", worst <= 1e-12, max_rel_dev=worst, tolerance=1e-12)
    )

    rng = np.random.default_rng(seed)
    worst_sym = worst_rec = 0.0
    for _ in range(200):
        x, y = rng.uniform(0.05, 30.0, size=2)
        worst_sym = max(worst_sym, abs(beta_fn(x, y) - beta_fn(y, x)) / beta_fn(x, y))
        lhs = beta_fn(x + 1.0, y)
        rhs = beta_fn(x, y) * x / (x + y)
        worst_rec = max(worst_rec, abs(lhs - rhs) / abs(rhs))
    checks.append(_check("beta_symmetry", worst_sym <= 1e-12, max_rel_dev=worst_sym, tolerance=1e-12))
    checks.append(_check("beta_recurrence", worst_rec <= 1e-12, max_rel_dev=worst_rec, tolerance=1e-12))

    # risk scaling R(n, C, c) = C R(n C / c, 1, 1) on a fixed 5-dim instance
    base_a = [1.0, 0.7, 0.45, 0.3, 0.2]
    base_s = [1.0, 1.1, 1.3, 1.6, 2.0]
    C, c = 2.0, 3.0
    scaled = SequenceSpec.from_lists(
        [math.sqrt(C) * v for v in base_a], [c * v for v in base_s]
    )
    unit = SequenceSpec.from_lists(base_a, base_s)
    alloc = np.array([2.0, 1.5, 1.0, 0.8, 0.5])
    lhs = ellipsoid.risk(scaled, Allocation.of(alloc)).risk
    rhs = C * ellipsoid.risk(unit, Allocation.of(alloc * C / c)).risk
    dev = abs(lhs - rhs) / abs(rhs)
    checks.append(_check("ellipsoid_risk_scaling", dev <= 1e-10, rel_dev=dev, tolerance=1e-10))

    return _report("identities", seed, checks)


def run_beta_inequalities(
    grid: tuple[int, int] = (200, 200),
    rho_o: float | None = None,
) -> dict:
    checks: list[dict] = []
    na, nb = grid
    alphas = np.linspace(0.05, 50.0, na)
    betas = np.linspace(-0.4499, 10.0, nb)

    worst_margin = math.inf
    violations = 0
    for a in alphas:
        for b in betas:
            chk = beta_inequality_hyperrect(SobolevParams(float(a), float(b)))
            worst_margin = min(worst_margin, chk.lhs - chk.rhs)
            violations += not chk.holds
    checks.append(
        _check(
            "hyperrect_beta_inequality",
            violations == 0,
            violations=violations,
            min_margin=worst_margin,
            grid=list(grid),
        )
    )

    kwargs = {} if rho_o is None else {"rho_o": rho_o}
    conj_violations: list[dict] = []
    for a in alphas:
        for b in betas:
            chk = beta_inequality_ellipsoid(SobolevParams(float(a), float(b)), **kwargs)
            if not chk.holds:
                conj_violations.append(
                    {"alpha": float(a), "beta": float(b), "lhs": chk.lhs, "rhs": chk.rhs}
                )
    checks.append(
        _check(
            "ellipsoid_beta_conjecture",
            len(conj_violations) == 0,
            hard=False,
            violations=conj_violations[:20],
            violation_count=len(conj_violations),
            grid=list(grid),
        )
    )
    return _report("beta-inequalities", None, checks)


def run_mc(seed: int = 0, replications: int = 20_000) -> dict:
    checks: list[dict] = []
    spec = SequenceSpec.from_lists([1.0, 0.5], [1.0, 1.0])
    alloc = Allocation.of([1.0, 1.0])
    sol = ellipsoid.risk(spec, alloc)
    cfg = SimConfig(
        spec=spec,
        alloc=alloc,
        theta=tuple(float(v) for v in np.sqrt(sol.theta_o_sq)),
        replications=replications,
        seed=seed,
        membership="ellipsoid",
    )
    rep = montecarlo.simulate(cfg, sol.lambda_o)
    checks.append(
        _check(
            "saddle_point_zscore",
            abs(rep.z_score) <= 3.5,
            tolerance=3.5,
            **rep.to_json(),
        )
    )
    rep2 = montecarlo.simulate(cfg, sol.lambda_o)
    checks.append(_check("seeded_reproducibility", rep == rep2))

    pure = SequenceSpec.from_lists([1.0, 1.0, 1.0], [1.0, 1.0, 1.0])
    cfg1 = SimConfig(
        spec=pure,
        alloc=Allocation.of([1.0, 1.0, 1.0]),
        theta=(0.0, 0.0, 0.0),
        replications=replications,
        seed=seed + 1,
    )
    rep3 = montecarlo.simulate(cfg1, [1.0, 1.0, 1.0])
    checks.append(
        _check(
            "pure_variance_zscore",
            abs(rep3.z_score) <= 3.5 and abs(rep3.formula_risk - 3.0) < 1e-12,
            tolerance=3.5,
            **rep3.to_json(),
        )
    )

    gap = montecarlo.adversarial_check(spec, alloc, samples=10_000, seed=seed)
    checks.append(_check("adversarial_gap", gap <= 1e-9, max_gap=gap, tolerance=1e-9))
    return _report("mc", seed, checks)


def convergence_study(
    alpha: float = 1.0,
    beta: float = 0.0,
    budgets: tuple[float, ...] = (1e3, 1e4, 1e5, 1e6),
) -> dict[str, dict]:
    """Rescaled finite-n risks for the four tracked sequences.

    Returns {label: {"n": [...], "rescaled": [...], "limit": coef, "rate": r}}
    where rescaled = n**(-rate) * risk(n) should drift toward the limit.
    """
    s = alpha + beta + 1.0
    s2 = 2.0 * alpha + 2.0 * beta + 1.0
    rate_u = -2.0 * alpha / s2
    rate_o = -alpha / s
    out: dict[str, dict] = {
        "ellipsoid_uniform": {"limit": ellipsoid_uniform_risk_coef(alpha, beta), "rate": rate_u},
        "ellipsoid_suboptimal": {"limit": ellipsoid_sub_risk_coef(alpha, beta), "rate": rate_o},
        "hyperrect_optimal": {"limit": hyperrect_opt_risk_coef(alpha, beta), "rate": rate_o},
        "hyperrect_uniform": {"limit": hyperrect_uniform_risk_coef(alpha, beta), "rate": rate_u},
    }
    for series in out.values():
        series["n"] = []
        series["rescaled"] = []

    dim_coef = ellipsoid_uniform_dim_coef(alpha, beta)
    for n in budgets:
        D = int(3.0 * dim_coef * n ** (1.0 / s2)) + 30
        spec = SequenceSpec.sobolev_ellipsoid(alpha, beta, D=D)
        r = ellipsoid.risk(spec, UniformAllocation(n).expand(D)).risk
        out["ellipsoid_uniform"]["n"].append(n)
        out["ellipsoid_uniform"]["rescaled"].append(n ** (-rate_u) * r)

        D = int(5.0 * n ** (1.0 / (2.0 * s))) + 30
        spec = SequenceSpec.sobolev_ellipsoid(alpha, beta, D=D)
        r = ellipsoid.suboptimal_allocation(spec, n).risk
        out["ellipsoid_suboptimal"]["n"].append(n)
        out["ellipsoid_suboptimal"]["rescaled"].append(n ** (-rate_o) * r)

        D = int(5.0 * n ** (1.0 / (2.0 * s))) + 30
        spec = SequenceSpec.sobolev_hyperrect(alpha, beta, D=D, tail_tol=1e-12)
        r = hyperrect.optimal_allocation(spec, n).risk
        out["hyperrect_optimal"]["n"].append(n)
        out["hyperrect_optimal"]["rescaled"].append(n ** (-rate_o) * r)

        D = int(3.0 * n ** (1.0 / s2)) + 30
        spec = SequenceSpec.sobolev_hyperrect(alpha, beta, D=D, tail_tol=1e-12)
        r = hyperrect.uniform_risk(spec, n)
        out["hyperrect_uniform"]["n"].append(n)
        out["hyperrect_uniform"]["rescaled"].append(n ** (-rate_u) * r)
    return out


def run_convergence(
    alpha: float = 1.0,
    beta: float = 0.0,
    budgets: tuple[float, ...] = (1e3, 1e4, 1e5, 1e6),
    final_gap_tol: float = 0.05,
) -> dict:
    checks: list[dict] = []
    study = convergence_study(alpha, beta, budgets)
    for label, series in study.items():
        gaps = [abs(r - series["limit"]) / series["limit"] for r in series["rescaled"]]
        monotone = all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
        checks.append(
            _check(
                f"drift_{label}",
                monotone and gaps[-1] <= final_gap_tol,
                limit=series["limit"],
                rescaled=series["rescaled"],
                relative_gaps=gaps,
                final_gap_tolerance=final_gap_tol,
            )
        )
    report = _report("convergence", None, checks)
    report["study"] = study
    return report


SUITES = {
    "identities": run_identities,
    "beta-inequalities": lambda seed=0: run_beta_inequalities(),
    "mc": run_mc,
    "convergence": lambda seed=0: run_convergence(),
}


def run_suite(name: str, seed: int = 0) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if name in ("identities", "mc"):
        return SUITES[name](seed)
    return SUITES[name]()
