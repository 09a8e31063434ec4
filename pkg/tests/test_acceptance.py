"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Every tolerance is pinned here; run with ``pytest tests/test_acceptance.py -v -s``
to see the per-criterion lines as they complete.
"""

import math
import time

import numpy as np
import pytest

from allocrisk import ellipsoid, hyperrect, montecarlo
from allocrisk.asymptotics import (
    RHO_MIN_DEFAULT,
    SobolevParams,
    TABLE_ALPHAS,
    beta_inequality_ellipsoid,
    beta_inequality_hyperrect,
    contour_grid,
    rho_ellipsoid,
    rho_hyperrect,
)
from allocrisk.model import Allocation, SequenceSpec
from allocrisk.montecarlo import SimConfig
from allocrisk.verify import convergence_study

from oracles import bisect_threshold, hyperrect_risk_raw, simplex_grid_min

# published risk-ratio tables (5 beta rows x 8 alpha columns)
TABLE1_PRINTED = {
    0.0: (1.15, 1.16, 1.13, 1.11, 1.08, 1.04, 1.02, 1.01),
    0.5: (1.02, 1.03, 1.05, 1.06, 1.08, 1.10, 1.10, 1.12),
    1.0: (1.004, 1.02, 1.06, 1.09, 1.14, 1.20, 1.26, 1.30),
    3.0: (1.03, 1.06, 1.13, 1.20, 1.33, 1.55, 1.79, 2.03),
    10.0: (1.04, 1.08, 1.17, 1.26, 1.43, 1.84, 2.50, 3.58),
}
TABLE2_PRINTED = {
    0.0: (1.46, 1.31, 1.19, 1.14, 1.09, 1.05, 1.02, 1.01),
    0.5: (1.51, 1.38, 1.27, 1.22, 1.18, 1.15, 1.14, 1.13),
    1.0: (1.52, 1.43, 1.35, 1.33, 1.31, 1.31, 1.32, 1.33),
    3.0: (1.44, 1.45, 1.49, 1.54, 1.63, 1.79, 1.96, 2.12),
    10.0: (1.26, 1.31, 1.42, 1.52, 1.73, 2.18, 2.87, 3.91),
}


def _criterion(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _round_half_up(x: float, nd: int) -> float:
    return math.floor(x * 10**nd + 0.5) / 10**nd


def _table_mismatches(printed_table, rho_fn):
    mismatches = []
    for b, row in printed_table.items():
        for a, printed in zip(TABLE_ALPHAS, row):
            value = rho_fn(SobolevParams(a, b))
            nd = 3 if printed == 1.004 else 2
            tol = 0.0005 if nd == 3 else 0.005
            if _round_half_up(value, nd) != printed or abs(value - printed) > tol:
                mismatches.append((a, b, value, printed))
    return mismatches


def test_table1_reproduction():
    t0 = time.perf_counter()
    mismatches = _table_mismatches(TABLE1_PRINTED, rho_ellipsoid)
    elapsed = time.perf_counter() - t0
    detail = f"40 cells, runtime {elapsed:.2f}s"
    if mismatches:
        # confirm with 40-digit arithmetic that the computed values, not the
        # printed digits, are the correct evaluations of the closed form
        import mpmath as mp

        mp.mp.dps = 40
        confirmed = []
        for a, b, value, printed in mismatches:
            am, bm = mp.mpf(a), mp.mpf(b)
            s = am + bm + 1
            t2 = (2 * (bm + 1) * (2 * am + 2 * bm + 1) / (3 * am + 2 * bm + 2)) ** ((bm + 1) / s)
            t3 = (am**3 / (mp.beta((bm + 1) / am, mp.mpf(3) / 2) ** 2 * (am + 2 * bm + 1))) ** (am / s)
            exact = t2 * t3 / (2 * bm + 1)
            assert abs(float(exact) - value) < 1e-12
            confirmed.append(f"({a:g},{b:g}): computed {value:.4f} (40-digit confirmed) vs printed {printed}")
        detail = (
            f"{len(mismatches)} of 40 cells deviate beyond tolerance; the printed source values "
            f"are off in the last digit: " + "; ".join(confirmed) + f"; runtime {elapsed:.2f}s"
        )
    _criterion("table-1-reproduction", not mismatches and elapsed < 1.0, detail)


def test_table2_reproduction():
    t0 = time.perf_counter()
    mismatches = _table_mismatches(TABLE2_PRINTED, rho_hyperrect)
    elapsed = time.perf_counter() - t0
    _criterion(
        "table-2-reproduction",
        not mismatches and elapsed < 1.0,
        f"40 cells, mismatches {[(a, b) for a, b, *_ in mismatches]}, runtime {elapsed:.2f}s",
    )


def test_contour_study():
    t0 = time.perf_counter()
    study = contour_grid((0.02, 3.0), (0.5, 2.2), (400, 400))
    elapsed = time.perf_counter() - t0
    ok_min = abs(study.min_value - 0.998477) <= 1e-4
    ok_loc = abs(study.min_alpha - 0.149) <= 0.02 and abs(study.min_beta - 1.079) <= 0.02
    bbox = study.sub_unit_bbox
    ok_box = bbox is not None and 0.0 < bbox[1] <= 0.3205 and bbox[2] >= 0.7 and bbox[3] <= 1.823
    _criterion(
        "contour-study",
        ok_min and ok_loc and ok_box and elapsed < 60.0,
        f"min {study.min_value:.6f} at ({study.min_alpha:.4f}, {study.min_beta:.4f}), "
        f"sub-unit box {bbox}, runtime {elapsed:.1f}s",
    )


def test_hyperrect_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20_240_817)
    worst_risk_dev = 0.0
    worst_kkt = 0.0
    for trial in range(50):
        dim = int(rng.integers(2, 5))
        a = np.sort(rng.uniform(0.2, 2.0, size=dim))[::-1]
        s2 = rng.uniform(0.5, 2.0, size=dim)
        n = float(rng.uniform(0.5, 10.0))
        monotone = trial % 2 == 0
        if monotone:
            key = np.sqrt(s2) / a**2
            if np.any(np.diff(key) < 0):
                s2 = (np.maximum.accumulate(key) * a**2) ** 2
            spec = SequenceSpec.from_lists(a.tolist(), s2.tolist())
            sol = hyperrect.optimal_allocation(spec, n)
            gen = hyperrect.optimal_allocation_general(spec, n)
            assert gen.risk == pytest.approx(sol.risk, rel=1e-12)
        else:
            perm = rng.permutation(dim)
            spec = SequenceSpec.from_lists(a[perm].tolist(), s2[perm].tolist(), monotone_a=False)
            sol = hyperrect.optimal_allocation_general(spec, n)

        f = lambda x: hyperrect_risk_raw(spec.a_vec, spec.sigma2_vec, x)
        _, brute = simplex_grid_min(f, dim, n)
        worst_risk_dev = max(worst_risk_dev, abs(sol.risk - brute))

        c = spec.sigma2_vec / spec.a_vec**2
        marg = spec.sigma2_vec / (sol.alloc.padded(spec.D) + c) ** 2
        active = sol.alloc.array > 1e-12
        common = float(np.mean(marg[active]))
        worst_kkt = max(worst_kkt, float(np.max(np.abs(marg[active] - common))) / common)
        if (~active).any():
            worst_kkt = max(worst_kkt, max(0.0, float(np.max(marg[~active])) - common) / common)
    elapsed = time.perf_counter() - t0
    _criterion(
        "hyperrect-oracle-equivalence",
        worst_risk_dev <= 1e-6 and worst_kkt <= 1e-8 and elapsed < 30.0,
        f"50 instances, worst risk dev {worst_risk_dev:.2e}, worst KKT dev {worst_kkt:.2e}, "
        f"runtime {elapsed:.1f}s",
    )


def test_ellipsoid_saddle_verification():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11_235)
    worst_t = 0.0
    worst_gap = -math.inf
    for trial in range(50):
        dim = int(rng.integers(2, 6))
        a = np.sort(rng.uniform(0.15, 2.0, size=dim))[::-1]
        s2 = rng.uniform(0.5, 2.5, size=dim)
        n = rng.uniform(0.2, 5.0, size=dim)
        spec = SequenceSpec.from_lists(a.tolist(), s2.tolist())
        t = ellipsoid.solve_t(spec, n)
        t_bis = bisect_threshold(a, s2, n)
        worst_t = max(worst_t, abs(t - t_bis))
        gap = montecarlo.adversarial_check(spec, n, samples=2_000, seed=int(rng.integers(0, 2**63)))
        worst_gap = max(worst_gap, gap)
    elapsed = time.perf_counter() - t0
    _criterion(
        "ellipsoid-saddle-verification",
        worst_t <= 1e-10 and worst_gap <= 1e-9 and elapsed < 30.0,
        f"50 instances, worst |t - t_bisect| {worst_t:.2e}, worst adversarial gap {worst_gap:.2e}, "
        f"runtime {elapsed:.1f}s",
    )


def test_improvement_contract():
    t0 = time.perf_counter()
    worst_margin = -math.inf
    for alpha in (0.5, 1.0, 2.0):
        for beta in (0.0, 1.0):
            for n in (1e2, 1e3):
                spec = SequenceSpec.sobolev_ellipsoid(alpha, beta, D=120)
                sub = ellipsoid.suboptimal_allocation(spec, n)
                _, risk = ellipsoid.optimal_allocation(spec, n)
                worst_margin = max(worst_margin, risk - sub.risk)
    elapsed = time.perf_counter() - t0
    _criterion(
        "improvement-contract",
        worst_margin <= 1e-9,
        f"12 Sobolev instances, worst (numeric - suboptimal) margin {worst_margin:.2e}, "
        f"runtime {elapsed:.1f}s",
    )


def test_finite_n_consistency():
    t0 = time.perf_counter()
    study = convergence_study(1.0, 0.0, budgets=(1e3, 1e4, 1e5, 1e6))
    problems = []
    for label, series in study.items():
        gaps = [abs(r - series["limit"]) / series["limit"] for r in series["rescaled"]]
        if not all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:])):
            problems.append(f"{label}: gaps not decreasing {gaps}")
        if gaps[-1] > 0.05:
            problems.append(f"{label}: final gap {gaps[-1]:.3%}")
    elapsed = time.perf_counter() - t0
    final = {k: f"{abs(v['rescaled'][-1] - v['limit']) / v['limit']:.2%}" for k, v in study.items()}
    _criterion(
        "finite-n-consistency",
        not problems and elapsed < 60.0,
        f"final relative gaps {final}, problems {problems}, runtime {elapsed:.1f}s",
    )


def test_beta_inequality_sweeps():
    t0 = time.perf_counter()
    alphas = np.linspace(0.05, 50.0, 200)
    betas = np.linspace(-0.4499, 10.0, 200)
    hard_violations = 0
    for a in alphas:
        for b in betas:
            if not beta_inequality_hyperrect(SobolevParams(float(a), float(b))).holds:
                hard_violations += 1
    conjecture_violations = []
    for a in alphas:
        for b in betas:
            chk = beta_inequality_ellipsoid(SobolevParams(float(a), float(b)), rho_o=RHO_MIN_DEFAULT)
            if not chk.holds:
                conjecture_violations.append((float(a), float(b)))
    elapsed = time.perf_counter() - t0
    _criterion(
        "beta-inequality-sweeps",
        hard_violations == 0 and elapsed < 10.0,
        f"200x200 grid, hyperrect violations {hard_violations}, "
        f"conjecture violations reported: {len(conjecture_violations)}, runtime {elapsed:.1f}s",
    )


def test_monte_carlo_saddle():
    t0 = time.perf_counter()
    spec = SequenceSpec.from_lists([1.0, 0.5], [1.0, 1.0])
    alloc = Allocation.of([1.0, 1.0])
    sol = ellipsoid.risk(spec, alloc)
    cfg = SimConfig(
        spec=spec,
        alloc=alloc,
        theta=tuple(float(v) for v in np.sqrt(sol.theta_o_sq)),
        replications=100_000,
        seed=20_240_817,
        membership="ellipsoid",
    )
    rep1 = montecarlo.simulate(cfg, sol.lambda_o)
    rep2 = montecarlo.simulate(cfg, sol.lambda_o)
    elapsed = time.perf_counter() - t0
    _criterion(
        "monte-carlo-saddle",
        rep1.formula_risk == 0.5
        and abs(rep1.z_score) <= 3.5
        and rep1 == rep2
        and elapsed < 10.0,
        f"z = {rep1.z_score:.3f} at 1e5 replications, rerun identical: {rep1 == rep2}, "
        f"runtime {elapsed:.1f}s",
    )
