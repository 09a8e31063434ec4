"""Independent oracles used by the tests.

Everything here re-derives expected values from first principles (dense
grids, direct summation, plain bisection, exchange refinement) without
calling the solver paths under test.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np


def bisect_threshold(a, s2, n, tol=1e-13, iters=300):
    """Plain bisection on the ellipsoid activation equation.

    Independent of the library's active-set solve; assumes every coordinate
    carries positive measurements.
    """
    a = np.asarray(a, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    n = np.asarray(n, dtype=float)

    def phi(t):
        lam = np.clip(1.0 - t / a, 0.0, None)
        return float(np.sum(s2 * lam / (n * a))) - t

    lo, hi = 0.0, float(a.max())
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if phi(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def _compositions(total, k):
    # weak compositions of `total` into k parts via stars and bars
    for dividers in combinations(range(total + k - 1), k - 1):
        prev = -1
        parts = []
        for d in dividers:
            parts.append(d - prev - 1)
            prev = d
        parts.append(total + k - 2 - prev)
        yield tuple(parts)


def simplex_grid_min(f, dim, budget, coarse=20, min_step=1e-9, extra_starts=()):
    """Brute-force minimum over {x >= 0, sum x = budget}.

    Coarse lattice scan over all weak compositions followed by pairwise
    exchange refinement with a geometrically shrinking step; exact in the
    limit for convex objectives.  The lattice resolution is capped so the
    enumeration stays tractable in higher dimensions (the refinement stage
    does the precision work); ``extra_starts`` seeds additional candidate
    points, useful when most lattice points are infeasible.
    """
    while math.comb(coarse + dim - 1, dim - 1) > 25_000 and coarse > 2:
        coarse -= 1
    best_x, best_f = None, math.inf
    unit = budget / coarse
    seeds = [np.asarray(comp, dtype=float) * unit for comp in _compositions(coarse, dim)]
    seeds.append(np.full(dim, budget / dim))
    seeds.extend(np.asarray(s, dtype=float) for s in extra_starts)
    for x in seeds:
        fx = f(x)
        if fx < best_f:
            best_x, best_f = x, fx
    if best_x is None:
        raise ValueError("no feasible point found on the coarse lattice or seeds")
    step = unit
    while step > min_step * budget:
        improved = True
        while improved:
            improved = False
            for i in range(dim):
                for j in range(dim):
                    if i == j or best_x[j] <= 0.0:
                        continue
                    delta = min(step, best_x[j])
                    cand = best_x.copy()
                    cand[i] += delta
                    cand[j] -= delta
                    fc = f(cand)
                    if fc < best_f:
                        best_x, best_f = cand, fc
                        improved = True
        step *= 0.5
    return best_x, best_f


def direct_beta_sum(alpha, beta, kappa, M):
    """sum_k k^beta (1 - k^alpha / M)_+^kappa by direct summation."""
    kmax = int(M ** (1.0 / alpha)) + 1
    k = np.arange(1, kmax + 1, dtype=float)
    base = np.clip(1.0 - k**alpha / M, 0.0, None)
    return float(np.sum(k**beta * base**kappa))


def ellipse_boundary_max_2d(a, s2, n, points=2_000_001):
    """sup over the 2-d ellipsoid boundary of the best-linear-estimator risk."""
    phi = np.linspace(0.0, 2.0 * np.pi, points)
    th1 = a[0] * np.cos(phi)
    th2 = a[1] * np.sin(phi)
    v1 = th1**2 * s2[0] / (n[0] * th1**2 + s2[0])
    v2 = th2**2 * s2[1] / (n[1] * th2**2 + s2[1])
    return float(np.max(v1 + v2))


def hyperrect_risk_raw(a, s2, n):
    """sum_i s2_i / (n_i + s2_i / a_i^2) evaluated directly."""
    a = np.asarray(a, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    n = np.asarray(n, dtype=float)
    return float(np.sum(s2 / (n + s2 / a**2)))
