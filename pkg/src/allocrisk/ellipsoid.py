"""Minimax linear risk over ellipsoids {theta : sum_i (theta_i/a_i)^2 <= 1}.

The risk of an allocation n is

    R(n) = sum_i (sigma_i^2 / n_i) * (1 - t/a_i)_+        (0/0 = 0)

where the threshold t = t(n) > 0 is the unique solution of

    sum_i sigma_i^2 (1 - t/a_i)_+ / (n_i a_i) = t.

A coordinate is active when a_i > t; active coordinates with n_i = 0 make
the formula inapplicable and raise :class:`InfiniteRiskError`.  The solve is
exact: for each candidate active prefix {1..d} the equation is linear in t,
    t = A_d / (1 + B_d),  A_d = sum_{i<=d} sigma_i^2/(n_i a_i),
                          B_d = sum_{i<=d} sigma_i^2/(n_i a_i^2),
and the candidate is accepted when a_{d+1} <= t < a_d (with a_{D+1} := 0).

All functions are pure; the dimension loop in :func:`optimal_allocation`
runs independent searches and reduces deterministically (minimum risk,
lowest dimension on ties).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyAllocationError,
    InfiniteRiskError,
    SpecValidationError,
    TruncationError,
)
from .model import Allocation, SequenceSpec
from .numerics import Bracket, minimize_simplex, solve_bracketed

__all__ = [
    "EllipsoidSolution",
    "SubOptimalSolution",
    "effective_budget",
    "optimal_allocation",
    "risk",
    "solve_t",
    "suboptimal_allocation",
]


@dataclass(frozen=True)
class EllipsoidSolution:
    """Saddle-point description of the minimax linear risk of one allocation."""

    t: float
    risk: float
    active_dim: int
    lambda_o: np.ndarray
    theta_o_sq: np.ndarray
    effective_budget: float


@dataclass(frozen=True)
class SubOptimalSolution:
    """Closed-form budget-constrained allocation and its risk."""

    t: float
    alloc: Allocation
    risk: float
    active_dim: int


def _check_tail(spec: SequenceSpec, t: float) -> None:
    # for generator sequences the truncation is exact only if coordinate D+1
    # is already inactive
    if spec.has_tail and float(spec.a_at(spec.D + 1)) > t:
        raise TruncationError(
            f"a_(D+1) = {float(spec.a_at(spec.D + 1)):.6g} exceeds t = {t:.6g}; "
            "increase the truncation dimension D"
        )


def _solve(spec: SequenceSpec, n: np.ndarray) -> tuple[float, int]:
    if not spec.monotone_a:
        raise SpecValidationError(
            "the ellipsoid solvers require nonincreasing semi-axes"
        )
    a = spec.a_vec
    s2 = spec.sigma2_vec
    pos = n > 0
    if not pos.any():
        raise EmptyAllocationError("allocation has no positive entry")
    safe_n = np.where(pos, n, 1.0)
    w1 = np.where(pos, s2 / (safe_n * a), 0.0)
    w2 = w1 / a
    A = np.cumsum(w1)
    B = np.cumsum(w2)
    t_cand = A / (1.0 + B)
    a_next = np.append(a[1:], 0.0)
    ok = (a_next <= t_cand) & (t_cand < a)
    if ok.any():
        t = float(t_cand[int(np.argmax(ok))])
    else:
        # floating-point boundary miss: fall back to a bracketed solve of the
        # defining equation (the root is interior to (0, a_1])
        def phi(t: float) -> float:
            lam = np.clip(1.0 - t / a, 0.0, None)
            return float(np.sum(w1 * lam)) - t

        t = solve_bracketed(
            phi, Bracket.from_function(phi, 0.0, float(a[0])), abs_tol=1e-15 * float(a[0])
        )
    d = int(np.sum(a > t))
    if np.any(~pos & (a > t)):
        bad = int(np.argmax(~pos & (a > t))) + 1
        raise InfiniteRiskError(
            f"coordinate {bad} is active (a_{bad} = {a[bad - 1]:.6g} > t = {t:.6g}) "
            "but has zero measurements"
        )
    _check_tail(spec, t)
    return t, d


def solve_t(spec: SequenceSpec, alloc: Allocation | Sequence[float]) -> float:
    """Threshold t(n): unique positive root of the activation equation."""
    n = Allocation.of(alloc).padded(spec.D)
    t, _ = _solve(spec, n)
    return t


def risk(spec: SequenceSpec, alloc: Allocation | Sequence[float]) -> EllipsoidSolution:
    """Minimax linear risk of ``alloc`` with the full saddle point."""
    n = Allocation.of(alloc).padded(spec.D)
    t, d = _solve(spec, n)
    a = spec.a_vec
    s2 = spec.sigma2_vec
    pos = n > 0
    safe_n = np.where(pos, n, 1.0)
    lam = np.clip(1.0 - t / a, 0.0, None)
    terms = np.where(pos, s2 / safe_n * lam, 0.0)
    total = math.fsum(terms.tolist())
    theta2 = np.where(pos, s2 * a * lam / (safe_n * t), 0.0)
    lam.setflags(write=False)
    theta2.setflags(write=False)
    return EllipsoidSolution(
        t=t,
        risk=total,
        active_dim=d,
        lambda_o=lam,
        theta_o_sq=theta2,
        effective_budget=math.fsum(n[:d].tolist()),
    )


def effective_budget(
    spec: SequenceSpec, alloc: Allocation | Sequence[float]
) -> tuple[float, int]:
    """Budget spent on the d = #{i : a_i > t} coordinates that affect the risk."""
    n = Allocation.of(alloc).padded(spec.D)
    t, d = _solve(spec, n)
    return math.fsum(n[:d].tolist()), d


def suboptimal_allocation(spec: SequenceSpec, n: float) -> SubOptimalSolution:
    """Closed-form allocation n_i proportional to sigma_i (1 - t/a_i)_+^(1/2).

    The threshold solves

        sum_k sigma_k [1-t/a_k]_+^(1/2) * sum_i sigma_i/a_i [1-t/a_i]_+^(1/2) = n t,

    whose left side decreases and right side increases on (0, a_1), and the
    risk is (sum_i sigma_i [1-t/a_i]_+^(1/2))^2 / n.
    """
    if not n > 0:
        raise EmptyAllocationError(f"budget must be positive, got {n}")
    if not spec.monotone_a:
        raise SpecValidationError("the ellipsoid solvers require nonincreasing semi-axes")
    a = spec.a_vec
    sig = spec.sigma_vec

    def g(t: float) -> float:
        root = np.sqrt(np.clip(1.0 - t / a, 0.0, None))
        return float((sig @ root) * ((sig / a) @ root)) - n * t

    a1 = float(a[0])
    t_s = solve_bracketed(g, Bracket.from_function(g, 0.0, a1), abs_tol=1e-15 * a1)
    _check_tail(spec, t_s)
    weights = sig * np.sqrt(np.clip(1.0 - t_s / a, 0.0, None))
    denom = math.fsum(weights.tolist())
    alloc = Allocation.of(n * weights / denom)
    return SubOptimalSolution(
        t=t_s,
        alloc=alloc,
        risk=denom**2 / n,
        active_dim=int(np.sum(a > t_s)),
    )


def _embed(x: np.ndarray, D: int) -> np.ndarray:
    out = np.zeros(D)
    out[: x.size] = x
    return out


def optimal_allocation(
    spec: SequenceSpec,
    n: float,
    dims: Iterable[int] | None = None,
) -> tuple[Allocation, float]:
    """Numeric search for the budget-n allocation minimizing the risk.

    Outer loop over the active dimension d, inner derivative-free simplex
    search over allocations supported on {1..d}, initialized at the
    sub-optimal allocation restricted and renormalized to d.  The result
    never exceeds the sub-optimal risk (the search starts there), so the
    closed form certifies an upper bound on the returned value.
    """
    sub = suboptimal_allocation(spec, n)
    d_s = max(sub.active_dim, 1)
    if dims is None:
        dims = range(max(1, d_s - 2), min(spec.D, d_s + 2) + 1)

    best_alloc = np.asarray(sub.alloc.padded(spec.D))
    best_risk = sub.risk
    sub_n = sub.alloc.padded(spec.D)

    def objective(x: np.ndarray) -> float:
        try:
            return risk(spec, Allocation.of(_embed(x, spec.D))).risk
        except (InfiniteRiskError, TruncationError, EmptyAllocationError):
            return math.inf

    for d in sorted(set(int(d) for d in dims)):
        if not 1 <= d <= spec.D:
            continue
        start = sub_n[:d].copy()
        total = start.sum()
        start = np.full(d, n / d) if total <= 0 else start * (n / total)
        if not math.isfinite(objective(start)):
            continue
        x, fx = minimize_simplex(objective, d, n, start, tol=1e-10)
        if fx < best_risk:
            best_risk = fx
            best_alloc = _embed(x, spec.D)

    return Allocation.of(best_alloc), best_risk
