"""Scalar special functions and generic solvers used by the risk modules.

Everything here is a pure function of its arguments: no global state, no
randomness, safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .errors import (
    DivergenceError,
    DomainError,
    NonFiniteError,
    NoSignChangeError,
)

__all__ = [
    "Bracket",
    "SumResult",
    "beta",
    "log_beta",
    "log_gamma",
    "minimize_scalar_bounded",
    "minimize_simplex",
    "solve_bracketed",
    "sum_series",
]


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0.

    Backed by the platform ``lgamma`` (correct to a couple of ulp), which
    comfortably covers the ~6 significant digits the asymptotic constants
    need.
    """
    if not (isinstance(x, (int, float)) and math.isfinite(x)):
        raise DomainError(f"log_gamma requires a finite number, got {x!r}")
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def log_beta(x: float, y: float) -> float:
    """log B(x, y) = lgamma(x) + lgamma(y) - lgamma(x + y) for x, y > 0."""
    return log_gamma(x) + log_gamma(y) - log_gamma(x + y)


def beta(x: float, y: float) -> float:
    """Euler beta function B(x, y) for positive arguments."""
    return math.exp(log_beta(x, y))


@dataclass(frozen=True)
class Bracket:
    """A sign-change interval [lo, hi] with the function values at both ends."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self) -> None:
        if not (self.lo < self.hi):
            raise DomainError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        for v in (self.f_lo, self.f_hi):
            if not math.isfinite(v):
                raise NonFiniteError(f"non-finite bracket endpoint value {v}")
        if self.f_lo * self.f_hi > 0:
            raise NoSignChangeError(
                f"f({self.lo})={self.f_lo} and f({self.hi})={self.f_hi} have the same sign"
            )

    @classmethod
    def from_function(cls, f: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(lo, hi, float(f(lo)), float(f(hi)))


def solve_bracketed(
    f: Callable[[float], float],
    bracket: Bracket,
    abs_tol: float | None = None,
) -> float:
    """Root of a continuous scalar function inside a sign-change bracket.

    Bisection with a secant step tried on alternating iterations; the
    interval therefore at least halves every two iterations regardless of
    how the secant behaves.  Deterministic for a given ``f``.

    ``abs_tol`` defaults to 1e-12 times the initial bracket width.
    """
    lo, hi = bracket.lo, bracket.hi
    f_lo, f_hi = bracket.f_lo, bracket.f_hi
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if abs_tol is None:
        abs_tol = 1e-12 * (hi - lo)
    if not (abs_tol > 0):
        raise DomainError(f"abs_tol must be positive, got {abs_tol}")

    for k in range(256):
        width = hi - lo
        if width <= abs_tol:
            break
        x = 0.5 * (lo + hi)
        if k % 2 == 1 and f_hi != f_lo:
            secant = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
            # keep the secant step strictly interior so the bracket shrinks
            pad = 0.01 * width
            if lo + pad < secant < hi - pad:
                x = secant
        fx = float(f(x))
        if not math.isfinite(fx):
            raise NonFiniteError(f"f({x}) = {fx} while solving bracketed root")
        if fx == 0.0:
            return x
        if (fx < 0) == (f_lo < 0):
            lo, f_lo = x, fx
        else:
            hi, f_hi = x, fx
    return 0.5 * (lo + hi)


def minimize_scalar_bounded(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Golden-section minimum of a unimodal scalar function on [lo, hi]."""
    if not (lo < hi):
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = float(f(c)), float(f(d))
    for _ in range(max_iter):
        if (b - a) <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = float(f(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = float(f(d))
    x = c if fc < fd else d
    return x, min(fc, fd)


def _project_to_simplex(x: np.ndarray, budget: float) -> np.ndarray:
    y = np.clip(x, 0.0, None)
    total = float(y.sum())
    if total <= 0.0:
        y = np.full_like(y, budget / y.size)
    else:
        y = y * (budget / total)
    return y


def minimize_simplex(
    f: Callable[[np.ndarray], float],
    dim: int,
    budget: float,
    start: Sequence[float],
    tol: float = 1e-9,
) -> tuple[np.ndarray, float]:
    """Derivative-free minimization over {x >= 0, sum(x) = budget}.

    Eliminates the last coordinate through the budget equality and runs
    Nelder-Mead on the remaining dim-1 coordinates, restarted from several
    blends of the start point toward the simplex centre (the objective can
    be non-smooth at active-set boundaries, so a single start is fragile).
    The returned value never exceeds f(start).
    """
    if dim < 1:
        raise DomainError(f"dim must be >= 1, got {dim}")
    if not (budget > 0):
        raise DomainError(f"budget must be positive, got {budget}")
    x0 = np.asarray(start, dtype=float)
    if x0.shape != (dim,):
        raise DomainError(f"start must have shape ({dim},), got {x0.shape}")
    scale = max(budget, 1.0)
    if np.any(x0 < -1e-9 * scale) or abs(float(x0.sum()) - budget) > 1e-9 * scale:
        raise DomainError("start point does not lie on the budget simplex")
    x0 = _project_to_simplex(x0, budget)
    f0 = float(f(x0))
    if not math.isfinite(f0):
        raise NonFiniteError(f"objective is not finite at the start point: {f0}")
    if dim == 1:
        return np.array([budget]), f0

    # finite barrier for infeasible points; scipy's simplex loop warns on inf
    barrier = 1e300

    def lifted(z: np.ndarray) -> float:
        last = budget - float(z.sum())
        x = np.append(z, last)
        if np.any(x < -1e-12 * scale):
            return barrier
        val = float(f(np.clip(x, 0.0, None)))
        return val if math.isfinite(val) else barrier

    best_x, best_f = x0, f0
    centre = np.full(dim, budget / dim)
    for blend in (0.0, 0.5):
        xs = (1.0 - blend) * x0 + blend * centre
        res = optimize.minimize(
            lifted,
            xs[:-1],
            method="Nelder-Mead",
            options={
                "xatol": tol * scale,
                "fatol": tol * max(1.0, abs(f0)),
                "maxiter": 250 * dim,
                "maxfev": 250 * dim,
            },
        )
        cand = _project_to_simplex(np.append(res.x, budget - float(res.x.sum())), budget)
        fc = float(f(cand))
        if math.isfinite(fc) and fc < best_f:
            best_x, best_f = cand, fc
    return best_x, best_f


@dataclass(frozen=True)
class SumResult:
    """Value of a (possibly infinite) series with a bound on the truncation error."""

    value: float
    terms_used: int
    tail_bound: float


def _eval_terms(term: Callable[[np.ndarray], np.ndarray], lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi + 1, dtype=float)
    vals = np.asarray(term(idx), dtype=float)
    if vals.shape != idx.shape:
        vals = np.broadcast_to(vals, idx.shape).astype(float)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteError(f"series term is not finite on indices [{lo}, {hi}]")
    return vals


def sum_series(
    term: Callable[[np.ndarray], np.ndarray],
    start: int = 1,
    tail_policy: str = "analytic-power-tail",
    tol: float = 1e-10,
    max_terms: int = 1 << 23,
    min_terms: int = 64,
) -> SumResult:
    """Sum term(i) for i = start, start+1, ... with a controlled tail.

    ``term`` is called with a float64 index array and must return the
    matching array of values.  Terms must be eventually nonnegative and
    nonincreasing.

    tail_policy:
      * ``analytic-power-tail`` - fits the local decay exponent at the
        cutoff and closes the tail with a first-order Euler-Maclaurin
        integral estimate; suited to power-law tails.
      * ``cutoff`` - plain summation with a geometric tail bound from the
        observed term ratio; suited to exponentially decaying terms.

    The reported ``tail_bound`` is conservative: it dominates the observed
    change of the estimate under one cutoff doubling.
    """
    if tail_policy not in ("analytic-power-tail", "cutoff"):
        raise DomainError(f"unknown tail policy {tail_policy!r}")
    if not (tol > 0):
        raise DomainError(f"tol must be positive, got {tol}")
    if start < 1:
        raise DomainError(f"start must be >= 1, got {start}")

    partial: list[float] = []
    lo = start
    cutoff = start + max(min_terms, 16) - 1
    prev_estimate: float | None = None
    last_vals: np.ndarray | None = None
    while True:
        vals = _eval_terms(term, lo, cutoff)
        partial.extend(vals.tolist())
        total_terms = cutoff - start + 1
        # decrease check on the trailing half of what we have seen so far
        check = vals if last_vals is None else np.concatenate([last_vals[-2:], vals])
        grace = total_terms <= max(2 * min_terms, 128)
        f_end = float(vals[-1])
        if f_end < 0 and not grace:
            raise DivergenceError(f"series term is negative at index {cutoff}")
        increasing = np.any(np.diff(check) > 0)
        head = math.fsum(partial)

        if np.max(np.abs(vals)) == 0.0:
            # a nonincreasing nonnegative sequence that hit zero stays there
            return SumResult(head, total_terms, 0.0)

        if tail_policy == "cutoff":
            ratios = check[1:][check[:-1] > 0] / check[:-1][check[:-1] > 0]
            r = float(np.max(ratios)) if ratios.size else 0.0
            if not increasing and 0.0 <= r < 1.0:
                tail_bound = f_end * r / (1.0 - r)
                if tail_bound <= tol:
                    return SumResult(head, total_terms, tail_bound)
        else:
            half = float(_eval_terms(term, (start + cutoff) // 2, (start + cutoff) // 2)[0])
            if not increasing and f_end > 0 and half > f_end:
                s = math.log(half / f_end) / math.log(cutoff / ((start + cutoff) // 2))
                if s > 1.0 + 1e-9:
                    a = cutoff + 1.0
                    f_a = float(_eval_terms(term, cutoff + 1, cutoff + 1)[0])
                    tail = f_a * (a / (s - 1.0) + 0.5 + s / (12.0 * a))
                    estimate = head + tail
                    em_next = f_a * s * (s + 1.0) * (s + 2.0) / (720.0 * a**3)
                    if prev_estimate is not None:
                        drift = abs(estimate - prev_estimate)
                        tail_bound = 2.0 * drift + em_next + 8.0 * np.finfo(float).eps * abs(estimate)
                        if tail_bound <= tol:
                            return SumResult(estimate, total_terms, tail_bound)
                    prev_estimate = estimate

        if total_terms >= max_terms:
            raise DivergenceError(
                f"series did not meet the tail tolerance {tol} within {max_terms} terms"
            )
        last_vals = vals
        lo = cutoff + 1
        cutoff = start + 2 * total_terms - 1
