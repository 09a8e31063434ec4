"""Minimax linear risk over hyperrectangles {theta : |theta_i| <= a_i}.

The risk decouples across coordinates,

    R(n) = sum_i sigma_i^2 / (n_i + sigma_i^2 a_i^{-2}),

so a coordinate with zero measurements contributes exactly a_i^2 and the
risk is always finite for square-summable a.  The budget-n optimum is a
water-filling: with c_i = sigma_i^2 a_i^{-2} and water level
w = (n + sum_active c_k) / sum_active sigma_k, active coordinates receive
n_i = sigma_i w - c_i.  Activity is governed by the key sigma_i a_i^{-2}:
when the key is nondecreasing the active set is the prefix

    d_o = max{k : sum_{i<=k} sigma_i (sigma_k a_k^{-2} - sigma_i a_i^{-2}) <= n},

and for a general key the same prefix rule applies after sorting the
coordinates by the key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, TruncationError
from .model import Allocation, ExpSeq, SequenceSpec
from .numerics import SumResult, sum_series

__all__ = [
    "HyperrectSolution",
    "optimal_allocation",
    "optimal_allocation_general",
    "risk",
    "tail_energy",
    "truncated_uniform_best",
    "uniform_risk",
]


@dataclass(frozen=True)
class HyperrectSolution:
    """Optimal allocation, its active index set (1-based), and the risk split."""

    alloc: Allocation
    active: tuple[int, ...]
    risk: float
    risk_tail: float
    lagrange_mu: float

    @property
    def active_dim(self) -> int:
        return len(self.active)


def _tail_policy(spec: SequenceSpec) -> str:
    return "cutoff" if isinstance(spec.a, ExpSeq) else "analytic-power-tail"


def tail_energy(spec: SequenceSpec, from_index: int) -> float:
    """sum_{i > from_index} a_i^2, zero for explicit (finite) specs."""
    if not spec.has_tail:
        return 0.0

    def term(i: np.ndarray) -> np.ndarray:
        return np.asarray(spec.a_at(i), dtype=float) ** 2

    res: SumResult = sum_series(
        term,
        start=from_index + 1,
        tail_policy=_tail_policy(spec),
        tol=max(spec.tail_tol, 1e-14),
    )
    return res.value


def risk(spec: SequenceSpec, alloc: Allocation | Sequence[float]) -> float:
    """Minimax linear risk of ``alloc``; coordinates past its length get a_i^2."""
    n = Allocation.of(alloc).padded(spec.D)
    c = spec.sigma2_vec / spec.a_vec**2
    head = math.fsum((spec.sigma2_vec / (n + c)).tolist())
    return head + tail_energy(spec, spec.D)


def uniform_risk(spec: SequenceSpec, k: float) -> float:
    """Risk of the (untruncated) uniform allocation n_i = k for every i."""
    if not k > 0:
        raise DomainError(f"uniform level must be positive, got {k}")
    c = spec.sigma2_vec / spec.a_vec**2
    head = math.fsum((spec.sigma2_vec / (k + c)).tolist())
    if not spec.has_tail:
        return head

    def term(i: np.ndarray) -> np.ndarray:
        s2 = np.asarray(spec.sigma2_at(i), dtype=float)
        a2 = np.asarray(spec.a_at(i), dtype=float) ** 2
        return s2 / (k + s2 / a2)

    res = sum_series(
        term,
        start=spec.D + 1,
        tail_policy=_tail_policy(spec),
        tol=max(spec.tail_tol, 1e-14),
    )
    return head + res.value


def _prefix_rule(sig: np.ndarray, c: np.ndarray, key: np.ndarray, n: float) -> int:
    # number of active coordinates in key-sorted order: largest k with
    # key_k * sum_{i<=k} sigma_i - sum_{i<=k} c_i <= n
    gvals = key * np.cumsum(sig) - np.cumsum(c)
    return int(np.searchsorted(gvals, n, side="right"))


def _water_fill(
    sig: np.ndarray, c: np.ndarray, n: float, d: int
) -> tuple[np.ndarray, float]:
    S = math.fsum(sig[:d].tolist())
    P = math.fsum(c[:d].tolist())
    w = (n + P) / S
    filled = np.clip(sig[:d] * w - c[:d], 0.0, None)
    return filled, w


def optimal_allocation(spec: SequenceSpec, n: float) -> HyperrectSolution:
    """Exact budget-n optimum when sigma_i a_i^{-2} is nondecreasing."""
    if not n > 0:
        raise DomainError(f"budget must be positive, got {n}")
    a = spec.a_vec
    sig = spec.sigma_vec
    c = spec.sigma2_vec / a**2
    key = sig / a**2
    if np.any(np.diff(key) < -1e-12 * max(float(key.max()), 1.0)):
        raise DomainError(
            "sigma_i * a_i^-2 is not nondecreasing; use optimal_allocation_general"
        )
    d_o = max(_prefix_rule(sig, c, key, n), 1)
    if d_o == spec.D and spec.has_tail:
        sig_next = math.sqrt(float(spec.sigma2_at(spec.D + 1)))
        key_next = sig_next / float(spec.a_at(spec.D + 1)) ** 2
        g_next = key_next * (math.fsum(sig.tolist()) + sig_next) - (
            math.fsum(c.tolist()) + sig_next * key_next
        )
        if g_next <= n:
            raise TruncationError(
                "the optimal active set reaches past the truncation dimension D; increase D"
            )
    filled, w = _water_fill(sig, c, n, d_o)
    head = math.fsum(sig[:d_o].tolist()) ** 2 / (n + math.fsum(c[:d_o].tolist()))
    inside = math.fsum((a[d_o:] ** 2).tolist())
    tail = inside + tail_energy(spec, spec.D)
    alloc = np.zeros(spec.D)
    alloc[:d_o] = filled
    return HyperrectSolution(
        alloc=Allocation.of(alloc),
        active=tuple(range(1, d_o + 1)),
        risk=head + tail,
        risk_tail=tail,
        lagrange_mu=w**-2,
    )


def optimal_allocation_general(spec: SequenceSpec, n: float) -> HyperrectSolution:
    """Budget-n optimum for arbitrary positive sigma_i a_i^{-2}.

    Sorts coordinates by the key, applies the prefix rule in sorted order,
    and maps the active set back; the defining inequality
    sum_{k in M} sigma_k (sigma_i a_i^{-2} - sigma_k a_k^{-2}) <= n
    is asserted for every i in M afterwards.
    """
    if not n > 0:
        raise DomainError(f"budget must be positive, got {n}")
    a = spec.a_vec
    sig = spec.sigma_vec
    c = spec.sigma2_vec / a**2
    key = sig / a**2
    order = np.argsort(key, kind="stable")
    d_sorted = max(_prefix_rule(sig[order], c[order], key[order], n), 1)
    if d_sorted == spec.D and spec.has_tail:
        raise TruncationError(
            "the optimal active set may reach past the truncation dimension D; increase D"
        )
    active_idx = np.sort(order[:d_sorted])
    S = math.fsum(sig[active_idx].tolist())
    P = math.fsum(c[active_idx].tolist())
    w = (n + P) / S
    worst = float(np.max(key[active_idx]))
    if worst * S - P > n * (1.0 + 1e-9) + 1e-12:
        raise DomainError(
            "water-filling active set violates its defining inequality; "
            "this indicates an invalid instance"
        )
    alloc = np.zeros(spec.D)
    alloc[active_idx] = np.clip(sig[active_idx] * w - c[active_idx], 0.0, None)
    inactive = np.setdiff1d(np.arange(spec.D), active_idx)
    inside = math.fsum((a[inactive] ** 2).tolist())
    tail = inside + tail_energy(spec, spec.D)
    head = S**2 / (n + P)
    return HyperrectSolution(
        alloc=Allocation.of(alloc),
        active=tuple(int(i) + 1 for i in active_idx),
        risk=head + tail,
        risk_tail=tail,
        lagrange_mu=w**-2,
    )


def truncated_uniform_best(spec: SequenceSpec, n: float) -> tuple[int, float, float]:
    """Best truncated uniform allocation k * 1_d under the budget k*d <= n.

    The risk decreases in k, so the budget binds and k = n/d; the scan over
    d stops once a monotone lower bound on the head term alone exceeds the
    best risk seen (every larger d is then certifiably worse).
    """
    if not n > 0:
        raise DomainError(f"budget must be positive, got {n}")
    a2 = spec.a_vec**2
    s2 = spec.sigma2_vec
    c = s2 / a2
    # tails[d] = sum_{i>d} a_i^2 for d = 0..D, accumulated backwards
    beyond = tail_energy(spec, spec.D)
    tails = np.empty(spec.D + 1)
    tails[spec.D] = beyond
    for d in range(spec.D - 1, -1, -1):
        tails[d] = tails[d + 1] + a2[d]

    m = min(8, spec.D)
    best: tuple[int, float, float] | None = None
    for d in range(1, spec.D + 1):
        k = n / d
        head = math.fsum((s2[:d] / (k + c[:d])).tolist())
        value = head + float(tails[d])
        if best is None or value < best[2]:
            best = (d, k, value)
        if d >= m:
            head_lb = float(np.sum(s2[:m] / (k + c[:m])))
            if head_lb > best[2]:
                return best
    if spec.has_tail:
        raise TruncationError(
            "truncated-uniform scan reached the truncation dimension D without "
            "certifying the optimum; increase D"
        )
    return best
