"""Stochastic verification of the risk formulas.

Simulates the sequence model X_i ~ N(theta_i, sigma_i^2 / n_i), evaluates the
empirical risk of coordinatewise-linear estimators, and probes the ellipsoid
saddle point with random boundary directions.

RNG contract
------------
The generator is Philox (counter-based, splittable, 64-bit seeded).  The
noise of replication r is drawn from its own stream keyed by
``SeedSequence([seed, r])``, so parallel and serial execution orders produce
identical results and a rerun with the same seed is bit-identical.  Standard
normals are produced by inverse-CDF transform (``ndtri``) of the stream's
uniforms; ports that follow the same recipe agree in distribution.  Final
reductions use compensated summation in a fixed index order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .errors import DomainError
from .model import Allocation, SequenceSpec
from . import ellipsoid

__all__ = ["SimConfig", "SimReport", "adversarial_check", "simulate"]


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def _check_seed(seed: int) -> None:
    if not (isinstance(seed, int) and 0 <= seed < 2**64):
        raise DomainError(f"seed must be an integer in [0, 2^64), got {seed!r}")


@dataclass(frozen=True)
class SimConfig:
    """One simulation setup: instance, allocation, true parameter, size, seed.

    ``membership`` optionally requests a set-membership check of ``theta``
    ("ellipsoid" or "hyperrect") before any sampling.
    """

    spec: SequenceSpec
    alloc: Allocation
    theta: tuple[float, ...]
    replications: int
    seed: int
    membership: str | None = None

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise DomainError(f"replications must be >= 1, got {self.replications}")
        _check_seed(self.seed)
        theta = np.asarray(self.theta, dtype=float)
        if theta.size > self.spec.D:
            raise DomainError("theta is longer than the truncation dimension")
        if not np.all(np.isfinite(theta)):
            raise DomainError("theta must be finite")
        if self.membership is not None:
            a = self.spec.a_vec[: theta.size]
            if self.membership == "ellipsoid":
                if float(np.sum((theta / a) ** 2)) > 1.0 + 1e-9:
                    raise DomainError("theta violates the ellipsoid constraint")
            elif self.membership == "hyperrect":
                if np.any(np.abs(theta) > a * (1.0 + 1e-9)):
                    raise DomainError("theta violates the hyperrectangle constraint")
            else:
                raise DomainError(f"unknown membership set {self.membership!r}")


@dataclass(frozen=True)
class SimReport:
    """Empirical vs formula risk of a linear estimator."""

    empirical_risk: float
    std_error: float
    formula_risk: float
    z_score: float

    def to_json(self) -> dict:
        return {
            "empirical_risk": self.empirical_risk,
            "std_error": self.std_error,
            "formula_risk": self.formula_risk,
            "z_score": self.z_score,
        }


def simulate(config: SimConfig, lam: Sequence[float]) -> SimReport:
    """Empirical risk of the estimator theta_hat_i = lam_i X_i at config.theta.

    Coordinates with lam_i = 0 use no data and contribute theta_i^2
    deterministically; every coordinate with lam_i != 0 must carry a positive
    measurement count.
    """
    D = config.spec.D
    lam_v = np.zeros(D)
    lam_in = np.asarray(lam, dtype=float)
    if lam_in.size > D:
        raise DomainError("lambda is longer than the truncation dimension")
    if not np.all(np.isfinite(lam_in)):
        raise DomainError("lambda must be finite")
    lam_v[: lam_in.size] = lam_in
    theta = np.zeros(D)
    th_in = np.asarray(config.theta, dtype=float)
    theta[: th_in.size] = th_in
    n = config.alloc.padded(D)
    s2 = config.spec.sigma2_vec

    active = lam_v != 0.0
    if np.any(active & (n <= 0.0)):
        raise DomainError("lambda is nonzero on a coordinate with zero measurements")

    formula = math.fsum(
        (np.where(active, s2 * lam_v**2 / np.where(active, n, 1.0), 0.0)).tolist()
    ) + math.fsum(((1.0 - lam_v) ** 2 * theta**2).tolist())

    const_part = math.fsum((theta[~active] ** 2).tolist())
    lam_a = lam_v[active]
    th_a = theta[active]
    sd_a = np.sqrt(s2[active] / n[active])

    R = config.replications
    losses = np.empty(R)
    k = int(np.count_nonzero(active))
    for r in range(R):
        if k:
            z = ndtri(_stream(config.seed, r).random(k))
            x = th_a + sd_a * z
            losses[r] = float(np.sum((lam_a * x - th_a) ** 2)) + const_part
        else:
            losses[r] = const_part

    mean = math.fsum(losses.tolist()) / R
    if R > 1:
        var = math.fsum(((losses - mean) ** 2).tolist()) / (R - 1)
        se = math.sqrt(var / R)
    else:
        se = 0.0
    if se > 0.0:
        z_score = (mean - formula) / se
    else:
        z_score = 0.0 if mean == formula else math.inf
    return SimReport(empirical_risk=mean, std_error=se, formula_risk=formula, z_score=z_score)


def adversarial_check(
    spec: SequenceSpec,
    alloc: Allocation | Sequence[float],
    samples: int = 10_000,
    seed: int = 0,
) -> float:
    """Worst excess of inf-over-lambda risks on the ellipsoid boundary.

    Draws ``samples`` points theta on the boundary (a Gaussian direction in
    the theta_i/a_i metric, scaled to the shell), evaluates the closed form
    inf_lambda risk sum_i theta_i^2 sigma_i^2 / (n_i theta_i^2 + sigma_i^2),
    and returns the maximum over draws minus the module's minimax risk; a
    correct saddle point keeps this below 1e-9.
    """
    _check_seed(seed)
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    alloc = Allocation.of(alloc)
    sol = ellipsoid.risk(spec, alloc)
    a = spec.a_vec
    s2 = spec.sigma2_vec
    n = alloc.padded(spec.D)

    g = _stream(seed, 0)
    best = -math.inf
    block = 4096
    done = 0
    while done < samples:
        m = min(block, samples - done)
        z = ndtri(g.random((m, spec.D)))
        norms = np.linalg.norm(z, axis=1)
        norms[norms == 0.0] = 1.0
        theta = a * (z / norms[:, None])
        th2 = theta**2
        vals = np.sum(th2 * s2 / (n * th2 + s2), axis=1)
        best = max(best, float(np.max(vals)))
        done += m
    return best - sol.risk
