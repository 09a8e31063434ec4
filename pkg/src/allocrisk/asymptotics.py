"""Closed-form asymptotic constants and limit risk ratios for power-law classes.

For the power-law family a_i^2 = Q i^(-2 alpha) (ellipsoid) or
a_i^2 = Q i^(-(2 alpha + 1)) (hyperrectangle) with sigma_i^2 = sigma^2 i^(2 beta),
the large-budget risks behave like coef * n^rate for explicit coefficients
built from the beta function.  This module evaluates those coefficients, the
two limit risk ratios comparing a re-allocation against the uniform scheme,
the sub-unit region of the ellipsoid ratio, and the two beta-function
inequalities the ratios imply.

Everything is computed in log space (sums of log-gamma terms) so the corner
cases alpha ~ 50, beta ~ 10 stay well inside double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .numerics import beta as beta_fn
from .numerics import log_beta, minimize_scalar_bounded

__all__ = [
    "ConstantsReport",
    "ContourStudy",
    "InequalityCheck",
    "SobolevParams",
    "SparseConjecture",
    "TABLE_ALPHAS",
    "TABLE_BETAS",
    "beta_inequality_ellipsoid",
    "beta_inequality_hyperrect",
    "beta_sum_asymptotic",
    "constants",
    "contour_grid",
    "ellipsoid_sub_dim_coef",
    "ellipsoid_sub_risk_coef",
    "ellipsoid_uniform_dim_coef",
    "ellipsoid_uniform_risk_coef",
    "hyperrect_opt_dim_coef",
    "hyperrect_opt_risk_coef",
    "hyperrect_trunc_uniform_risk_coef",
    "hyperrect_uniform_risk_coef",
    "rho_ellipsoid",
    "rho_ellipsoid_forms",
    "rho_hyperrect",
    "rho_hyperrect_forms",
    "sparse_conjecture",
]

# (alpha, beta) points of the published 5 x 8 risk-ratio tables
TABLE_ALPHAS: tuple[float, ...] = (0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 48.0)
TABLE_BETAS: tuple[float, ...] = (0.0, 0.5, 1.0, 3.0, 10.0)

RHO_MIN_DEFAULT = 0.998477  # observed minimum of the ellipsoid ratio over its domain


@dataclass(frozen=True)
class SobolevParams:
    """Smoothness alpha > 0 and ill-posedness beta > -1/2 of a power-law class."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if not (math.isfinite(self.beta) and self.beta > -0.5):
            raise DomainError(f"beta must be > -0.5, got {self.beta}")


@dataclass(frozen=True)
class ConstantsReport:
    """One asymptotic coefficient: quantity ~ value * n**rate as n grows."""

    name: str
    alpha: float
    beta: float
    value: float
    rate: float


def ellipsoid_sub_risk_coef(alpha: float, beta: float) -> float:
    """Risk coefficient of the proportional budget-n allocation on the ellipsoid.

    coef = (B(x, 3/2)^2 / alpha^2)^(alpha/(alpha+beta+1))
           * ((3 alpha + 2 beta + 2)/(2 beta + 2))^((beta+1)/(alpha+beta+1)),
    x = (beta+1)/alpha; the risk behaves like coef * n^(-alpha/(alpha+beta+1)).
    """
    p = SobolevParams(alpha, beta)
    s = p.alpha + p.beta + 1.0
    lb = log_beta((p.beta + 1.0) / p.alpha, 1.5)
    log_val = (p.alpha / s) * (2.0 * lb - 2.0 * math.log(p.alpha)) + (
        (p.beta + 1.0) / s
    ) * math.log((3.0 * p.alpha + 2.0 * p.beta + 2.0) / (2.0 * p.beta + 2.0))
    return math.exp(log_val)


def ellipsoid_uniform_risk_coef(alpha: float, beta: float) -> float:
    """Risk coefficient of the uniform allocation on the ellipsoid.

    The risk behaves like coef * n^(-2 alpha/(2 alpha + 2 beta + 1)); at
    beta = 0 this is the Pinsker constant.
    """
    p = SobolevParams(alpha, beta)
    s = 2.0 * p.alpha + 2.0 * p.beta + 1.0
    log_val = (
        ((2.0 * p.beta + 1.0) / s) * math.log(s)
        - math.log(2.0 * p.beta + 1.0)
        + (2.0 * p.alpha / s) * math.log(p.alpha / (p.alpha + 2.0 * p.beta + 1.0))
    )
    return math.exp(log_val)


def ellipsoid_uniform_dim_coef(alpha: float, beta: float) -> float:
    """Active-dimension coefficient under uniform allocation: d ~ coef * n^(1/(2a+2b+1))."""
    p = SobolevParams(alpha, beta)
    s = 2.0 * p.alpha + 2.0 * p.beta + 1.0
    return (s * (p.alpha + 2.0 * p.beta + 1.0) / p.alpha) ** (1.0 / s)


def ellipsoid_sub_dim_coef(alpha: float, beta: float) -> float:
    """Active-dimension coefficient of the proportional allocation: d ~ coef * n^(1/(2(a+b+1)))."""
    p = SobolevParams(alpha, beta)
    lb = log_beta((p.beta + 1.0) / p.alpha, 1.5)
    log_inner = (
        2.0 * math.log(p.alpha)
        + math.log(3.0 * p.alpha + 2.0 * p.beta + 2.0)
        - math.log(2.0 * (p.beta + 1.0))
        - 2.0 * lb
    )
    return math.exp(log_inner / (2.0 * (p.alpha + p.beta + 1.0)))


def hyperrect_opt_dim_coef(alpha: float, beta: float) -> float:
    """Active-dimension coefficient of the hyperrectangle optimum: d ~ coef * n^(1/(2a+2b+2))."""
    p = SobolevParams(alpha, beta)
    inner = (
        2.0
        * (p.beta + 1.0)
        * (p.alpha + p.beta + 1.0)
        / (2.0 * p.alpha + p.beta + 1.0)
    )
    return inner ** (1.0 / (2.0 * p.alpha + 2.0 * p.beta + 2.0))


def hyperrect_opt_risk_coef(alpha: float, beta: float) -> float:
    """Risk coefficient of the hyperrectangle optimum: risk ~ coef * n^(-a/(a+b+1))."""
    p = SobolevParams(alpha, beta)
    s = p.alpha + p.beta + 1.0
    lead = (2.0 * p.alpha + p.beta + 1.0) / (2.0 * p.alpha * (p.beta + 1.0))
    inner = (2.0 * p.alpha + p.beta + 1.0) / (2.0 * (p.beta + 1.0) * s)
    return lead * inner ** (p.alpha / s)


def hyperrect_uniform_risk_coef(alpha: float, beta: float) -> float:
    """Risk coefficient of the uniform allocation on the hyperrectangle.

    coef = B(2a/(2a+2b+1), (2b+1)/(2a+2b+1)) / (2a+2b+1); the risk behaves
    like coef * n^(-2a/(2a+2b+1)).
    """
    p = SobolevParams(alpha, beta)
    s = 2.0 * p.alpha + 2.0 * p.beta + 1.0
    return beta_fn(2.0 * p.alpha / s, (2.0 * p.beta + 1.0) / s) / s


def hyperrect_trunc_uniform_risk_coef(alpha: float, beta: float) -> float:
    """Risk coefficient of the best budget-matched truncated uniform allocation."""
    p = SobolevParams(alpha, beta)
    s = 2.0 * p.alpha + 2.0 * p.beta + 1.0
    log_unif = math.log(hyperrect_uniform_risk_coef(alpha, beta))
    log_val = (
        math.log((p.alpha + p.beta + 1.0) / p.alpha)
        + (s / (s + 1.0)) * (math.log(2.0 * p.alpha) + log_unif - math.log(s))
    )
    return math.exp(log_val)


def rho_ellipsoid_forms(params: SobolevParams) -> tuple[float, float]:
    """Both evaluation routes of the ellipsoid risk ratio: (composed, expanded).

    The composed route multiplies the three ellipsoid coefficients; the
    expanded route is the single closed form.  They are mathematically equal
    and guard each other's implementations.
    """
    a, b = params.alpha, params.beta
    s = a + b + 1.0
    composed = (
        ellipsoid_uniform_risk_coef(a, b)
        * ellipsoid_uniform_dim_coef(a, b) ** (a / s)
        / ellipsoid_sub_risk_coef(a, b)
    )
    lb = log_beta((b + 1.0) / a, 1.5)
    log_expanded = (
        -math.log(2.0 * b + 1.0)
        + ((b + 1.0) / s)
        * math.log(2.0 * (b + 1.0) * (2.0 * a + 2.0 * b + 1.0) / (3.0 * a + 2.0 * b + 2.0))
        + (a / s) * (3.0 * math.log(a) - 2.0 * lb - math.log(a + 2.0 * b + 1.0))
    )
    return composed, math.exp(log_expanded)


def rho_ellipsoid(params: SobolevParams) -> float:
    """Limit risk ratio of the uniform scheme over the proportional re-allocation."""
    composed, expanded = rho_ellipsoid_forms(params)
    if abs(composed - expanded) > 1e-10 * max(abs(expanded), 1.0):
        raise ArithmeticError(
            f"risk-ratio forms disagree at ({params.alpha}, {params.beta}): "
            f"{composed!r} vs {expanded!r}"
        )
    return expanded


def rho_hyperrect_forms(params: SobolevParams) -> tuple[float, float]:
    """Both evaluation routes of the hyperrectangle risk ratio: (composed, closed)."""
    a, b = params.alpha, params.beta
    s = a + b + 1.0
    s2 = 2.0 * a + 2.0 * b + 1.0
    lb = log_beta(2.0 * a / s2, (2.0 * b + 1.0) / s2)
    log_val = ((2.0 * a + b + 1.0) / s) * math.log(
        2.0 * (b + 1.0) * s / (2.0 * a + b + 1.0)
    ) + (s2 / (2.0 * s)) * (math.log(2.0 * a) + lb - 2.0 * math.log(s2))
    composed = hyperrect_trunc_uniform_risk_coef(a, b) / hyperrect_opt_risk_coef(a, b)
    return composed, math.exp(log_val)


def rho_hyperrect(params: SobolevParams) -> float:
    """Limit risk ratio of the best truncated uniform scheme over the optimum."""
    composed, printed = rho_hyperrect_forms(params)
    if abs(composed - printed) > 1e-10 * max(abs(printed), 1.0):
        raise ArithmeticError(
            f"risk-ratio forms disagree at ({params.alpha}, {params.beta}): "
            f"{composed!r} vs {printed!r}"
        )
    return printed


_CONSTANT_FUNCS = {
    "ellipsoid_sub_risk": (ellipsoid_sub_risk_coef, lambda a, b: -a / (a + b + 1.0)),
    "ellipsoid_uniform_risk": (
        ellipsoid_uniform_risk_coef,
        lambda a, b: -2.0 * a / (2.0 * a + 2.0 * b + 1.0),
    ),
    "ellipsoid_uniform_dim": (
        ellipsoid_uniform_dim_coef,
        lambda a, b: 1.0 / (2.0 * a + 2.0 * b + 1.0),
    ),
    "ellipsoid_sub_dim": (
        ellipsoid_sub_dim_coef,
        lambda a, b: 1.0 / (2.0 * (a + b + 1.0)),
    ),
    "hyperrect_opt_risk": (hyperrect_opt_risk_coef, lambda a, b: -a / (a + b + 1.0)),
    "hyperrect_uniform_risk": (
        hyperrect_uniform_risk_coef,
        lambda a, b: -2.0 * a / (2.0 * a + 2.0 * b + 1.0),
    ),
    "hyperrect_trunc_uniform_risk": (
        hyperrect_trunc_uniform_risk_coef,
        lambda a, b: -a / (a + b + 1.0),
    ),
    "hyperrect_opt_dim": (
        hyperrect_opt_dim_coef,
        lambda a, b: 1.0 / (2.0 * a + 2.0 * b + 2.0),
    ),
    "rho_ellipsoid": (lambda a, b: rho_ellipsoid(SobolevParams(a, b)), lambda a, b: 0.0),
    "rho_hyperrect": (lambda a, b: rho_hyperrect(SobolevParams(a, b)), lambda a, b: 0.0),
}


def constants(params: SobolevParams) -> tuple[ConstantsReport, ...]:
    """Every asymptotic coefficient at the given parameters."""
    out = []
    for name, (func, rate) in _CONSTANT_FUNCS.items():
        out.append(
            ConstantsReport(
                name=name,
                alpha=params.alpha,
                beta=params.beta,
                value=float(func(params.alpha, params.beta)),
                rate=float(rate(params.alpha, params.beta)),
            )
        )
    return tuple(out)


def beta_sum_asymptotic(alpha: float, beta: float, kappa: float, M: float) -> float:
    """Leading term of sum_k k^beta (1 - k^alpha/M)_+^kappa as M grows.

    Equals B((beta+1)/alpha, kappa+1) * M^((beta+1)/alpha) / alpha for
    alpha > 0 and beta, kappa > -1.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    if not beta > -1:
        raise DomainError(f"beta must be > -1, got {beta}")
    if not kappa > -1:
        raise DomainError(f"kappa must be > -1, got {kappa}")
    if not M > 0:
        raise DomainError(f"M must be > 0, got {M}")
    x = (beta + 1.0) / alpha
    return math.exp(log_beta(x, kappa + 1.0) + x * math.log(M)) / alpha


@dataclass(frozen=True)
class InequalityCheck:
    """Both sides of a beta-function inequality and whether it holds."""

    lhs: float
    rhs: float
    holds: bool


def beta_inequality_ellipsoid(
    params: SobolevParams, rho_o: float = RHO_MIN_DEFAULT
) -> InequalityCheck:
    """Conjectured bound B((b+1)/a, 1/2)^2 <= rhs(a, b; rho_o).

    Equivalent to the ellipsoid risk ratio staying above rho_o; treated as a
    conjecture, so callers report violations rather than asserting.
    """
    a, b = params.alpha, params.beta
    lhs = math.exp(2.0 * log_beta((b + 1.0) / a, 0.5))
    log_rhs = (
        -math.log(rho_o)
        + math.log(a)
        + 2.0 * math.log(a + 2.0 * b + 2.0)
        - math.log(2.0 * b + 1.0)
        - math.log(a + 2.0 * b + 1.0)
        + ((b + 1.0) / a)
        * (
            -math.log(rho_o)
            + math.log(2.0 * (b + 1.0) * (2.0 * a + 2.0 * b + 1.0))
            - math.log((2.0 * b + 1.0) * (3.0 * a + 2.0 * b + 2.0))
        )
    )
    rhs = math.exp(log_rhs)
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs)


def beta_inequality_hyperrect(params: SobolevParams) -> InequalityCheck:
    """Proven bound B(2a/(2a+2b+1), (2b+1)/(2a+2b+1)) >= rhs(a, b)."""
    a, b = params.alpha, params.beta
    s2 = 2.0 * a + 2.0 * b + 1.0
    lhs = beta_fn(2.0 * a / s2, (2.0 * b + 1.0) / s2)
    log_rhs = -math.log(2.0 * a) + 2.0 * math.log(
        s2 * (2.0 * a + b + 1.0) / (2.0 * (b + 1.0) * (a + b + 1.0))
    )
    rhs = math.exp(log_rhs)
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=lhs >= rhs)


@dataclass(frozen=True)
class ContourStudy:
    """Dense evaluation of the ellipsoid risk ratio over a parameter window."""

    alphas: np.ndarray  # log-spaced grid, shape (W,)
    betas: np.ndarray  # linear grid, shape (H,)
    values: np.ndarray  # rho values, shape (H, W): rows follow beta
    sub_unit_points: tuple[tuple[float, float], ...]  # grid points with rho < 1
    min_alpha: float
    min_beta: float
    min_value: float

    @property
    def sub_unit_bbox(self) -> tuple[float, float, float, float] | None:
        """(alpha_min, alpha_max, beta_min, beta_max) of the rho < 1 points."""
        if not self.sub_unit_points:
            return None
        al = [p[0] for p in self.sub_unit_points]
        be = [p[1] for p in self.sub_unit_points]
        return (min(al), max(al), min(be), max(be))


def contour_grid(
    alpha_range: tuple[float, float] = (0.02, 3.0),
    beta_range: tuple[float, float] = (0.5, 2.2),
    resolution: tuple[int, int] = (400, 400),
) -> ContourStudy:
    """Grid of the ellipsoid risk ratio plus its refined minimum.

    Alphas are log-spaced (the sub-unit region sits at small alpha), betas
    linear.  The grid argmin is polished by alternating golden-section
    searches in each coordinate over a shrinking window.
    """
    a_lo, a_hi = alpha_range
    b_lo, b_hi = beta_range
    if not (0 < a_lo < a_hi):
        raise DomainError(f"invalid alpha range {alpha_range}")
    if not (-0.5 < b_lo < b_hi):
        raise DomainError(f"invalid beta range {beta_range}")
    W, H = resolution
    if W < 2 or H < 2:
        raise DomainError(f"resolution must be at least 2x2, got {resolution}")
    alphas = np.exp(np.linspace(math.log(a_lo), math.log(a_hi), W))
    betas = np.linspace(b_lo, b_hi, H)
    values = np.empty((H, W))
    for j, b in enumerate(betas):
        row = values[j]
        for i, a in enumerate(alphas):
            row[i] = rho_ellipsoid(SobolevParams(float(a), float(b)))

    sub = np.argwhere(values < 1.0)
    points = tuple(
        (float(alphas[i]), float(betas[j])) for j, i in map(tuple, sub)
    )

    j0, i0 = np.unravel_index(int(np.argmin(values)), values.shape)
    a_star, b_star = float(alphas[i0]), float(betas[j0])
    a_step = a_star * (math.log(a_hi) - math.log(a_lo)) / (W - 1)
    b_step = (b_hi - b_lo) / (H - 1)
    wa, wb = 2.0 * a_step, 2.0 * b_step
    val_star = float(values[j0, i0])
    for _ in range(12):
        lo = max(a_lo * 0.5, a_star - wa)
        a_star, _ = minimize_scalar_bounded(
            lambda a: rho_ellipsoid(SobolevParams(a, b_star)), lo, a_star + wa, tol=1e-12
        )
        lo_b = max(-0.499, b_star - wb)
        b_star, val_star = minimize_scalar_bounded(
            lambda b: rho_ellipsoid(SobolevParams(a_star, b)), lo_b, b_star + wb, tol=1e-12
        )
        wa *= 0.5
        wb *= 0.5

    values.setflags(write=False)
    return ContourStudy(
        alphas=alphas,
        betas=betas,
        values=values,
        sub_unit_points=points,
        min_alpha=a_star,
        min_beta=b_star,
        min_value=val_star,
    )


@dataclass(frozen=True)
class SparseConjecture:
    """Conjectured optimal allocation and risk for nearly-black vectors.

    The risk value rests on an unproven asymptotic equivalence; every report
    carries the ``conjectured`` flag.
    """

    alloc: np.ndarray
    risk: float
    conjectured: bool = True


def sparse_conjecture(
    sigma: Sequence[float], p: int, N: int, n: float
) -> SparseConjecture:
    """Budget-n allocation minimizing the conjectured sparse-class risk.

    Splits the budget over the first p coordinates proportionally to
    sigma_i; the conjectured risk is 2 log(N) (sum_{i<=p} sigma_i)^2 / n.
    """
    if not (isinstance(p, int) and isinstance(N, int) and 0 < p < N):
        raise DomainError(f"need integers 0 < p < N, got p={p!r}, N={N!r}")
    if not n > 0:
        raise DomainError(f"budget must be positive, got {n}")
    sig = np.asarray(sigma, dtype=float)
    if sig.size < p:
        raise DomainError(f"sigma must provide at least p={p} entries, got {sig.size}")
    head = sig[:p]
    if np.any(head <= 0) or np.any(np.diff(head) > 0):
        raise DomainError("sigma must be positive and nonincreasing over i <= p")
    total = math.fsum(head.tolist())
    alloc = np.zeros(N)
    alloc[:p] = n * head / total
    alloc.setflags(write=False)
    return SparseConjecture(alloc=alloc, risk=2.0 * math.log(N) * total**2 / n)
