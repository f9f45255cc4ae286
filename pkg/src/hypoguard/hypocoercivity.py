"""Hypocoercive spectral constants and explicit Bernstein parameters.

Given the three model-level constants lambda_p (momentum-direction Poincare
constant), lambda_q (position-direction constant) and R0 (off-diagonal
coupling bound), the modified inner product with parameter eps in (0,1)
yields a coercivity constant Lambda(eps), the smallest eigenvalue of

    [[ eps*lambda_q,  -eps*R0/2    ],
     [ -eps*R0/2,     lambda_p-eps ]].

This module computes Lambda(eps), the admissible eps range, an optimized
eps, and the explicit (v, b, N, alpha) constants used by the confidence
interval and UQ bounds for a bounded observable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bernstein import BernsteinPair

__all__ = [
    "HypoParams",
    "DerivedConstants",
    "ObservableStats",
    "AdmissibilityError",
    "EPS_CAP",
    "lambda_of_eps",
    "eps_max",
    "optimal_eps",
    "lambda_q_from_target",
    "derived_constants",
    "bernstein_from_hypo",
]

# eps = 1 degenerates the norm equivalence (c = sqrt(1-eps) -> 0), so the
# admissible range is capped strictly below 1.
EPS_CAP = 0.999


class AdmissibilityError(ValueError):
    """Raised when Lambda(eps) <= 0, i.e. the parameter set is inadmissible."""


@dataclass(frozen=True)
class HypoParams:
    """Hypocoercivity constants (lambda_p, lambda_q, R0) and the inner-product
    parameter eps."""

    lambda_p: float
    lambda_q: float
    R0: float
    eps: float

    def __post_init__(self) -> None:
        if not self.lambda_p > 0.0:
            raise ValueError(f"lambda_p must be > 0, got {self.lambda_p}")
        if not (0.0 < self.lambda_q <= 1.0):
            raise ValueError(f"lambda_q must be in (0, 1], got {self.lambda_q}")
        if not self.R0 >= 0.0:
            raise ValueError(f"R0 must be >= 0, got {self.R0}")
        if not (0.0 < self.eps < 1.0):
            raise ValueError(f"eps must be in (0, 1), got {self.eps}")


@dataclass(frozen=True)
class DerivedConstants:
    """Constants of the modified inner product: Lambda(eps), the norm
    equivalence factors c = sqrt(1-eps) <= 1 <= C = sqrt(1+eps), and the
    Poincare constant alpha = (1+eps)/Lambda(eps)."""

    Lambda: float
    c: float
    C: float
    alpha: float


@dataclass(frozen=True)
class ObservableStats:
    """Mean, variance and sup norm of the centered observable f - mean."""

    mean: float
    variance: float
    sup_norm: float

    def __post_init__(self) -> None:
        if not self.variance >= 0.0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")
        if not self.sup_norm >= 0.0:
            raise ValueError(f"sup_norm must be >= 0, got {self.sup_norm}")
        # bounded centered observable: Var <= ||f - mean||_inf^2
        if self.variance > self.sup_norm**2 * (1.0 + 1e-12) + 1e-300:
            raise ValueError(
                f"variance {self.variance} exceeds sup_norm^2 = {self.sup_norm**2}"
            )


def _lambda_of(eps: float, lambda_q: float, lambda_p: float, R0: float) -> float:
    disc = ((lambda_q + 1.0) * eps - lambda_p) ** 2 + (eps * R0) ** 2
    return 0.5 * ((lambda_q - 1.0) * eps + lambda_p - math.sqrt(disc))


def lambda_of_eps(params: HypoParams) -> float:
    """Lambda(eps), the smallest eigenvalue of the 2x2 coercivity matrix.

    May be <= 0; callers decide admissibility.
    """
    return _lambda_of(params.eps, params.lambda_q, params.lambda_p, params.R0)


def eps_max(lambda_q: float, lambda_p: float, R0: float, tol: float = 1e-12) -> float:
    """Supremum of the eps in (0, 1) with Lambda(eps) > 0, capped at 1.

    Computed by bisection on Lambda; the analytic threshold
    4*lambda_q*lambda_p / (4*lambda_q + R0^2) is recovered whenever it is
    below 1 (this is checked by the test suite, not assumed here).
    """
    lo = 1e-12
    if _lambda_of(lo, lambda_q, lambda_p, R0) <= 0.0:
        return 0.0
    hi = 1.0
    if _lambda_of(hi, lambda_q, lambda_p, R0) > 0.0:
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _lambda_of(mid, lambda_q, lambda_p, R0) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def optimal_eps(lambda_q: float, lambda_p: float, R0: float, tol: float = 1e-12) -> float:
    """The eps in (0, eps_max) maximizing Lambda(eps), by golden-section search.

    Lambda is unimodal on the admissible interval (concave minus a convex
    square root), so golden-section search is exact up to ``tol``.
    """
    hi = min(eps_max(lambda_q, lambda_p, R0), EPS_CAP)
    if hi <= 0.0:
        raise AdmissibilityError(
            f"no admissible eps for lambda_q={lambda_q}, lambda_p={lambda_p}, R0={R0}"
        )
    lo = 0.0
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1 = _lambda_of(x1, lambda_q, lambda_p, R0)
    f2 = _lambda_of(x2, lambda_q, lambda_p, R0)
    while b - a > tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = _lambda_of(x1, lambda_q, lambda_p, R0)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = _lambda_of(x2, lambda_q, lambda_p, R0)
    return 0.5 * (a + b)


def lambda_q_from_target(C_nu: float, kappa_p: float) -> float:
    """Position-direction constant lambda_q = 1 - (1 + kappa_p * C_nu)^(-1).

    ``C_nu`` is the Poincare constant of the position marginal and
    ``kappa_p`` the per-component second moment of the velocity (E[p_1^2]/m^2;
    equal to 1 for zig-zag velocities, 1/(m*beta) for Gaussian momentum).
    """
    if not C_nu > 0.0:
        raise ValueError(f"C_nu must be > 0, got {C_nu}")
    if not kappa_p > 0.0:
        raise ValueError(f"kappa_p must be > 0, got {kappa_p}")
    return 1.0 - 1.0 / (1.0 + kappa_p * C_nu)


def derived_constants(params: HypoParams) -> DerivedConstants:
    """Lambda, c, C, alpha for an admissible parameter set."""
    lam = lambda_of_eps(params)
    if lam <= 0.0:
        raise AdmissibilityError(
            f"Lambda(eps) = {lam} <= 0 for eps = {params.eps}; "
            f"admissible range is (0, {eps_max(params.lambda_q, params.lambda_p, params.R0)})"
        )
    return DerivedConstants(
        Lambda=lam,
        c=math.sqrt(1.0 - params.eps),
        C=math.sqrt(1.0 + params.eps),
        alpha=(1.0 + params.eps) / lam,
    )


def bernstein_from_hypo(
    params: HypoParams,
    stats: ObservableStats,
    dmu_norm: float = 1.0,
) -> tuple[BernsteinPair, float, DerivedConstants]:
    """Explicit Bernstein constants for a bounded observable:

        v = (1+eps)(1-eps^2/4)/(1-eps) * 2*Var / Lambda(eps)
        b = (1+eps)^2/(1-eps) * sup_norm / Lambda(eps)
        N = dmu_norm / sqrt(1-eps)

    ``dmu_norm`` is the chi-square prefactor ||dmu/dmu*|| of the initial
    distribution (1 for a stationary start).
    """
    if not dmu_norm >= 1.0:
        raise ValueError(f"dmu_norm must be >= 1, got {dmu_norm}")
    der = derived_constants(params)
    eps = params.eps
    v = (1.0 + eps) * (1.0 - eps * eps / 4.0) / (1.0 - eps) * 2.0 * stats.variance / der.Lambda
    b = (1.0 + eps) ** 2 / (1.0 - eps) * stats.sup_norm / der.Lambda
    N = dmu_norm / math.sqrt(1.0 - eps)
    return BernsteinPair(v=v, b=b), N, der
