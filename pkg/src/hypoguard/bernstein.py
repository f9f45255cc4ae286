"""Sub-gamma (Bernstein) moment bound algebra.

The whole guarantee machinery rests on the two-parameter family of convex
functions

    psi_{v,b}(lam) = lam^2 v / (2 (1 - lam b)),   0 <= lam < 1/b,

its one-sided Legendre transform psi*, and the inverse of psi*.  All three
have closed forms and are implemented exactly; no series expansions are used
near the pole lam -> 1/b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["BernsteinPair", "psi", "psi_star", "psi_star_inv"]


@dataclass(frozen=True)
class BernsteinPair:
    """Variance proxy ``v`` and scale ``b`` of a sub-gamma moment bound.

    ``v`` controls the Gaussian regime of the tail, ``b`` the exponential
    regime.  Both must be nonnegative; a pair with ``v == b == 0`` is
    degenerate and rejected by :func:`psi_star`.
    """

    v: float
    b: float

    def __post_init__(self) -> None:
        if not (self.v >= 0.0):
            raise ValueError(f"variance proxy v must be >= 0, got {self.v}")
        if not (self.b >= 0.0):
            raise ValueError(f"scale b must be >= 0, got {self.b}")


def psi(pair: BernsteinPair, lam: float) -> float:
    """Evaluate psi_{v,b}(lam) = lam^2 v / (2 (1 - lam b)).

    Returns ``inf`` for lam*b >= 1 (the bound is vacuous there); raises on
    negative lam.
    """
    if lam < 0.0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if pair.b > 0.0 and lam * pair.b >= 1.0:
        return math.inf
    return lam * lam * pair.v / (2.0 * (1.0 - lam * pair.b))


def psi_star(pair: BernsteinPair, r: float) -> float:
    """One-sided Legendre transform of psi:

        psi*(r) = sup_{0 <= lam < 1/b} { lam r - psi(lam) }
                = 2 r^2 / ( v (1 + sqrt(1 + 2 b r / v))^2 ).

    The v = 0 edge is the analytic limit r/b (the closed form is 0/0 there).
    """
    if r < 0.0:
        raise ValueError(f"deviation r must be >= 0, got {r}")
    if pair.v == 0.0:
        if pair.b == 0.0:
            raise ValueError("degenerate Bernstein pair: v = b = 0")
        return r / pair.b
    root = math.sqrt(1.0 + 2.0 * pair.b * r / pair.v)
    return 2.0 * r * r / (pair.v * (1.0 + root) ** 2)


def psi_star_inv(pair: BernsteinPair, eta: float) -> float:
    """Inverse of the Legendre transform: sqrt(2 v eta) + b eta."""
    if eta < 0.0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    return math.sqrt(2.0 * pair.v * eta) + pair.b * eta
