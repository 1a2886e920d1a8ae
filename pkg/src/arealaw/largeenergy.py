"""Analytic targets for fast, heavy particles.

When the excitation carries a large energy the local non-Gaussian factor
U(r) becomes a polynomial in the volume fraction ``x = l/L`` alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction as F

from numpy.polynomial import polynomial as P

from .quadform import DistributionKind

# coefficients of 1, x, x^2, ... ; the two marginals share a row
_MARGINAL = {
    2: (F(1), F(-1), F(3, 4)),
    3: (F(1), F(-2), F(2), F(-4, 9)),
    4: (F(1), F(-3), F(33, 8), F(-37, 16), F(153, 256)),
}
_WIGNER = {
    2: (F(1), F(-2), F(2)),
    3: (F(1), F(-4), F(20, 3), F(-32, 9)),
    4: (F(1), F(-6), F(15), F(-17), F(15, 2)),
}


@dataclass(frozen=True)
class ScalingPrediction:
    kind: DistributionKind
    r: int
    coefficients: tuple[F, ...]

    def __call__(self, x: float) -> float:
        return float(P.polyval(x, [float(c) for c in self.coefficients]))


def scaling_prediction(kind: DistributionKind, r: int) -> ScalingPrediction:
    if kind is DistributionKind.WIGNER:
        table = _WIGNER
    elif kind in (DistributionKind.FIELD, DistributionKind.MOMENTUM):
        table = _MARGINAL
    else:
        raise ValueError("Husimi polynomials exist only for r=2; use predicted_u_husimi_r2")
    if r not in table:
        raise ValueError(f"no closed form for r={r}")
    return ScalingPrediction(kind, r, table[r])


def _check_fraction(x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"volume fraction must lie in [0, 1], got {x!r}")


def predicted_u(kind: DistributionKind, r: int, x: float) -> float:
    _check_fraction(x)
    return scaling_prediction(kind, r)(x)


def predicted_u_husimi_r2(x: float, eps_omega: float) -> float:
    """Finite-spacing Husimi ``U(2)``; ``eps_omega`` is spacing times particle frequency."""
    _check_fraction(x)
    if eps_omega < 0:
        raise ValueError(f"eps*omega must be non-negative, got {eps_omega!r}")
    bracket = 1.0 + (2.0 - 5.0 / 6.0 * eps_omega + 2.0 * eps_omega**2) / (1.0 + eps_omega) ** 2
    return 1.0 - x + 0.25 * bracket * x**2


def predicted_delta_s(kind: DistributionKind, r: int, x: float) -> float:
    """``ln U(r) / (1 - r)`` from the polynomial table."""
    return math.log(predicted_u(kind, r, x)) / (1.0 - r)


def small_interval_slope(kind: DistributionKind) -> int:
    return 2 if kind is DistributionKind.WIGNER else 1


def predicted_small_interval(kind: DistributionKind, r: int, x: float) -> float:
    """Leading linear growth of the non-Gaussian entropy, independent of r."""
    if r not in (2, 3, 4):
        raise ValueError(f"order must be 2, 3 or 4, got {r!r}")
    _check_fraction(x)
    return small_interval_slope(kind) * x
