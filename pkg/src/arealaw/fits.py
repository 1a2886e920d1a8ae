"""Least-squares fits of entropic area laws.

Every model is linear in all but at most one parameter. The linear ones
are solved directly; the continuum extrapolation scans its exponent on a
fixed grid and solves the remaining linear problem at each grid point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import FitError

EXPONENT_GRID = np.linspace(0.1, 3.0, 2901)


@dataclass(frozen=True)
class FitResult:
    model: str
    params: dict[str, float]
    rss: float
    residuals: np.ndarray = field(repr=False)
    n_points: int

    def __getitem__(self, name: str) -> float:
        return self.params[name]


def interior_mask(lengths, spacing: float, total_length: float | None = None) -> np.ndarray:
    """Drop points within one lattice spacing of either end of the chain."""
    lengths = np.asarray(lengths, dtype=np.float64)
    tol = 1e-9 * spacing
    keep = lengths > spacing + tol
    if total_length is not None:
        keep &= lengths < total_length - spacing - tol
    return keep


def _prepare(x, y, mask=None, min_points: int = 3):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise FitError("abscissae and ordinates must be 1-d arrays of equal length")
    if mask is not None:
        x, y = x[mask], y[mask]
    if x.size < min_points:
        raise FitError(f"need at least {min_points} points, got {x.size}")
    return x, y


def _linear(regressor: np.ndarray, y: np.ndarray):
    """Slope, intercept and residuals of ``y ~ slope * regressor + intercept``."""
    if np.ptp(regressor) == 0.0:
        raise FitError("regressor takes a single value; slope is undetermined")
    design = np.column_stack([regressor, np.ones_like(regressor)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - design @ np.array([slope, intercept])
    return float(slope), float(intercept), residuals


def log_regressor(lengths, spacing):
    return np.log(np.asarray(lengths, dtype=np.float64) / spacing)


def finite_size_regressor(lengths, total_length):
    lengths = np.asarray(lengths, dtype=np.float64)
    return np.log(total_length / (np.pi * lengths) * np.sin(np.pi * lengths / total_length))


def chord_regressor(lengths, total_length, spacing):
    """``ln[L/(pi eps) sin(pi l/L)]``: the log of the chord length in lattice units."""
    lengths = np.asarray(lengths, dtype=np.float64)
    return np.log(total_length / (np.pi * spacing) * np.sin(np.pi * lengths / total_length))


def thermal_regressor(lengths, temperature, spacing):
    lengths = np.asarray(lengths, dtype=np.float64)
    arg = np.pi * temperature * lengths
    # log(sinh(arg)) without overflow for large arguments
    log_sinh = arg + np.log1p(-np.exp(-2.0 * arg)) - np.log(2.0)
    return log_sinh - np.log(np.pi * spacing * temperature)


def fit_log_area_law(lengths, entropies, spacing: float) -> FitResult:
    """``a ln(l/eps) + b``."""
    x, y = _prepare(lengths, entropies, interior_mask(lengths, spacing))
    if np.unique(x).size < 2:
        raise FitError("all region lengths coincide")
    a, b, res = _linear(log_regressor(x, spacing), y)
    return FitResult("log", {"a": a, "b": b}, float(res @ res), res, x.size)


def fit_finite_size(lengths, values, total_length: float, spacing: float | None = None) -> FitResult:
    """``(a/4) ln[L/(pi l) sin(pi l/L)] + b``; a is four times the fitted slope."""
    lengths = np.asarray(lengths, dtype=np.float64)
    if np.any((lengths <= 0) | (lengths >= total_length)):
        raise FitError("finite-size fits need 0 < l < L")
    mask = None if spacing is None else interior_mask(lengths, spacing, total_length)
    x, y = _prepare(lengths, values, mask)
    slope, b, res = _linear(finite_size_regressor(x, total_length), y)
    return FitResult("finite_size", {"a": 4.0 * slope, "b": b}, float(res @ res), res, x.size)


def fit_chord(lengths, values, total_length: float, spacing: float) -> FitResult:
    """``(a/4) ln[L/(pi eps) sin(pi l/L)] + b``, the cutoff-normalized finite-size law."""
    lengths = np.asarray(lengths, dtype=np.float64)
    if np.any((lengths <= 0) | (lengths >= total_length)):
        raise FitError("finite-size fits need 0 < l < L")
    x, y = _prepare(lengths, values, interior_mask(lengths, spacing, total_length))
    slope, b, res = _linear(chord_regressor(x, total_length, spacing), y)
    return FitResult("chord", {"a": 4.0 * slope, "b": b}, float(res @ res), res, x.size)


def fit_thermal(lengths, entropies, temperature: float, spacing: float) -> FitResult:
    """``(c/4) ln[sinh(pi T l)/(pi eps T)] + b``; c is four times the fitted slope."""
    if not temperature > 0:
        raise FitError(f"temperature must be positive, got {temperature!r}")
    x, y = _prepare(lengths, entropies, interior_mask(lengths, spacing))
    slope, b, res = _linear(thermal_regressor(x, temperature, spacing), y)
    return FitResult("thermal", {"c": 4.0 * slope, "b": b}, float(res @ res), res, x.size)


def _rational_at(exponent, eps, y):
    return _linear(eps**exponent, y)


def fit_continuum_extrapolation(spacings, prefactors) -> FitResult:
    """``c1 + c2 eps^c3`` by a grid scan over c3 with a linear solve at each node.

    The best node (smallest c3 on ties) is polished by a bounded scalar
    search within one grid step, kept only if it lowers the residual.
    """
    eps, y = _prepare(spacings, prefactors, min_points=4)
    if np.any(eps <= 0) or np.unique(eps).size != eps.size:
        raise FitError("spacings must be positive and distinct")

    def rss(exponent):
        *_, res = _rational_at(exponent, eps, y)
        return float(res @ res)

    scores = np.array([rss(c3) for c3 in EXPONENT_GRID])
    best = int(np.argmin(scores))
    c3, best_rss = float(EXPONENT_GRID[best]), float(scores[best])
    step = EXPONENT_GRID[1] - EXPONENT_GRID[0]
    lo, hi = max(EXPONENT_GRID[0], c3 - step), min(EXPONENT_GRID[-1], c3 + step)
    polished = minimize_scalar(rss, bounds=(lo, hi), method="bounded",
                               options={"xatol": 1e-12})
    if polished.success and polished.fun < best_rss:
        c3 = float(polished.x)
    c2, c1, res = _rational_at(c3, eps, y)
    return FitResult("continuum", {"c1": c1, "c2": c2, "c3": c3}, float(res @ res), res, eps.size)
