"""Global covariance matrices of Gaussian lattice states.

Matrices are kept in the weighted convention ``G = eps * gamma``: with the
fields rescaled by ``sqrt(eps)`` every eps-weighted lattice sum, inverse and
determinant turns into the ordinary matrix operation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import toeplitz

from . import kernels
from .lattice import LatticeSpec, dispersion, momentum_indices

#: above this value of omega/T the Bose factor equals its ground value to double precision
_BOSE_SWITCH = 30.0


class Sector(enum.Enum):
    FIELD = "f"
    MOMENTUM = "g"


@dataclass(frozen=True, eq=False)
class WeightedCovariance:
    """Symmetric Toeplitz covariance of one field sector, stored by its first row."""

    sector: Sector
    first_row: np.ndarray
    spec: LatticeSpec = field(repr=False)

    def __post_init__(self):
        row = np.array(self.first_row, dtype=np.float64)
        if row.shape != (self.spec.n_sites,):
            raise ValueError(f"first row must have length {self.spec.n_sites}")
        row.setflags(write=False)
        object.__setattr__(self, "first_row", row)

    @cached_property
    def entries(self) -> np.ndarray:
        dense = toeplitz(self.first_row)
        dense.setflags(write=False)
        return dense

    def shifted(self, diagonal: float) -> "WeightedCovariance":
        row = self.first_row.copy()
        row[0] += diagonal
        return WeightedCovariance(self.sector, row, self.spec)


@dataclass(frozen=True)
class CovariancePair:
    """Field and momentum-field covariances of one state.

    The phase-space covariance is their direct sum and is never assembled.
    """

    f: WeightedCovariance
    g: WeightedCovariance
    state: str

    def sector(self, which: Sector) -> WeightedCovariance:
        return self.f if which is Sector.FIELD else self.g


def bose_factor(omega, temperature):
    """``1 + 2 n(omega) = coth(omega / 2T)`` with an overflow-free tail."""
    ratio = np.asarray(omega, dtype=np.float64) / temperature
    tail = ratio > _BOSE_SWITCH
    safe = np.where(tail, 1.0, ratio)
    return np.where(tail, 1.0 + 2.0 * np.exp(-np.where(tail, ratio, 0.0)),
                    1.0 / np.tanh(0.5 * safe))


def _pair_from_weights(spec, field_weights, momentum_weights, state):
    ks = momentum_indices(spec)
    n = spec.n_sites
    f_row = kernels.cosine_row(np.ascontiguousarray(field_weights, dtype=np.float64), ks, n)
    g_row = kernels.cosine_row(np.ascontiguousarray(momentum_weights, dtype=np.float64), ks, n)
    return CovariancePair(
        WeightedCovariance(Sector.FIELD, f_row, spec),
        WeightedCovariance(Sector.MOMENTUM, g_row, spec),
        state,
    )


def ground_covariance(spec: LatticeSpec) -> CovariancePair:
    omega = dispersion(spec, momentum_indices(spec))
    return _pair_from_weights(spec, 0.5 / omega, 0.5 * omega, "ground")


def thermal_covariance(spec: LatticeSpec, temperature: float) -> CovariancePair:
    if not (temperature > 0 and math.isfinite(temperature)):
        raise ValueError(f"temperature must be positive and finite, got {temperature!r}")
    omega = dispersion(spec, momentum_indices(spec))
    occupation = bose_factor(omega, temperature)
    return _pair_from_weights(
        spec, occupation * 0.5 / omega, occupation * 0.5 * omega, f"thermal(T={temperature!r})"
    )


def vacuum_covariance(spec: LatticeSpec) -> CovariancePair:
    """Ultralocal reference state: ``(eps/2) I`` and ``(1/(2 eps)) I``."""
    n, eps = spec.n_sites, spec.spacing
    f_row = np.zeros(n)
    g_row = np.zeros(n)
    f_row[0] = 0.5 * eps
    g_row[0] = 0.5 / eps
    return CovariancePair(
        WeightedCovariance(Sector.FIELD, f_row, spec),
        WeightedCovariance(Sector.MOMENTUM, g_row, spec),
        "vacuum",
    )


def husimi_covariance(pair: CovariancePair, spec: LatticeSpec) -> CovariancePair:
    """Smear a state with the vacuum: each sector gains the vacuum variance."""
    if pair.f.spec != spec:
        raise ValueError("covariance pair was built for a different lattice")
    eps = spec.spacing
    return CovariancePair(pair.f.shifted(0.5 * eps), pair.g.shifted(0.5 / eps),
                          f"husimi[{pair.state}]")


def momentum_diagonal(spec: LatticeSpec, k: int) -> tuple[float, float]:
    """Diagonal momentum-space variances ``(L/(2 omega), L omega / 2)`` of mode k."""
    omega = dispersion(spec, k)
    length = spec.total_length
    return length / (2.0 * omega), length * omega / 2.0
