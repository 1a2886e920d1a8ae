"""Periodic one-dimensional lattice: sites, momenta, dispersion, plane waves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroModeError


@dataclass(frozen=True)
class LatticeSpec:
    """Discretization of a ring of ``n_sites`` points separated by ``spacing``."""

    n_sites: int
    spacing: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ValueError(f"n_sites must be an integer >= 2, got {self.n_sites!r}")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise ValueError(f"spacing must be positive and finite, got {self.spacing!r}")
        if not (self.mass >= 0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be non-negative and finite, got {self.mass!r}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "mass", float(self.mass))

    @classmethod
    def from_length(cls, length: float, spacing: float, mass: float) -> "LatticeSpec":
        """Chain of physical ``length``; ``length/spacing`` must be an integer."""
        n_sites = round(length / spacing)
        if not math.isclose(n_sites * spacing, length, rel_tol=1e-9):
            raise ValueError(f"length {length} is not a multiple of spacing {spacing}")
        return cls(n_sites, spacing, mass)

    @property
    def total_length(self) -> float:
        return self.n_sites * self.spacing

    @property
    def momentum_spacing(self) -> float:
        return 2.0 * math.pi / self.total_length

    @property
    def zone_edge(self) -> int:
        """Largest momentum index in the set."""
        return self.n_sites // 2


@dataclass(frozen=True)
class Region:
    """The first ``m_sites`` sites of the chain; the rest form the complement."""

    spec: LatticeSpec
    m_sites: int

    def __post_init__(self):
        if int(self.m_sites) != self.m_sites or not 1 <= self.m_sites <= self.spec.n_sites:
            raise ValueError(
                f"region size must lie in [1, {self.spec.n_sites}], got {self.m_sites!r}"
            )
        object.__setattr__(self, "m_sites", int(self.m_sites))

    @property
    def length(self) -> float:
        return self.m_sites * self.spec.spacing

    @property
    def sites(self) -> range:
        return range(self.m_sites)

    @property
    def complement(self) -> range:
        return range(self.m_sites, self.spec.n_sites)

    @property
    def is_whole(self) -> bool:
        return self.m_sites == self.spec.n_sites


def momentum_indices(spec: LatticeSpec) -> np.ndarray:
    """Integer momentum labels, symmetric for odd N and shifted up by one for even N."""
    n = spec.n_sites
    if n % 2:
        return np.arange(-(n - 1) // 2, (n - 1) // 2 + 1, dtype=np.int64)
    return np.arange(-n // 2 + 1, n // 2 + 1, dtype=np.int64)


def _check_momentum(spec: LatticeSpec, k) -> None:
    k_arr = np.asarray(k)
    low, high = momentum_indices(spec)[[0, -1]]
    if np.any(k_arr != np.round(k_arr)) or np.any((k_arr < low) | (k_arr > high)):
        raise ValueError(f"momentum index {k!r} outside [{low}, {high}]")


def dispersion(spec: LatticeSpec, k):
    """Lattice frequency ``sqrt(m^2 + (4/eps^2) sin^2(eps eta k / 2))``.

    Accepts a scalar or an array of momentum indices.
    """
    _check_momentum(spec, k)
    k_arr = np.asarray(k, dtype=np.float64)
    if spec.mass == 0.0 and np.any(k_arr == 0):
        raise ZeroModeError("the k=0 mode is massless; use a small regulator mass")
    half_phase = 0.5 * spec.spacing * spec.momentum_spacing * k_arr
    omega = np.sqrt(spec.mass**2 + (2.0 * np.sin(half_phase) / spec.spacing) ** 2)
    return float(omega) if omega.ndim == 0 else omega


def plane_wave(spec: LatticeSpec, sites: range, k: int) -> np.ndarray:
    """Rescaled plane wave ``sqrt(eps) exp(-i eps j eta k)`` on a contiguous site range."""
    _check_momentum(spec, k)
    j = np.arange(sites.start, sites.stop, dtype=np.int64)
    # integer phase reduction keeps the wave exact for large j*k
    turns = np.mod(j * int(k), spec.n_sites)
    return math.sqrt(spec.spacing) * np.exp(-2j * np.pi * turns / spec.n_sites)
