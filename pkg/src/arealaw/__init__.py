"""Subtracted classical entropies of phase-space distributions on a lattice."""

from .covariance import (
    CovariancePair,
    Sector,
    WeightedCovariance,
    ground_covariance,
    husimi_covariance,
    momentum_diagonal,
    thermal_covariance,
    vacuum_covariance,
)
from .lattice import LatticeSpec, Region, dispersion, momentum_indices, plane_wave
from .quadform import DistributionKind, QuadraticForm

__version__ = "0.1.0"
