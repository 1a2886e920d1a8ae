"""Brute-force Gauss–Hermite quadrature for tiny lattices.

Nothing here reuses the Cholesky/Schur machinery of the production path:
Gaussians are handled through symmetric eigendecompositions and explicit
inverses, and marginals are integrated numerically from the global density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from . import kernels
from .covariance import CovariancePair
from .errors import ConvergenceError
from .lattice import LatticeSpec, plane_wave
from .quadform import DistributionKind, QuadraticForm, particle_coefficients

MAX_DIM = 5
DensityFn = Callable[[np.ndarray], np.ndarray]


def default_order(dim: int) -> int:
    """Nodes per axis; full 40-point rules only where the tensor grid stays small."""
    return {1: 40, 2: 40, 3: 40, 4: 12}.get(dim, 8)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Tensor Gauss–Hermite rule for ``N(0, cov)``, laid out along the eigenvectors of cov."""

    points: np.ndarray
    weights: np.ndarray
    order: int

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def for_gaussian(cls, cov: np.ndarray, order: int) -> "QuadratureGrid":
        cov = np.atleast_2d(np.asarray(cov, dtype=np.float64))
        dim = cov.shape[0]
        if dim > MAX_DIM:
            raise ValueError(f"tensor quadrature is limited to {MAX_DIM} dimensions, got {dim}")
        variances, axes = np.linalg.eigh(cov)
        if variances.min() <= 0:
            raise ValueError("quadrature covariance must be positive definite")
        nodes, weights = hermegauss(order)
        weights = weights / math.sqrt(2.0 * math.pi)
        grid = np.stack(np.meshgrid(*[nodes] * dim, indexing="ij"), axis=-1).reshape(-1, dim)
        grid_w = np.prod(
            np.stack(np.meshgrid(*[weights] * dim, indexing="ij"), axis=-1).reshape(-1, dim), axis=1
        )
        points = (grid * np.sqrt(variances)) @ axes.T
        return cls(points, grid_w, order)

    def expectation(self, values: np.ndarray) -> float:
        return float(self.weights @ values)


def gaussian_log_pdf(points: np.ndarray, cov: np.ndarray) -> np.ndarray:
    cov = np.atleast_2d(cov)
    variances, axes = np.linalg.eigh(cov)
    rotated = points @ axes
    return (-0.5 * np.sum(rotated**2 / variances, axis=1)
            - 0.5 * np.sum(np.log(2.0 * math.pi * variances)))


def form_density(form: QuadraticForm, gaussian_cov: np.ndarray) -> DensityFn:
    """Evaluator of ``N(0, G)(nu) * (lam + nu^T Re(Lam) nu)`` at real points.

    Only the real part of a Hermitian form acts on real configurations.
    """
    cov = np.atleast_2d(np.asarray(gaussian_cov, dtype=np.float64))
    real_form = np.ascontiguousarray(np.real(form.big_lambda))

    def density(points: np.ndarray) -> np.ndarray:
        points = np.ascontiguousarray(points, dtype=np.float64)
        poly = kernels.quadratic_values(points, real_form, form.lam)
        return np.exp(gaussian_log_pdf(points, cov)) * poly

    return density


def _renyi_at_order(density, cov, r, order):
    reference = np.atleast_2d(cov) / r
    grid = QuadratureGrid.for_gaussian(reference, order)
    ratio = density(grid.points) ** r / np.exp(gaussian_log_pdf(grid.points, reference))
    return math.log(grid.expectation(ratio)) / (1.0 - r)


def quadrature_renyi(density: DensityFn, gaussian_cov: np.ndarray, r: float,
                     order: int | None = None, tol: float = 1e-9) -> float:
    """Rényi entropy ``ln(integral density^r) / (1 - r)`` by quadrature.

    The rule is centred on ``N(0, G/r)``; the estimate at ``order`` is
    compared with the one at twice the order.
    """
    if r == 1 or not r > 0:
        raise ValueError(f"order must be positive and differ from one, got {r!r}")
    cov = np.atleast_2d(np.asarray(gaussian_cov, dtype=np.float64))
    order = order or default_order(cov.shape[0])
    coarse = _renyi_at_order(density, cov, r, order)
    fine = _renyi_at_order(density, cov, r, 2 * order)
    if abs(coarse - fine) > tol * max(1.0, abs(fine)):
        raise ConvergenceError(
            f"quadrature did not settle: {coarse!r} at Q={order}, {fine!r} at Q={2 * order}"
        )
    return fine


def quadrature_normalization(density: DensityFn, gaussian_cov: np.ndarray,
                             order: int | None = None) -> float:
    cov = np.atleast_2d(np.asarray(gaussian_cov, dtype=np.float64))
    grid = QuadratureGrid.for_gaussian(cov, order or default_order(cov.shape[0]))
    return grid.expectation(density(grid.points) / np.exp(gaussian_log_pdf(grid.points, cov)))


@dataclass(frozen=True)
class GlobalDensity:
    """``N(0, cov) * (theta + nu^T Theta nu)`` over all sites of all sectors.

    ``region_index(m)`` lists the coordinates that belong to the first m
    sites in every sector.
    """

    cov: np.ndarray
    theta: float
    big_theta: np.ndarray
    n_sites: int

    def region_index(self, m_sites: int) -> np.ndarray:
        n_sectors = self.cov.shape[0] // self.n_sites
        return np.concatenate([s * self.n_sites + np.arange(m_sites) for s in range(n_sectors)])


def gaussian_global_density(pair: CovariancePair, kind: DistributionKind) -> GlobalDensity:
    cov = _direct_sum([pair.sector(s).entries for s in kind.sectors])
    return GlobalDensity(cov, 1.0, np.zeros_like(cov), pair.f.spec.n_sites)


def particle_global_density(spec: LatticeSpec, k: int, kind: DistributionKind,
                            pair: CovariancePair) -> GlobalDensity:
    """Global particle density built straight from the whole-chain plane wave."""
    theta, coefs = particle_coefficients(spec, k, kind)
    wave = plane_wave(spec, range(spec.n_sites), k)
    big_theta = np.kron(coefs, np.outer(wave, wave.conj()))
    cov = _direct_sum([pair.sector(s).entries for s in kind.sectors])
    return GlobalDensity(cov, theta, np.real(big_theta), spec.n_sites)


def _direct_sum(blocks):
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    start = 0
    for b in blocks:
        out[start:start + b.shape[0], start:start + b.shape[0]] = b
        start += b.shape[0]
    return out


@dataclass(frozen=True)
class MarginalEstimate:
    lam: float
    big_lambda: np.ndarray
    cov_a: np.ndarray


def quadrature_marginalize(global_density: GlobalDensity, m_sites: int,
                           order: int | None = None, probe: float = 0.5) -> MarginalEstimate:
    """Integrate the complement out of a global density numerically.

    At each probe point ``x`` of the region the integral over the complement
    is split into a Gaussian mass and the conditional mean of the polynomial;
    the mean is ``lam + x^T Lam x`` and the mass carries ``G_A``. Both are
    read off with second differences. Only the real symmetric part of
    ``Lam`` is observable on real configurations.
    """
    cov = global_density.cov
    keep = global_density.region_index(m_sites)
    drop = np.setdiff1d(np.arange(cov.shape[0]), keep)
    if drop.size > 4:
        raise ValueError(f"complement has {drop.size} coordinates; at most 4 are supported")
    precision = np.linalg.inv(cov)
    prec_aa = precision[np.ix_(keep, keep)]
    prec_ab = precision[np.ix_(keep, drop)]
    prec_bb = precision[np.ix_(drop, drop)]
    dim_a = keep.size

    if drop.size == 0:
        def integrate(x):
            value = global_density.theta + x @ global_density.big_theta @ x
            return -0.5 * x @ prec_aa @ x, value
    else:
        grid = QuadratureGrid.for_gaussian(np.linalg.inv(prec_bb), order or default_order(drop.size))
        full = np.zeros((grid.points.shape[0], cov.shape[0]))
        full[:, drop] = grid.points

        def integrate(x):
            full[:, keep] = x
            tilt = np.exp(-(grid.points @ (prec_ab.T @ x)))
            poly = kernels.quadratic_values(full, np.ascontiguousarray(global_density.big_theta),
                                            global_density.theta)
            mass = grid.expectation(tilt)
            return -0.5 * x @ prec_aa @ x + math.log(mass), grid.expectation(tilt * poly) / mass

    def probe_point(i, j=None):
        x = np.zeros(dim_a)
        x[i] += probe
        if j is not None:
            x[j] += probe
        return x

    log_mass0, lam = integrate(np.zeros(dim_a))
    single = [integrate(probe_point(i)) for i in range(dim_a)]
    lam_mat = np.zeros((dim_a, dim_a))
    prec_est = np.zeros((dim_a, dim_a))
    for i in range(dim_a):
        lam_mat[i, i] = (single[i][1] - lam) / probe**2
        prec_est[i, i] = -2.0 * (single[i][0] - log_mass0) / probe**2
        for j in range(i + 1, dim_a):
            log_mass, mean = integrate(probe_point(i, j))
            lam_mat[i, j] = lam_mat[j, i] = (
                mean - single[i][1] - single[j][1] + lam) / (2.0 * probe**2)
            prec_est[i, j] = prec_est[j, i] = -(
                log_mass - single[i][0] - single[j][0] + log_mass0) / probe**2
    return MarginalEstimate(lam, lam_mat, np.linalg.inv(prec_est))
