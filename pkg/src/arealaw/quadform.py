"""Local quadratic forms of single-particle phase-space distributions.

A one-particle state of momentum k has global distributions of the shape
``Gaussian * (theta + nu^H Theta nu)`` with a rank-one ``Theta`` per pair of
field sectors. Integrating out the complement B keeps that shape,

    Lambda = P^T Theta P,   P = [I; Omega],   Omega = G_M^T G_A^{-1},
    lambda = theta + Tr(Theta_B S),   S = G_B - G_M^T G_A^{-1} G_M,

so every local form is ``D C D^H`` with ``d_s = a + G_A^{-1} G_M b`` per
sector s, where a and b are the plane wave restricted to A and B and C is
the 2x2 (or 1x1) matrix of sector coefficients.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from . import kernels
from .covariance import CovariancePair, Sector, momentum_diagonal
from .lattice import LatticeSpec, Region, dispersion, plane_wave
from .region import FactoredCovariance, RegionBlocks, cholesky_lower, schur_complement_b

_HERMITIAN_TOL = 1e-12


class DistributionKind(enum.Enum):
    """Phase-space distributions, in output order."""

    WIGNER = "wigner"
    FIELD = "field"
    MOMENTUM = "momentum"
    HUSIMI = "husimi"

    @property
    def sectors(self) -> tuple[Sector, ...]:
        if self is DistributionKind.FIELD:
            return (Sector.FIELD,)
        if self is DistributionKind.MOMENTUM:
            return (Sector.MOMENTUM,)
        return (Sector.FIELD, Sector.MOMENTUM)

    @property
    def uses_smeared_covariance(self) -> bool:
        return self is DistributionKind.HUSIMI


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """``lam + nu^H big_lambda nu`` in weighted units (``big_lambda = eps * Lambda``)."""

    lam: float
    big_lambda: np.ndarray
    kind: DistributionKind

    def __post_init__(self):
        mat = np.array(self.big_lambda, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"big_lambda must be square, got shape {mat.shape}")
        scale = max(1.0, float(np.max(np.abs(mat)))) if mat.size else 1.0
        if mat.size and np.max(np.abs(mat - mat.conj().T)) > _HERMITIAN_TOL * scale:
            raise ValueError("big_lambda is not Hermitian")
        mat = 0.5 * (mat + mat.conj().T)
        mat.setflags(write=False)
        object.__setattr__(self, "big_lambda", mat)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def dim(self) -> int:
        return self.big_lambda.shape[0]

    def normalization(self, gaussian_cov: np.ndarray) -> float:
        """``lam + Tr(big_lambda G)``; equals one for a normalized density."""
        return self.lam + float(np.real(np.trace(self.big_lambda @ gaussian_cov)))

    @classmethod
    def gaussian(cls, dim: int, kind: DistributionKind) -> "QuadraticForm":
        return cls(1.0, np.zeros((dim, dim)), kind)


def particle_coefficients(spec: LatticeSpec, k: int, kind: DistributionKind):
    """Return ``(theta, C)`` of the global particle distribution of ``kind``.

    ``C[s, t]`` multiplies ``p p^H`` in the (s, t) sector block, with p the
    plane wave on the whole chain.
    """
    gamma_f, gamma_g = momentum_diagonal(spec, k)
    if kind is DistributionKind.FIELD:
        return 0.0, np.array([[1.0 / gamma_f]], dtype=np.complex128)
    if kind is DistributionKind.MOMENTUM:
        return 0.0, np.array([[1.0 / gamma_g]], dtype=np.complex128)
    two_over_length = 2.0 / spec.total_length
    if kind is DistributionKind.WIGNER:
        mixed = two_over_length
        return -1.0, np.array(
            [[1.0 / gamma_f, -1j * mixed], [1j * mixed, 1.0 / gamma_g]]
        )
    # vacuum smearing damps each sector; eps*omega sets the split
    eps = spec.spacing
    omega = dispersion(spec, k)
    damping = (1.0 + eps * omega) ** 2
    field_pref = two_over_length * omega / damping
    momentum_pref = two_over_length * eps**2 * omega / damping
    mixed = two_over_length * eps * omega / damping
    return 0.0, np.array(
        [[field_pref, -1j * mixed], [1j * mixed, momentum_pref]]
    )


def _assemble(kind, theta, coefs, a_wave, shifts, complement_weights) -> QuadraticForm:
    m = a_wave.shape[0]
    n_sec = coefs.shape[0]
    carriers = np.zeros((n_sec * m, n_sec), dtype=np.complex128)
    for s in range(n_sec):
        carriers[s * m:(s + 1) * m, s] = a_wave + shifts[s]
    big_lambda = carriers @ coefs @ carriers.conj().T
    lam = theta + sum(float(np.real(coefs[s, s])) * complement_weights[s] for s in range(n_sec))
    return QuadraticForm(lam, big_lambda, kind)


def _conditioned_on_blocks(blocks: RegionBlocks, b_wave: np.ndarray):
    if b_wave.size == 0:
        return np.zeros(blocks.a_block.shape[0], dtype=np.complex128), 0.0
    factor = cholesky_lower(blocks.a_block, check_conditioning=False)
    shift = cho_solve((factor, True), blocks.m_block @ b_wave)
    schur = schur_complement_b(blocks)
    return shift, float(np.real(np.vdot(b_wave, schur @ b_wave)))


def _waves(spec, region, k):
    return plane_wave(spec, region.sites, k), plane_wave(spec, region.complement, k)


def _from_blocks(spec, k, kind, blocks_by_sector):
    region = blocks_by_sector[0].region
    theta, coefs = particle_coefficients(spec, k, kind)
    a_wave, b_wave = _waves(spec, region, k)
    pieces = [_conditioned_on_blocks(blocks, b_wave) for blocks in blocks_by_sector]
    return _assemble(kind, theta, coefs, a_wave,
                     [p[0] for p in pieces], [p[1] for p in pieces])


def marginal_particle_form(spec: LatticeSpec, k: int, blocks: RegionBlocks) -> QuadraticForm:
    """Local field (or momentum-field) marginal of the particle state.

    The sector is read from ``blocks.sector``.
    """
    kind = DistributionKind.FIELD if blocks.sector is Sector.FIELD else DistributionKind.MOMENTUM
    if blocks.sector is None:
        raise ValueError("blocks must carry their sector to pick the marginal")
    return _from_blocks(spec, k, kind, [blocks])


def wigner_particle_form(spec, k, blocks_f: RegionBlocks, blocks_g: RegionBlocks) -> QuadraticForm:
    return _from_blocks(spec, k, DistributionKind.WIGNER, [blocks_f, blocks_g])


def husimi_particle_form(spec, k, husimi_blocks_f: RegionBlocks,
                         husimi_blocks_g: RegionBlocks) -> QuadraticForm:
    """Local Husimi form; the blocks must come from the vacuum-smeared covariance."""
    return _from_blocks(spec, k, DistributionKind.HUSIMI, [husimi_blocks_f, husimi_blocks_g])


def particle_form(spec: LatticeSpec, k: int, kind: DistributionKind,
                  factored: dict[Sector, FactoredCovariance], m_sites: int) -> QuadraticForm:
    """Same forms as above, read off one whole-chain Cholesky factor per sector.

    ``factored`` must hold the smeared covariances when ``kind`` is Husimi.
    """
    region = Region(spec, m_sites)
    theta, coefs = particle_coefficients(spec, k, kind)
    a_wave, b_wave = _waves(spec, region, k)
    shifts, weights = [], []
    for sector in kind.sectors:
        shift, weight = factored[sector].conditional_pieces(m_sites, b_wave)
        shifts.append(shift)
        weights.append(weight)
    return _assemble(kind, theta, coefs, a_wave, shifts, weights)


def literal_sum_form(spec: LatticeSpec, k: int, kind: DistributionKind,
                     pair: CovariancePair, region: Region) -> QuadraticForm:
    """Reference evaluation as nested lattice sums in unweighted units.

    Inverses are explicit lattice inverses (``sum_j eps gamma gamma^{-1} = delta/eps``),
    every contraction carries its eps weight, and the result is converted
    to weighted units at the end. Cost grows as ``M^2 (N-M)^2``; meant for N <= 8.
    """
    eps = spec.spacing
    m = region.m_sites
    theta, coefs = particle_coefficients(spec, k, kind)
    j = np.arange(spec.n_sites)
    phases = np.exp(-2j * np.pi * np.mod(j * k, spec.n_sites) / spec.n_sites)

    lattice = {}
    for sector in kind.sectors:
        gamma = pair.sector(sector).entries / eps
        inv_a = np.linalg.inv(gamma[:m, :m]) / eps**2
        lattice[sector] = (inv_a, np.ascontiguousarray(gamma[:m, m:]),
                           np.ascontiguousarray(gamma[m:, m:]))

    n_sec = len(kind.sectors)
    big_lambda = np.zeros((n_sec * m, n_sec * m), dtype=np.complex128)
    lam = theta
    for s, sector_s in enumerate(kind.sectors):
        inv_s, gm_s, gb_s = lattice[sector_s]
        lam += float(np.real(kernels.literal_scalar(
            complex(coefs[s, s]), phases, inv_s, gm_s, gb_s, eps, m)))
        for t, sector_t in enumerate(kind.sectors):
            inv_t, gm_t, _ = lattice[sector_t]
            block = kernels.literal_block(complex(coefs[s, t]), phases, inv_s, gm_s,
                                          inv_t, gm_t, eps, m)
            big_lambda[s * m:(s + 1) * m, t * m:(t + 1) * m] = eps * block
    return QuadraticForm(lam, big_lambda, kind)
