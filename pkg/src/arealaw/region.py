"""Subregion block algebra: splitting, Schur complements, guarded Cholesky."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import lapack, solve_triangular

from .covariance import Sector, WeightedCovariance
from .errors import IllConditionedError, NotPositiveDefiniteError
from .lattice import Region

#: largest tolerated ratio between the biggest and smallest Cholesky pivot
PIVOT_RATIO_LIMIT = 1e12


def cholesky_lower(matrix: np.ndarray, *, check_conditioning: bool = True) -> np.ndarray:
    """Lower Cholesky factor, failing with the offending pivot index."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.size == 0:
        return np.zeros((0, 0))
    factor, info = lapack.dpotrf(matrix, lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefiniteError(info - 1, matrix.shape[0])
    if info < 0:
        raise ValueError(f"invalid argument {-info} passed to dpotrf")
    if check_conditioning:
        pivots = np.diag(factor) ** 2
        ratio = pivots.max() / pivots.min()
        if ratio > PIVOT_RATIO_LIMIT:
            raise IllConditionedError(ratio, PIVOT_RATIO_LIMIT)
    return factor


def log_det_spd(matrix: np.ndarray) -> float:
    """``log det`` of a symmetric positive definite matrix via its Cholesky factor."""
    factor = cholesky_lower(matrix)
    return 2.0 * float(np.sum(np.log(np.diag(factor))))


@dataclass(frozen=True, eq=False)
class RegionBlocks:
    """``[[A, M], [M^T, B]]`` decomposition of one sector's covariance."""

    a_block: np.ndarray
    b_block: np.ndarray
    m_block: np.ndarray
    region: Region
    sector: Sector | None = None

    def reassemble(self) -> np.ndarray:
        return np.block([[self.a_block, self.m_block], [self.m_block.T, self.b_block]])


def split_blocks(cov: WeightedCovariance | np.ndarray, region: Region) -> RegionBlocks:
    if isinstance(cov, WeightedCovariance):
        entries, sector = cov.entries, cov.sector
    else:
        entries, sector = np.asarray(cov, dtype=np.float64), None
    n = region.spec.n_sites
    if entries.shape != (n, n):
        raise ValueError(f"covariance shape {entries.shape} does not match {n} sites")
    m = region.m_sites
    return RegionBlocks(
        a_block=entries[:m, :m].copy(),
        b_block=entries[m:, m:].copy(),
        m_block=entries[:m, m:].copy(),
        region=region,
        sector=sector,
    )


def schur_complement_b(blocks: RegionBlocks) -> np.ndarray:
    """Conditional covariance of B given A, ``B - M^T A^{-1} M``."""
    factor = cholesky_lower(blocks.a_block, check_conditioning=False)
    whitened = solve_triangular(factor, blocks.m_block, lower=True)
    schur = blocks.b_block - whitened.T @ whitened
    return 0.5 * (schur + schur.T)


class FactoredCovariance:
    """One Cholesky factor of a whole sector, reused for every region size.

    The leading M-by-M corner of the factor is the factor of the A block, and
    the trailing corner factors the Schur complement, so log-determinants and
    conditional quantities of all regions come from a single factorization.
    The matrix is factored in units of ``scale``; log-determinants are
    reported in those units, conditional quantities in the original ones.
    """

    def __init__(self, cov: WeightedCovariance | np.ndarray, scale: float = 1.0):
        if isinstance(cov, WeightedCovariance):
            self.entries, self.sector = cov.entries, cov.sector
        else:
            self.entries, self.sector = np.asarray(cov, dtype=np.float64), None
        self.scale = float(scale)

    @cached_property
    def factor(self) -> np.ndarray:
        return cholesky_lower(self.entries / self.scale)

    @cached_property
    def _cumulative_log_pivots(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(2.0 * np.log(np.diag(self.factor)))])

    def log_det_leading(self, m_sites: int) -> float:
        """``log det`` of the leading ``m_sites`` block divided by ``scale``."""
        return float(self._cumulative_log_pivots[m_sites])

    def conditional_pieces(self, m_sites: int, b_vector: np.ndarray):
        """Return ``(A^{-1} M b, b^H S b)`` with S the Schur complement.

        Both come from the factor blocks: ``M = L_AA L_BA^T`` and
        ``S = L_BB L_BB^T``.
        """
        factor = self.factor
        l_aa = factor[:m_sites, :m_sites]
        l_ba = factor[m_sites:, :m_sites]
        l_bb = factor[m_sites:, m_sites:]
        shift = solve_triangular(l_aa, l_ba.T @ b_vector, lower=True, trans="T")
        projected = l_bb.T @ b_vector
        return shift, self.scale * float(np.real(np.vdot(projected, projected)))
