"""Rényi entropies of local phase-space distributions and derived quantities.

Every Gaussian part is assembled from Cholesky log-determinants of the
covariance measured in units of the vacuum variance, so the vacuum
subtraction happens inside the factorization and no normalization constant
is ever exponentiated.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .covariance import (
    CovariancePair,
    Sector,
    ground_covariance,
    husimi_covariance,
    thermal_covariance,
    vacuum_covariance,
)
from .errors import InconsistencyError
from .lattice import LatticeSpec, Region, momentum_indices
from .quadform import DistributionKind, QuadraticForm, particle_form
from .region import FactoredCovariance, log_det_spd
from .wick import capital_u


@dataclass(frozen=True)
class State:
    """A lattice state: ``ground``, ``thermal``, ``vacuum`` or ``particle``."""

    name: str
    temperature: float | None = None
    momentum: int | None = None

    def __post_init__(self):
        if self.name not in ("ground", "thermal", "vacuum", "particle"):
            raise ValueError(f"unknown state {self.name!r}")
        if (self.name == "thermal") != (self.temperature is not None):
            raise ValueError("a temperature is required for, and only for, thermal states")
        if (self.name == "particle") != (self.momentum is not None):
            raise ValueError("a momentum is required for, and only for, particle states")
        if self.temperature is not None and not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature!r}")

    @property
    def is_gaussian(self) -> bool:
        return self.name != "particle"

    @property
    def tag(self) -> str:
        if self.name == "thermal":
            return f"thermal(T={self.temperature!r})"
        if self.name == "particle":
            return f"particle(k={self.momentum})"
        return self.name


def ground_state() -> State:
    return State("ground")


def thermal_state(temperature: float) -> State:
    return State("thermal", temperature=float(temperature))


def vacuum_state() -> State:
    return State("vacuum")


def particle_state(momentum: int) -> State:
    return State("particle", momentum=int(momentum))


@dataclass(frozen=True)
class EntropyRecord:
    state: str
    kind: DistributionKind
    m_sites: int
    length: float
    r: float
    gaussian_part: float
    delta_s: float
    dim: int
    wehrl_offset_subtracted: float | None = None

    @property
    def subtracted(self) -> float:
        return self.gaussian_part + self.delta_s


def renyi_gaussian(gaussian_cov: np.ndarray, r: float) -> float:
    """Rényi entropy of a centred Gaussian density with covariance ``gaussian_cov``."""
    if not r > 0:
        raise ValueError(f"order must be positive, got {r!r}")
    cov = np.atleast_2d(np.asarray(gaussian_cov, dtype=np.float64))
    dim = cov.shape[0]
    order_term = 1.0 if r == 1 else math.log(r) / (r - 1.0)
    return 0.5 * log_det_spd(2.0 * math.pi * cov) + 0.5 * dim * order_term


def correlation_matrix(a_block: np.ndarray) -> np.ndarray:
    """Normalized correlations ``G_jl / sqrt(G_jj G_ll)``."""
    a_block = np.asarray(a_block, dtype=np.float64)
    scale = 1.0 / np.sqrt(np.diag(a_block))
    corr = a_block * np.outer(scale, scale)
    np.fill_diagonal(corr, 1.0)
    return corr


class StateModel:
    """All entropic quantities of one state on one lattice.

    Holds one whole-chain Cholesky factor per field sector (and per smeared
    sector for the Husimi distribution); every region size reads its
    log-determinants and conditional pieces off those factors.
    """

    def __init__(self, spec: LatticeSpec, state: State):
        self.spec = spec
        self.state = state
        if state.name == "particle" and state.momentum not in set(momentum_indices(spec).tolist()):
            raise ValueError(f"momentum {state.momentum} not in the lattice momentum set")
        self._lock = threading.Lock()
        self._factors: dict[tuple[bool, Sector], FactoredCovariance] = {}

    # covariances -----------------------------------------------------------

    def _pair(self, smeared: bool) -> CovariancePair:
        spec, state = self.spec, self.state
        if state.name == "thermal":
            pair = thermal_covariance(spec, state.temperature)
        elif state.name == "vacuum":
            pair = vacuum_covariance(spec)
        else:
            pair = ground_covariance(spec)
        return husimi_covariance(pair, spec) if smeared else pair

    def _reference_variance(self, smeared: bool, sector: Sector) -> float:
        vacuum = vacuum_covariance(self.spec)
        if smeared:
            vacuum = husimi_covariance(vacuum, self.spec)
        return float(vacuum.sector(sector).first_row[0])

    def factor(self, smeared: bool, sector: Sector) -> FactoredCovariance:
        key = (smeared, sector)
        with self._lock:
            if key not in self._factors:
                pair = self._pair(smeared)
                factored = FactoredCovariance(
                    pair.sector(sector), scale=self._reference_variance(smeared, sector)
                )
                factored.factor  # factor eagerly while holding the lock
                self._factors[key] = factored
            return self._factors[key]

    def prepare(self, kinds) -> None:
        """Factor everything ``kinds`` will need; call before fanning out to threads."""
        for kind in kinds:
            for sector in kind.sectors:
                self.factor(kind.uses_smeared_covariance, sector)

    def gaussian_cov(self, kind: DistributionKind, m_sites: int) -> np.ndarray:
        """Weighted covariance of the local distribution (direct sum over sectors)."""
        pair = self._pair(kind.uses_smeared_covariance)
        blocks = [pair.sector(s).entries[:m_sites, :m_sites] for s in kind.sectors]
        if len(blocks) == 1:
            return blocks[0].copy()
        zero = np.zeros_like(blocks[0])
        return np.block([[blocks[0], zero], [zero, blocks[1]]])

    # building blocks ---------------------------------------------------------

    def _relative_log_det(self, kind: DistributionKind, m_sites: int) -> float:
        smeared = kind.uses_smeared_covariance
        return sum(self.factor(smeared, s).log_det_leading(m_sites) for s in kind.sectors)

    def local_form(self, kind: DistributionKind, m_sites: int) -> QuadraticForm:
        dim = m_sites * len(kind.sectors)
        if self.state.is_gaussian:
            return QuadraticForm.gaussian(dim, kind)
        smeared = kind.uses_smeared_covariance
        factored = {s: self.factor(smeared, s) for s in kind.sectors}
        return particle_form(self.spec, self.state.momentum, kind, factored, m_sites)

    def delta_s(self, kind: DistributionKind, m_sites: int, r: float) -> float:
        if self.state.is_gaussian:
            if not r > 0:
                raise ValueError(f"order must be positive, got {r!r}")
            return 0.0
        if r == 1:
            raise ValueError("particle states support integer orders 2..4")
        form = self.local_form(kind, m_sites)
        u_value = capital_u(r, form, self.gaussian_cov(kind, m_sites))
        if not u_value > 0:
            raise InconsistencyError(
                f"U({r}) = {u_value!r} is not positive for {kind.value}, M={m_sites}"
            )
        return math.log(u_value) / (1.0 - r)

    # public quantities --------------------------------------------------------

    def record(self, kind: DistributionKind, m_sites: int, r: float) -> EntropyRecord:
        region = Region(self.spec, m_sites)
        gaussian_part = 0.5 * self._relative_log_det(kind, m_sites)
        delta = self.delta_s(kind, m_sites, r)
        offset = None
        if kind is DistributionKind.HUSIMI:
            offset = gaussian_part + delta - m_sites * math.log(2.0)
        return EntropyRecord(
            state=self.state.tag,
            kind=kind,
            m_sites=m_sites,
            length=region.length,
            r=r,
            gaussian_part=gaussian_part,
            delta_s=delta,
            dim=m_sites * len(kind.sectors),
            wehrl_offset_subtracted=offset,
        )

    def renyi(self, kind: DistributionKind, m_sites: int, r: float) -> float:
        """Unsubtracted Rényi entropy of the local distribution."""
        Region(self.spec, m_sites)
        smeared = kind.uses_smeared_covariance
        dim = m_sites * len(kind.sectors)
        log_det = sum(
            self.factor(smeared, s).log_det_leading(m_sites)
            + m_sites * math.log(2.0 * math.pi * self._reference_variance(smeared, s))
            for s in kind.sectors
        )
        order_term = 1.0 if r == 1 else math.log(r) / (r - 1.0)
        return 0.5 * log_det + 0.5 * dim * order_term + self.delta_s(kind, m_sites, r)

    def mutual_information(self, kind: DistributionKind, m_sites: int, r: float) -> float:
        """``S(A) + S(B) - S(A u B)`` for A the first ``m_sites`` sites.

        B is a translate of the first ``N - m_sites`` sites, which carry the
        same covariance block and, since the plane-wave phase cancels in
        ``p p^H``, the same local particle form.
        """
        n = self.spec.n_sites
        if not 1 <= m_sites < n:
            raise ValueError(f"region size must lie in [1, {n - 1}], got {m_sites}")
        sizes = (m_sites, n - m_sites, n)
        gaussian = 0.5 * (self._relative_log_det(kind, sizes[0])
                          + self._relative_log_det(kind, sizes[1])
                          - self._relative_log_det(kind, sizes[2]))
        if self.state.is_gaussian:
            return gaussian
        deltas = [self.delta_s(kind, size, r) for size in sizes]
        return gaussian + deltas[0] + deltas[1] - deltas[2]


@lru_cache(maxsize=32)
def state_model(spec: LatticeSpec, state: State) -> StateModel:
    return StateModel(spec, state)


def subtracted_entropy(spec: LatticeSpec, state: State, kind: DistributionKind,
                       region: Region, r: float) -> EntropyRecord:
    return state_model(spec, state).record(kind, region.m_sites, r)


def renyi_entropy(spec: LatticeSpec, state: State, kind: DistributionKind,
                  region: Region, r: float) -> float:
    return state_model(spec, state).renyi(kind, region.m_sites, r)


def mutual_information(spec: LatticeSpec, state: State, kind: DistributionKind,
                       region: Region, r: float) -> float:
    return state_model(spec, state).mutual_information(kind, region.m_sites, r)
