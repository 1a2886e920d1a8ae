"""Oracle suite: every closed form against an independent evaluation.

Used by ``arealaw verify`` and by the test suite.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .covariance import ground_covariance, husimi_covariance, thermal_covariance
from .entropy import StateModel, ground_state, particle_state, thermal_state
from .lattice import LatticeSpec, Region, momentum_indices
from .oracle import (
    form_density,
    particle_global_density,
    quadrature_marginalize,
    quadrature_renyi,
)
from .quadform import DistributionKind, QuadraticForm, literal_sum_form, particle_form
from .region import FactoredCovariance, log_det_spd
from .wick import u_closed, u_partition_oracle


@dataclass(frozen=True)
class CheckResult:
    name: str
    worst: float
    tolerance: float
    cases: int
    seconds: float

    @property
    def passed(self) -> bool:
        return bool(self.worst <= self.tolerance)


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def quadform_literal_check(max_sites: int = 8) -> CheckResult:
    """Fast assembly against explicit lattice sums, elementwise."""
    start = time.perf_counter()
    worst, cases = 0.0, 0
    for spacing, mass in ((1.0, 1.0), (0.3, 0.7)):
        for n in range(2, max_sites + 1):
            spec = LatticeSpec(n, spacing, mass)
            ground = ground_covariance(spec)
            smeared = husimi_covariance(ground, spec)
            factored = {}
            for kind in DistributionKind:
                pair = smeared if kind.uses_smeared_covariance else ground
                factored[kind] = {s: FactoredCovariance(pair.sector(s)) for s in kind.sectors}
            for m in range(1, n + 1):
                region = Region(spec, m)
                for k in momentum_indices(spec):
                    for kind in DistributionKind:
                        pair = smeared if kind.uses_smeared_covariance else ground
                        fast = particle_form(spec, int(k), kind, factored[kind], m)
                        slow = literal_sum_form(spec, int(k), kind, pair, region)
                        worst = max(worst, abs(fast.lam - slow.lam),
                                    float(np.max(np.abs(fast.big_lambda - slow.big_lambda))))
                        cases += 1
    return CheckResult("quadform fast == literal sums", worst, 1e-10, cases,
                       time.perf_counter() - start)


def wick_partition_check(trials: int = 4, seed: int = 20240521) -> CheckResult:
    """Diagram expansion of u(s) against explicit pair-partition sums."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst, cases = 0.0, 0
    for dim in range(1, 5):
        for _ in range(trials):
            raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            form = QuadraticForm(rng.normal(), 0.5 * (raw + raw.conj().T), DistributionKind.WIGNER)
            root = rng.normal(size=(dim, dim))
            cov = root @ root.T + dim * np.eye(dim)
            for s in range(1, 5):
                worst = max(worst, _relative(u_closed(s, form, cov), u_partition_oracle(s, form, cov)))
                cases += 1
    return CheckResult("wick closed == pair partitions", worst, 1e-10, cases,
                       time.perf_counter() - start)


def _tiny_models():
    yield StateModel(LatticeSpec(2, 1.0, 1.0), ground_state())
    yield StateModel(LatticeSpec(3, 0.7, 0.5), ground_state())
    yield StateModel(LatticeSpec(3, 0.7, 0.5), thermal_state(0.8))
    yield StateModel(LatticeSpec(2, 1.0, 1.0), particle_state(1))
    yield StateModel(LatticeSpec(3, 1.0, 1.0), particle_state(1))
    yield StateModel(LatticeSpec(3, 0.5, 2.0), particle_state(0))


def quadrature_renyi_check() -> CheckResult:
    """Closed-form Rényi entropies against quadrature of the local density."""
    start = time.perf_counter()
    worst, cases = 0.0, 0
    for model in _tiny_models():
        for kind in DistributionKind:
            for m in range(1, model.spec.n_sites + 1):
                if m * len(kind.sectors) > 4:
                    continue
                form = model.local_form(kind, m)
                cov = model.gaussian_cov(kind, m)
                for r in (2, 3):
                    estimate = quadrature_renyi(form_density(form, cov), cov, r)
                    worst = max(worst, abs(estimate - model.renyi(kind, m, r)))
                    cases += 1
    return CheckResult("quadrature Renyi == closed form", worst, 1e-6, cases,
                       time.perf_counter() - start)


def quadrature_marginal_check() -> CheckResult:
    """Local particle forms against numerical integration of the global density."""
    start = time.perf_counter()
    worst, cases = 0.0, 0
    for model in _tiny_models():
        if model.state.is_gaussian:
            continue
        spec, k = model.spec, model.state.momentum
        ground = ground_covariance(spec)
        for kind in DistributionKind:
            pair = husimi_covariance(ground, spec) if kind.uses_smeared_covariance else ground
            density = particle_global_density(spec, k, kind, pair)
            for m in range(1, spec.n_sites):
                estimate = quadrature_marginalize(density, m)
                form = model.local_form(kind, m)
                cov = model.gaussian_cov(kind, m)
                worst = max(worst, abs(estimate.lam - form.lam),
                            float(np.max(np.abs(estimate.big_lambda - form.big_lambda.real))),
                            float(np.max(np.abs(estimate.cov_a - cov))))
                cases += 1
    return CheckResult("quadrature marginal == quadform", worst, 1e-6, cases,
                       time.perf_counter() - start)


def gaussian_identity_check() -> CheckResult:
    """Reciprocity, Schur determinant split and product-form additivity."""
    start = time.perf_counter()
    worst, cases = 0.0, 0
    for n, spacing, mass, temperature in ((12, 0.5, 0.8, None), (16, 0.2, 0.3, 0.7)):
        spec = LatticeSpec(n, spacing, mass)
        pair = ground_covariance(spec) if temperature is None else thermal_covariance(spec, temperature)
        if temperature is None:
            recip = 4.0 * pair.g.entries @ pair.f.entries - np.eye(n)
            worst = max(worst, float(np.max(np.abs(recip))))
            cases += 1
        state = ground_state() if temperature is None else thermal_state(temperature)
        model = StateModel(spec, state)
        for m in range(1, n):
            for cov in (pair.f.entries, pair.g.entries):
                a, b = cov[:m, :m], cov[m:, m:]
                schur = b - cov[m:, :m] @ np.linalg.solve(a, cov[:m, m:])
                worst = max(worst, abs(log_det_spd(cov) - log_det_spd(a) - log_det_spd(schur)))
            wigner = model.record(DistributionKind.WIGNER, m, 2).subtracted
            split = (model.record(DistributionKind.FIELD, m, 2).subtracted
                     + model.record(DistributionKind.MOMENTUM, m, 2).subtracted)
            worst = max(worst, abs(wigner - split))
            cases += 1
    return CheckResult("Gaussian identities", worst, 1e-9, cases, time.perf_counter() - start)


SUITE = (
    quadform_literal_check,
    wick_partition_check,
    quadrature_renyi_check,
    quadrature_marginal_check,
    gaussian_identity_check,
)


def run_oracle_suite() -> list[CheckResult]:
    return [check() for check in SUITE]


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'cases':>6}  {'worst':>10}  {'tol':>8}  {'time/s':>7}  result"]
    for r in results:
        lines.append(
            f"{r.name:<{width}}  {r.cases:>6}  {r.worst:>10.3e}  {r.tolerance:>8.0e}  "
            f"{r.seconds:>7.2f}  {'PASS' if r.passed else 'FAIL'}"
        )
    return "\n".join(lines)
