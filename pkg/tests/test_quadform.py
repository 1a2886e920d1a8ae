import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arealaw.covariance import Sector, ground_covariance, husimi_covariance, vacuum_covariance
from arealaw.lattice import LatticeSpec, Region, momentum_indices
from arealaw.oracle import particle_global_density
from arealaw.quadform import (
    DistributionKind,
    QuadraticForm,
    husimi_particle_form,
    literal_sum_form,
    marginal_particle_form,
    particle_form,
    wigner_particle_form,
)
from arealaw.region import FactoredCovariance, split_blocks

KINDS = list(DistributionKind)


def lattice_case(n, eps, m):
    spec = LatticeSpec(n, eps, m)
    ground = ground_covariance(spec)
    return spec, ground, husimi_covariance(ground, spec)


def fast_form(spec, ground, smeared, k, kind, m):
    pair = smeared if kind.uses_smeared_covariance else ground
    factored = {s: FactoredCovariance(pair.sector(s)) for s in kind.sectors}
    return particle_form(spec, k, kind, factored, m)


cases = st.tuples(st.integers(2, 12), st.floats(0.1, 1.5), st.floats(0.2, 5.0))


def test_kinds_come_in_output_order():
    assert [k.value for k in DistributionKind] == ["wigner", "field", "momentum", "husimi"]
    assert DistributionKind.FIELD.sectors == (Sector.FIELD,)
    assert DistributionKind.HUSIMI.uses_smeared_covariance


def test_form_rejects_non_hermitian_matrix():
    with pytest.raises(ValueError):
        QuadraticForm(0.0, np.array([[0.0, 1.0], [0.0, 0.0]]), DistributionKind.FIELD)
    with pytest.raises(ValueError):
        QuadraticForm(0.0, np.zeros((2, 3)), DistributionKind.FIELD)


@given(cases, st.data())
def test_local_forms_are_normalized(case, data):
    spec, ground, smeared = lattice_case(*case)
    k = data.draw(st.sampled_from(momentum_indices(spec).tolist()))
    m = data.draw(st.integers(1, spec.n_sites))
    for kind in KINDS:
        pair = smeared if kind.uses_smeared_covariance else ground
        form = fast_form(spec, ground, smeared, k, kind, m)
        cov = np.zeros((form.dim, form.dim))
        for i, sector in enumerate(kind.sectors):
            cov[i * m:(i + 1) * m, i * m:(i + 1) * m] = pair.sector(sector).entries[:m, :m]
        assert form.normalization(cov) == pytest.approx(1.0, abs=1e-10)


@given(st.tuples(st.integers(2, 7), st.floats(0.2, 1.5), st.floats(0.2, 5.0)), st.data())
def test_fast_path_matches_literal_lattice_sums(case, data):
    spec, ground, smeared = lattice_case(*case)
    k = data.draw(st.sampled_from(momentum_indices(spec).tolist()))
    m = data.draw(st.integers(1, spec.n_sites))
    for kind in KINDS:
        pair = smeared if kind.uses_smeared_covariance else ground
        fast = fast_form(spec, ground, smeared, k, kind, m)
        slow = literal_sum_form(spec, k, kind, pair, Region(spec, m))
        assert fast.lam == pytest.approx(slow.lam, abs=1e-10)
        np.testing.assert_allclose(fast.big_lambda, slow.big_lambda, atol=1e-10)


@given(cases, st.data())
def test_block_constructors_agree_with_factored_path(case, data):
    spec, ground, smeared = lattice_case(*case)
    k = data.draw(st.sampled_from(momentum_indices(spec).tolist()))
    m = data.draw(st.integers(1, spec.n_sites))
    region = Region(spec, m)
    built = {
        DistributionKind.FIELD: marginal_particle_form(spec, k, split_blocks(ground.f, region)),
        DistributionKind.MOMENTUM: marginal_particle_form(spec, k, split_blocks(ground.g, region)),
        DistributionKind.WIGNER: wigner_particle_form(
            spec, k, split_blocks(ground.f, region), split_blocks(ground.g, region)),
        DistributionKind.HUSIMI: husimi_particle_form(
            spec, k, split_blocks(smeared.f, region), split_blocks(smeared.g, region)),
    }
    for kind, form in built.items():
        reference = fast_form(spec, ground, smeared, k, kind, m)
        assert form.kind is kind
        assert form.lam == pytest.approx(reference.lam, abs=1e-10)
        np.testing.assert_allclose(form.big_lambda, reference.big_lambda, atol=1e-10)


def test_marginal_constructor_needs_a_sector():
    spec = LatticeSpec(4)
    blocks = split_blocks(ground_covariance(spec).f.entries, Region(spec, 2))
    with pytest.raises(ValueError):
        marginal_particle_form(spec, 1, blocks)


@pytest.mark.parametrize("n,eps,m,k", [(4, 0.5, 1.0, 1), (5, 0.3, 2.0, 2), (6, 1.0, 0.5, 3)])
def test_wigner_integrates_to_the_field_marginal(n, eps, m, k):
    spec, ground, _ = lattice_case(n, eps, m)
    wigner = particle_global_density(spec, k, DistributionKind.WIGNER, ground)
    field = particle_global_density(spec, k, DistributionKind.FIELD, ground)
    theta_gg = wigner.big_theta[n:, n:]
    assert wigner.theta + np.trace(theta_gg @ ground.g.entries) == pytest.approx(field.theta, abs=1e-12)
    np.testing.assert_allclose(wigner.big_theta[:n, :n], field.big_theta, atol=1e-12)


@pytest.mark.parametrize("n,eps,m,k", [(4, 0.5, 1.0, 1), (5, 0.3, 2.0, 2), (6, 1.0, 0.5, 3), (3, 0.2, 10.0, 1)])
def test_husimi_is_the_wigner_density_smoothed_by_the_vacuum(n, eps, m, k):
    # For nu = x + y, x ~ Wigner, y ~ vacuum: x | nu ~ N(K nu, G - K G), K = G (G + V)^-1,
    # so the smoothed polynomial is theta + Tr(Theta (G - K G)) + nu^T K^T Theta K nu.
    spec, ground, smeared = lattice_case(n, eps, m)
    wigner = particle_global_density(spec, k, DistributionKind.WIGNER, ground)
    husimi = particle_global_density(spec, k, DistributionKind.HUSIMI, smeared)
    vac = vacuum_covariance(spec)
    vacuum = np.zeros((2 * n, 2 * n))
    vacuum[:n, :n], vacuum[n:, n:] = vac.f.entries, vac.g.entries
    gain = wigner.cov @ np.linalg.inv(wigner.cov + vacuum)
    theta = wigner.theta + np.trace(wigner.big_theta @ (wigner.cov - gain @ wigner.cov))
    big_theta = gain.T @ wigner.big_theta @ gain
    np.testing.assert_allclose(husimi.cov, wigner.cov + vacuum, atol=1e-13)
    assert husimi.theta == pytest.approx(theta, abs=1e-12)
    np.testing.assert_allclose(husimi.big_theta, 0.5 * (big_theta + big_theta.T), atol=1e-12)


def test_whole_region_reproduces_the_global_density():
    spec, ground, _ = lattice_case(5, 0.4, 1.0)
    for kind in (DistributionKind.WIGNER, DistributionKind.FIELD):
        form = fast_form(spec, ground, None, 2, kind, 5)
        glob = particle_global_density(spec, 2, kind, ground)
        assert form.lam == pytest.approx(glob.theta, abs=1e-12)
        np.testing.assert_allclose(form.big_lambda.real, glob.big_theta, atol=1e-12)
