"""Pure-numpy reference implementations of the hot loops.

Every function here has a twin with the same signature in
``_kernels_numba``; :mod:`arealaw.kernels` picks one at import time.
"""

from __future__ import annotations

import numpy as np


def cosine_row(weights, momenta, n_sites):
    """First row of a circulant kernel, ``(1/N) sum_k w_k cos(2 pi k d / N)``.

    The phase is reduced modulo N in integer arithmetic before the cosine,
    so distant separations lose no precision.
    """
    offsets = np.arange(n_sites, dtype=np.int64)
    turns = np.mod(np.outer(offsets, momenta.astype(np.int64)), n_sites)
    return np.cos(2.0 * np.pi * turns / n_sites) @ weights / n_sites


def literal_block(coef, phases, inv_s, gm_s, inv_t, gm_t, spacing, m_sites):
    """Sector block of the local particle form as explicit lattice sums.

    All inputs are in plain lattice units: ``phases[j] = exp(-i eps eta k j)``
    over the whole chain, ``inv_*`` the lattice inverse of the A block and
    ``gm_*`` the A-by-B correlator block of sectors s and t.
    """
    phase_a = phases[:m_sites]
    phase_b = phases[m_sites:]
    eps2 = spacing * spacing
    theta_aa = coef * np.einsum("j,l->jl", phase_a, phase_a.conj())
    theta_ab = coef * np.einsum("j,p->jp", phase_a, phase_b.conj())
    theta_ba = coef * np.einsum("q,l->ql", phase_b, phase_a.conj())
    theta_bb = coef * np.einsum("q,u->qu", phase_b, phase_b.conj())
    out = theta_aa.astype(np.complex128)
    out += eps2 * np.einsum("jp,qp,ql->jl", theta_ab, gm_t, inv_t)
    out += eps2 * np.einsum("jp,pq,ql->jl", inv_s, gm_s, theta_ba)
    out += eps2 * eps2 * np.einsum(
        "jp,pq,qu,vu,vl->jl", inv_s, gm_s, theta_bb, gm_t, inv_t
    )
    return out


def literal_scalar(coef, phases, inv_s, gm_s, gamma_b, spacing, m_sites):
    """Complement trace ``sum_{p,q in B} eps^2 Theta(p,q) S(q,p)`` with S the
    conditional covariance written out as its own double sum."""
    phase_b = phases[m_sites:]
    eps2 = spacing * spacing
    schur = gamma_b - eps2 * np.einsum("uq,uv,vp->qp", gm_s, inv_s, gm_s)
    theta_bb = coef * np.einsum("p,q->pq", phase_b, phase_b.conj())
    return eps2 * np.einsum("pq,qp->", theta_bb, schur)


def pairing_sum(big_lambda, cov, pairings):
    """Gaussian moment ``E[prod_t nu^T Lambda nu]`` summed pairing by pairing.

    ``pairings`` has shape (P, s, 2) and lists, for each pair partition of
    ``{0..2s-1}``, the slots that are contracted with the covariance.
    """
    n_slots = 2 * pairings.shape[1]
    letters = [chr(ord("a") + i) for i in range(n_slots)]
    lam_terms = ",".join(
        letters[2 * t] + letters[2 * t + 1] for t in range(n_slots // 2)
    )
    total = 0.0 + 0.0j
    for pairing in pairings:
        cov_terms = ",".join(letters[i] + letters[j] for i, j in pairing)
        operands = [big_lambda] * (n_slots // 2) + [cov] * (n_slots // 2)
        total += np.einsum(f"{lam_terms},{cov_terms}->", *operands, optimize=True)
    return total


def quadratic_values(points, matrix, offset):
    """``offset + x^T M x`` for every row x of ``points``."""
    return offset + np.einsum("ni,ij,nj->n", points, matrix, points)
