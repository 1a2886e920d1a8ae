"""numba-compiled twins of :mod:`arealaw._kernels_numpy`.

Loops are written out explicitly; the summation order is fixed so results
do not depend on how many threads the caller uses.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def cosine_row(weights, momenta, n_sites):
    row = np.zeros(n_sites)
    for d in range(n_sites):
        acc = 0.0
        for idx in range(momenta.shape[0]):
            turn = (momenta[idx] * d) % n_sites
            acc += weights[idx] * math.cos(2.0 * math.pi * turn / n_sites)
        row[d] = acc / n_sites
    return row


@njit(cache=True)
def literal_block(coef, phases, inv_s, gm_s, inv_t, gm_t, spacing, m_sites):
    n_b = phases.shape[0] - m_sites
    eps2 = spacing * spacing
    out = np.zeros((m_sites, m_sites), dtype=np.complex128)
    for j in range(m_sites):
        for l in range(m_sites):
            acc = coef * phases[j] * np.conj(phases[l])
            for p in range(n_b):
                for q in range(m_sites):
                    acc += (eps2 * coef * phases[j] * np.conj(phases[m_sites + p])
                            * gm_t[q, p] * inv_t[q, l])
                    acc += (eps2 * inv_s[j, q] * gm_s[q, p]
                            * coef * phases[m_sites + p] * np.conj(phases[l]))
            for p in range(m_sites):
                for q in range(n_b):
                    for u in range(n_b):
                        for v in range(m_sites):
                            acc += (eps2 * eps2 * inv_s[j, p] * gm_s[p, q]
                                    * coef * phases[m_sites + q]
                                    * np.conj(phases[m_sites + u])
                                    * gm_t[v, u] * inv_t[v, l])
            out[j, l] = acc
    return out


@njit(cache=True)
def literal_scalar(coef, phases, inv_s, gm_s, gamma_b, spacing, m_sites):
    n_b = phases.shape[0] - m_sites
    eps2 = spacing * spacing
    acc = 0.0 + 0.0j
    for p in range(n_b):
        for q in range(n_b):
            schur = gamma_b[q, p]
            for u in range(m_sites):
                for v in range(m_sites):
                    schur -= eps2 * gm_s[u, q] * inv_s[u, v] * gm_s[v, p]
            theta = coef * phases[m_sites + p] * np.conj(phases[m_sites + q])
            acc += eps2 * theta * schur
    return acc


@njit(cache=True)
def pairing_sum(big_lambda, cov, pairings):
    dim = big_lambda.shape[0]
    n_pairs = pairings.shape[1]
    n_slots = 2 * n_pairs
    index = np.zeros(n_slots, dtype=np.int64)
    total = 0.0 + 0.0j
    n_tuples = dim ** n_slots
    for flat in range(n_tuples):
        rest = flat
        for slot in range(n_slots):
            index[slot] = rest % dim
            rest //= dim
        lam = 1.0 + 0.0j
        for t in range(n_pairs):
            lam *= big_lambda[index[2 * t], index[2 * t + 1]]
        gauss = 0.0
        for pairing in range(pairings.shape[0]):
            term = 1.0
            for t in range(n_pairs):
                term *= cov[index[pairings[pairing, t, 0]],
                            index[pairings[pairing, t, 1]]]
            gauss += term
        total += lam * gauss
    return total


@njit(cache=True)
def quadratic_values(points, matrix, offset):
    n, dim = points.shape
    out = np.empty(n)
    for row in range(n):
        acc = 0.0
        for i in range(dim):
            xi = points[row, i]
            for j in range(dim):
                acc += xi * matrix[i, j] * points[row, j]
        out[row] = offset + acc
    return out
