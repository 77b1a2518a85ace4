"""Numba backend: njit kernels mirroring the numpy implementations.

Per-point work is independent, so ``prange`` parallelism produces identical
results for any thread count.  All 64-bit arithmetic wraps mod 2^64.
"""

import numpy as np
from numba import njit, prange

from ._common import (
    GOLDEN,
    INV_2_53,
    MINHASH_SALT,
    MIX_MUL_1,
    MIX_MUL_2,
    ONE,
    SHIFT_11,
    SHIFT_27,
    SHIFT_30,
    SHIFT_31,
    SIMHASH_SALT,
    TWO_PI,
    family_base,
)

_U2 = np.uint64(2)
_FULL = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(inline="always", cache=True)
def _mix64(x):
    x = (x ^ (x >> SHIFT_30)) * MIX_MUL_1
    x = (x ^ (x >> SHIFT_27)) * MIX_MUL_2
    return x ^ (x >> SHIFT_31)


@njit(cache=True, parallel=True)
def _minhash_matrix(indices, indptr, base, seed_start, num_hashes):
    n = indptr.shape[0] - 1
    out = np.empty((n, num_hashes), dtype=np.uint64)
    for p in prange(n):
        lo, hi = indptr[p], indptr[p + 1]
        for i in range(num_hashes):
            key = _mix64(base + np.uint64(seed_start + i + 1) * GOLDEN)
            best = _FULL
            for t in range(lo, hi):
                h = _mix64(key + (np.uint64(indices[t]) + ONE) * GOLDEN)
                if h < best:
                    best = h
            out[p, i] = best
    return out


@njit(cache=True, parallel=True)
def _simhash_matrix(indices, weights, indptr, base, seed_start, num_hashes):
    n = indptr.shape[0] - 1
    out = np.empty((n, num_hashes), dtype=np.uint64)
    for p in prange(n):
        lo, hi = indptr[p], indptr[p + 1]
        for i in range(num_hashes):
            key = _mix64(base + np.uint64(seed_start + i + 1) * GOLDEN)
            acc = 0.0
            for t in range(lo, hi):
                j = np.uint64(indices[t])
                ha = _mix64(key + (j * _U2 + ONE) * GOLDEN)
                hb = _mix64(key + (j * _U2 + _U2) * GOLDEN)
                u1 = np.float64((ha >> SHIFT_11) + ONE) * INV_2_53
                u2 = np.float64(hb >> SHIFT_11) * INV_2_53
                acc += np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2) * weights[t]
            out[p, i] = 1 if acc >= 0.0 else 0
    return out


@njit(cache=True, parallel=True)
def _intersection_matrix(q_indices, q_indptr, t_indices, t_indptr):
    nq = q_indptr.shape[0] - 1
    nt = t_indptr.shape[0] - 1
    out = np.empty((nq, nt), dtype=np.int64)
    for q in prange(nq):
        qs, qe = q_indptr[q], q_indptr[q + 1]
        for t in range(nt):
            a = qs
            b = t_indptr[t]
            be = t_indptr[t + 1]
            cnt = 0
            while a < qe and b < be:
                x = q_indices[a]
                y = t_indices[b]
                if x == y:
                    cnt += 1
                    a += 1
                    b += 1
                elif x < y:
                    a += 1
                else:
                    b += 1
            out[q, t] = cnt
    return out


@njit(cache=True, parallel=True)
def _dot_matrix(q_indices, q_weights, q_indptr, t_indices, t_weights, t_indptr):
    nq = q_indptr.shape[0] - 1
    nt = t_indptr.shape[0] - 1
    out = np.empty((nq, nt), dtype=np.float64)
    for q in prange(nq):
        qs, qe = q_indptr[q], q_indptr[q + 1]
        for t in range(nt):
            a = qs
            b = t_indptr[t]
            be = t_indptr[t + 1]
            acc = 0.0
            while a < qe and b < be:
                x = q_indices[a]
                y = t_indices[b]
                if x == y:
                    acc += q_weights[a] * t_weights[b]
                    a += 1
                    b += 1
                elif x < y:
                    a += 1
                else:
                    b += 1
            out[q, t] = acc
    return out


def minhash_matrix(indices, indptr, master_seed, seed_start, num_hashes):
    base = family_base(master_seed, MINHASH_SALT)
    return _minhash_matrix(indices, indptr, base, seed_start, num_hashes)


def simhash_matrix(indices, weights, indptr, master_seed, seed_start, num_hashes):
    base = family_base(master_seed, SIMHASH_SALT)
    return _simhash_matrix(indices, weights, indptr, base, seed_start, num_hashes)


def intersection_matrix(q_indices, q_indptr, t_indices, t_indptr):
    return _intersection_matrix(q_indices, q_indptr, t_indices, t_indptr)


def dot_matrix(q_indices, q_weights, q_indptr, t_indices, t_weights, t_indptr):
    return _dot_matrix(q_indices, q_weights, q_indptr, t_indices, t_weights, t_indptr)
