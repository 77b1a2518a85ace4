"""Pure-numpy backend for the hot kernels.

All functions take CSR-packed inputs (concatenated index arrays plus an
indptr array) and are drop-in equivalent to the numba versions.  Integer
outputs (minhash values, intersection counts) are bit-identical to the
numba backend.  SimHash projections sum per-coordinate draws with
``cumsum`` so the accumulation order matches the numba loop.
"""

import numpy as np

from ._common import (
    GOLDEN,
    INV_2_53,
    MINHASH_SALT,
    ONE,
    SHIFT_11,
    SIMHASH_SALT,
    TWO_PI,
    family_base,
    function_keys,
    mix64_array,
)

_U2 = np.uint64(2)
_FULL = np.uint64(0xFFFFFFFFFFFFFFFF)


def minhash_matrix(indices, indptr, master_seed, seed_start, num_hashes):
    n = indptr.shape[0] - 1
    out = np.empty((n, num_hashes), dtype=np.uint64)
    base = family_base(master_seed, MINHASH_SALT)
    keys = function_keys(base, seed_start, num_hashes)
    for p in range(n):
        coords = indices[indptr[p]:indptr[p + 1]].astype(np.uint64)
        if coords.size == 0:
            out[p] = _FULL
            continue
        vals = mix64_array(keys[:, None] + (coords[None, :] + ONE) * GOLDEN)
        out[p] = vals.min(axis=1)
    return out


def simhash_matrix(indices, weights, indptr, master_seed, seed_start, num_hashes):
    n = indptr.shape[0] - 1
    out = np.empty((n, num_hashes), dtype=np.uint64)
    base = family_base(master_seed, SIMHASH_SALT)
    keys = function_keys(base, seed_start, num_hashes)
    for p in range(n):
        lo, hi = indptr[p], indptr[p + 1]
        coords = indices[lo:hi].astype(np.uint64)
        if coords.size == 0:
            out[p] = 1
            continue
        w = weights[lo:hi]
        ha = mix64_array(keys[:, None] + (coords[None, :] * _U2 + ONE) * GOLDEN)
        hb = mix64_array(keys[:, None] + (coords[None, :] * _U2 + _U2) * GOLDEN)
        u1 = ((ha >> SHIFT_11) + ONE).astype(np.float64) * INV_2_53
        u2 = (hb >> SHIFT_11).astype(np.float64) * INV_2_53
        draws = np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)
        draws *= w[None, :]
        # cumsum accumulates left to right, matching the numba loop order.
        sums = np.cumsum(draws, axis=1)[:, -1]
        out[p] = (sums >= 0.0).astype(np.uint64)
    return out


def intersection_matrix(q_indices, q_indptr, t_indices, t_indptr):
    nq = q_indptr.shape[0] - 1
    nt = t_indptr.shape[0] - 1
    out = np.empty((nq, nt), dtype=np.int64)
    starts = t_indptr[:-1]
    ends = t_indptr[1:]
    for q in range(nq):
        row = q_indices[q_indptr[q]:q_indptr[q + 1]]
        if row.size == 0:
            out[q] = 0
            continue
        pos = np.searchsorted(row, t_indices)
        np.clip(pos, 0, row.size - 1, out=pos)
        member = (row[pos] == t_indices).astype(np.int64)
        cs = np.concatenate(([0], np.cumsum(member)))
        out[q] = cs[ends] - cs[starts]
    return out


def dot_matrix(q_indices, q_weights, q_indptr, t_indices, t_weights, t_indptr):
    nq = q_indptr.shape[0] - 1
    nt = t_indptr.shape[0] - 1
    out = np.empty((nq, nt), dtype=np.float64)
    starts = t_indptr[:-1]
    empty = t_indptr[:-1] == t_indptr[1:]
    total = t_indices.shape[0]
    safe_starts = np.minimum(starts, max(total - 1, 0))
    for q in range(nq):
        row = q_indices[q_indptr[q]:q_indptr[q + 1]]
        if row.size == 0 or total == 0:
            out[q] = 0.0
            continue
        rw = q_weights[q_indptr[q]:q_indptr[q + 1]]
        pos = np.searchsorted(row, t_indices)
        np.clip(pos, 0, row.size - 1, out=pos)
        match = row[pos] == t_indices
        contrib = np.where(match, t_weights * rw[pos], 0.0)
        sums = np.add.reduceat(contrib, safe_starts)
        sums[empty] = 0.0
        out[q] = sums
    return out
