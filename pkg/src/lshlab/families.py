"""Seeded, deterministic hash families: MinHash, SimHash, b-bit minwise.

A true random permutation over the coordinate universe is modeled by a
keyed 64-bit mixer applied to coordinate ids; MinHash keeps the minimum
mixed value.  SimHash draws one standard normal per (function, coordinate)
from two counter-derived uniforms and keeps the sign of the weighted
projection.  b-bit minwise hashing keeps the lowest b bits of the MinHash
value, so its collision probability is exactly
resemblance + (1 - resemblance) * 2^-b in this model.

Everything is a pure function of (master_seed, function index, input), so
identical configs reproduce identical hashes across runs and threads.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .similarity import SparseVector, pack_csr, pack_csr_weighted

__all__ = [
    "MINHASH",
    "SIMHASH",
    "BBIT_MINHASH",
    "FAMILY_KINDS",
    "DEFAULT_SEED",
    "HashFamilyConfig",
    "hash_matrix",
    "minhash",
    "simhash",
    "bbit_minhash",
    "estimate_collision",
    "permutation_collision_probability",
]

MINHASH = "minhash"
SIMHASH = "simhash"
BBIT_MINHASH = "bbit"
FAMILY_KINDS = (MINHASH, SIMHASH, BBIT_MINHASH)

DEFAULT_SEED = 42

# Largest universe whose permutations we will enumerate exactly (9! = 362880).
MAX_ORACLE_DIM = 9


@dataclass(frozen=True)
class HashFamilyConfig:
    """Identifies a family: kind, function count, seed, and bit width.

    ``bits`` must be given for the b-bit family (1..64) and omitted
    otherwise.
    """

    kind: str
    num_hashes: int
    master_seed: int = DEFAULT_SEED
    bits: int | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.num_hashes < 1:
            raise ValueError("num_hashes must be at least 1")
        if self.kind == BBIT_MINHASH:
            if self.bits is None:
                raise ValueError("bits is required for the b-bit family")
            if not 1 <= self.bits <= 64:
                raise ValueError("bits must lie in 1..64")
        elif self.bits is not None:
            raise ValueError(f"bits is only valid for kind {BBIT_MINHASH!r}")

    @property
    def label(self) -> str:
        if self.kind == BBIT_MINHASH:
            return f"bbit{self.bits}"
        return self.kind


def _validate_points(points, kind):
    for i, p in enumerate(points):
        if p.nnz == 0:
            raise ValueError(f"point {i}: cannot hash an empty vector")
        if kind in (MINHASH, BBIT_MINHASH) and not p.is_binary:
            raise ValueError(f"point {i}: {kind} requires binary vectors")


def _truncate(values: np.ndarray, bits: int) -> np.ndarray:
    if bits >= 64:
        return values
    return values & np.uint64((1 << bits) - 1)


def hash_matrix(points, config: HashFamilyConfig, seed_start: int = 0,
                num_hashes: int | None = None) -> np.ndarray:
    """Hash every point with functions seed_start..seed_start+n-1.

    Returns uint64 of shape (len(points), n): raw minimum values for
    MinHash, 0/1 sign bits for SimHash, truncated values for b-bit.
    """
    n = config.num_hashes if num_hashes is None else num_hashes
    if n < 1:
        raise ValueError("num_hashes must be at least 1")
    _validate_points(points, config.kind)
    if config.kind == SIMHASH:
        indices, weights, indptr = pack_csr_weighted(points)
        return _kernels.simhash_matrix(
            indices, weights, indptr, config.master_seed, seed_start, n
        )
    indices, indptr = pack_csr(points)
    values = _kernels.minhash_matrix(
        indices, indptr, config.master_seed, seed_start, n
    )
    if config.kind == BBIT_MINHASH:
        values = _truncate(values, config.bits)
    return values


def minhash(x: SparseVector, seed_index: int, config: HashFamilyConfig) -> int:
    """Minimum mixed value of x's coordinates under function seed_index."""
    if not x.is_binary:
        raise ValueError("minhash requires a binary vector")
    if x.nnz == 0:
        raise ValueError("cannot hash an empty vector")
    indices, indptr = pack_csr([x])
    return int(_kernels.minhash_matrix(
        indices, indptr, config.master_seed, seed_index, 1)[0, 0])


def simhash(x: SparseVector, seed_index: int, config: HashFamilyConfig) -> int:
    """Sign bit (0 or 1) of the random projection of x under seed_index."""
    if x.nnz == 0:
        raise ValueError("cannot hash an empty vector")
    indices, weights, indptr = pack_csr_weighted([x])
    return int(_kernels.simhash_matrix(
        indices, weights, indptr, config.master_seed, seed_index, 1)[0, 0])


def bbit_minhash(x: SparseVector, seed_index: int, config: HashFamilyConfig) -> int:
    """Lowest ``config.bits`` bits of the MinHash value (parity at b=1)."""
    if config.bits is None:
        raise ValueError("config.bits is required for b-bit hashing")
    value = np.uint64(minhash(x, seed_index, config))
    return int(_truncate(value, config.bits))


def estimate_collision(x: SparseVector, y: SparseVector,
                       config: HashFamilyConfig, n: int) -> float:
    """Fraction of functions 0..n-1 on which x and y hash identically."""
    if n < 1:
        raise ValueError("need at least one hash function")
    hx, hy = hash_matrix([x, y], config, seed_start=0, num_hashes=n)
    return float(np.mean(hx == hy))


_PERM_CACHE: dict[int, np.ndarray] = {}


def _all_permutations(dim: int) -> np.ndarray:
    perms = _PERM_CACHE.get(dim)
    if perms is None:
        perms = np.array(list(itertools.permutations(range(dim))), dtype=np.int8)
        perms.setflags(write=False)
        _PERM_CACHE[dim] = perms
    return perms


def permutation_collision_probability(x: SparseVector, y: SparseVector) -> Fraction:
    """Exact MinHash collision probability via full permutation enumeration.

    Counts, over all dim! permutations of the universe, how often the
    minimum permuted value of x equals that of y.  The result is an exact
    rational equal to the resemblance.  Only feasible for small universes.
    """
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} != {y.dim}")
    if x.dim > MAX_ORACLE_DIM:
        raise ValueError(f"universe too large to enumerate (dim > {MAX_ORACLE_DIM})")
    if x.nnz == 0 or y.nnz == 0:
        raise ValueError("oracle undefined for empty sets")
    perms = _all_permutations(x.dim)
    min_x = perms[:, x.indices].min(axis=1)
    min_y = perms[:, y.indices].min(axis=1)
    return Fraction(int(np.sum(min_x == min_y)), perms.shape[0])
