"""Exact similarity measures on sparse vectors and the bound envelope.

Binary vectors are treated as sets of nonzero coordinates.  For a pair with
nonzero counts f1, f2 and intersection size a:

    cosine      = a / sqrt(f1 * f2)
    resemblance = a / (f1 + f2 - a)
    balance     = sqrt(f2/f1) + sqrt(f1/f2)   (>= 2, == 2 iff f1 == f2)

and the two are linked by resemblance = cosine / (balance - cosine) and
bounded by cosine^2 <= resemblance <= cosine / (2 - cosine).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

__all__ = [
    "SparseVector",
    "PairStats",
    "pack_csr",
    "intersection_size",
    "cosine",
    "resemblance",
    "balance_statistic",
    "pair_stats",
    "resemblance_bounds",
    "restricted_lower_bound",
    "tightness_witness",
]


@dataclass(frozen=True, eq=False)
class SparseVector:
    """Sparse point: strictly increasing coordinate ids below ``dim``.

    ``weights`` is None in binary mode; in weighted mode it is a parallel
    array of nonzero values.
    """

    indices: np.ndarray
    dim: int
    weights: np.ndarray | None = None

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indices", idx)
        if idx.ndim != 1:
            raise ValueError("indices must be one-dimensional")
        if self.dim < 0:
            raise ValueError("dim must be nonnegative")
        if idx.size:
            if idx[0] < 0 or idx[-1] >= self.dim:
                raise ValueError(f"indices must lie in [0, {self.dim})")
            if not np.all(np.diff(idx) > 0):
                raise ValueError("indices must be strictly increasing")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=np.float64)
            object.__setattr__(self, "weights", w)
            if w.shape != idx.shape:
                raise ValueError("weights must parallel indices")
            if np.any(w == 0.0):
                raise ValueError("weights must be nonzero")
            w.setflags(write=False)
        idx.setflags(write=False)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    @property
    def is_binary(self) -> bool:
        return self.weights is None

    def binarized(self) -> "SparseVector":
        """Drop weights, keeping the set of nonzero coordinates."""
        if self.weights is None:
            return self
        return SparseVector(self.indices, self.dim)

    def norm(self) -> float:
        if self.weights is None:
            return math.sqrt(self.nnz)
        return float(np.sqrt(np.dot(self.weights, self.weights)))


@dataclass(frozen=True)
class PairStats:
    """All pairwise quantities for one binary pair."""

    nnz_x: int
    nnz_y: int
    overlap: int
    cosine: float
    resemblance: float
    balance: float


def pack_csr(points) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate vectors into (indices, indptr) CSR arrays."""
    indptr = np.zeros(len(points) + 1, dtype=np.int64)
    for i, p in enumerate(points):
        indptr[i + 1] = indptr[i] + p.nnz
    if points:
        indices = np.concatenate([p.indices for p in points])
    else:
        indices = np.empty(0, dtype=np.int64)
    return indices, indptr


def pack_csr_weighted(points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """CSR arrays plus weights; binary vectors contribute unit weights."""
    indices, indptr = pack_csr(points)
    if points:
        weights = np.concatenate(
            [p.weights if p.weights is not None else np.ones(p.nnz) for p in points]
        )
    else:
        weights = np.empty(0, dtype=np.float64)
    return indices, weights, indptr


def _check_pair(x: SparseVector, y: SparseVector) -> None:
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} != {y.dim}")


def intersection_size(x: SparseVector, y: SparseVector) -> int:
    """Size of the coordinate intersection, by sorted merge."""
    _check_pair(x, y)
    xi, xp = pack_csr([x])
    yi, yp = pack_csr([y])
    return int(_kernels.intersection_matrix(xi, xp, yi, yp)[0, 0])


def cosine(x: SparseVector, y: SparseVector) -> float:
    """Cosine similarity; set overlap form in binary mode, normalized inner
    product in weighted mode."""
    _check_pair(x, y)
    if x.nnz == 0 or y.nnz == 0:
        raise ValueError("cosine undefined for empty vectors")
    if x.is_binary and y.is_binary:
        a = intersection_size(x, y)
        return a / math.sqrt(x.nnz * y.nnz)
    xi, xw, xp = pack_csr_weighted([x])
    yi, yw, yp = pack_csr_weighted([y])
    dot = float(_kernels.dot_matrix(xi, xw, xp, yi, yw, yp)[0, 0])
    return dot / (x.norm() * y.norm())


def resemblance(x: SparseVector, y: SparseVector) -> float:
    """Intersection over union of the nonzero coordinate sets."""
    _check_pair(x, y)
    if not (x.is_binary and y.is_binary):
        raise ValueError("resemblance requires binary vectors")
    union = x.nnz + y.nnz
    if union == 0:
        raise ValueError("resemblance undefined when both vectors are empty")
    a = intersection_size(x, y)
    return a / (union - a)


def balance_statistic(nnz_x: int, nnz_y: int) -> float:
    """sqrt(f2/f1) + sqrt(f1/f2); minimum 2, attained iff the counts match."""
    if nnz_x <= 0 or nnz_y <= 0:
        raise ValueError("balance undefined for empty vectors")
    return math.sqrt(nnz_y / nnz_x) + math.sqrt(nnz_x / nnz_y)


def pair_stats(x: SparseVector, y: SparseVector) -> PairStats:
    _check_pair(x, y)
    if not (x.is_binary and y.is_binary):
        raise ValueError("pair_stats requires binary vectors")
    if x.nnz == 0 or y.nnz == 0:
        raise ValueError("pair_stats undefined for empty vectors")
    a = intersection_size(x, y)
    f1, f2 = x.nnz, y.nnz
    return PairStats(
        nnz_x=f1,
        nnz_y=f2,
        overlap=a,
        cosine=a / math.sqrt(f1 * f2),
        resemblance=a / (f1 + f2 - a),
        balance=balance_statistic(f1, f2),
    )


def resemblance_bounds(cos_sim: float) -> tuple[float, float]:
    """Envelope (cos^2, cos / (2 - cos)); the two ends meet at 0 and 1."""
    if not 0.0 <= cos_sim <= 1.0:
        raise ValueError("cosine similarity must lie in [0, 1]")
    return cos_sim * cos_sim, cos_sim / (2.0 - cos_sim)


def restricted_lower_bound(cos_sim: float, balance_cap: float) -> float:
    """Lower bound cos / (balance_cap - cos), valid when pairs satisfy
    balance <= balance_cap.  Coincides with the upper bound at cap 2."""
    if not 0.0 <= cos_sim <= 1.0:
        raise ValueError("cosine similarity must lie in [0, 1]")
    if balance_cap < 2.0:
        raise ValueError("balance cap below 2 is unsatisfiable")
    return cos_sim / (balance_cap - cos_sim)


def tightness_witness(kind: str, p: int, q: int) -> tuple[int, int, int]:
    """Integer triple (nnz_x, nnz_y, overlap) attaining a bound exactly.

    kind "upper": counts (q, q, p) give resemblance == cos / (2 - cos) with
    cos = p/q.  kind "lower": counts (q, p, p) give resemblance == cos^2
    with cos = sqrt(p/q).
    """
    if p <= 0 or q < p:
        raise ValueError("witness requires 1 <= p <= q")
    if kind == "upper":
        return q, q, p
    if kind == "lower":
        return q, p, p
    raise ValueError(f"kind must be 'upper' or 'lower', got {kind!r}")
