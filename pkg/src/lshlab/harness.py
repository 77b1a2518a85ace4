"""Retrieval benchmark protocol: gold standard, pair statistics, sweeps.

The gold standard is the exact brute-force cosine ranking of train points
per query.  The (K, L) sweep hashes every point once with max(K)*L
functions and assembles per-table bucket keys from prefixes of each
table's function block, so a full grid costs one hashing pass.  Table t of
a sweep therefore uses functions t*Kmax .. t*Kmax+K-1; with this prefix
construction candidate sets shrink as K grows and grow as L grows at
fixed seeds.

Ranking ties are broken by ascending train id everywhere.  Candidates are
deduplicated across tables before counting, and recall counts gold
neighbors present in the raw candidate set (no re-ranking).
"""

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .datasets import BINARY, WEIGHTED, Dataset
from .families import BBIT_MINHASH, MINHASH, SIMHASH, HashFamilyConfig, hash_matrix
from .index import chain_key_columns
from .similarity import pack_csr, pack_csr_weighted

__all__ = [
    "GoldStandard",
    "Histogram",
    "RankProfile",
    "OverlapCurve",
    "RecallTarget",
    "BenchmarkReport",
    "cosine_matrix",
    "resemblance_matrix",
    "gold_topk",
    "z_histogram",
    "top_location_profile",
    "ranklist_overlap",
    "sweep",
]


@dataclass(frozen=True)
class GoldStandard:
    """Per query: the top-k train ids by exact cosine, ties by ascending id."""

    k: int
    ids: np.ndarray    # (num_query, k) int64
    sims: np.ndarray   # (num_query, k) float64, nonincreasing rows


@dataclass(frozen=True)
class Histogram:
    bin_lo: np.ndarray
    bin_hi: np.ndarray
    count: np.ndarray

    @property
    def total(self) -> int:
        return int(self.count.sum())


@dataclass(frozen=True)
class RankProfile:
    """Median similarity at each rank, with the envelope of the cosine column."""

    rank: np.ndarray
    median_cosine: np.ndarray
    median_resemblance: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


@dataclass(frozen=True)
class OverlapCurve:
    depth: np.ndarray
    mean_overlap: np.ndarray


@dataclass(frozen=True)
class RecallTarget:
    level: float
    attained: bool
    min_fraction: float | None
    best_k: int | None
    best_l: int | None


@dataclass(frozen=True)
class BenchmarkReport:
    family_label: str
    top_k: int
    k_values: np.ndarray
    l_values: np.ndarray
    recalls: np.ndarray
    fractions: np.ndarray
    targets: list[RecallTarget]


def _require_nonempty(dataset: Dataset) -> None:
    if not dataset.query or not dataset.train:
        raise ValueError("dataset must have nonempty query and train partitions")
    for part_name, part in (("query", dataset.query), ("train", dataset.train)):
        for i, v in enumerate(part):
            if v.nnz == 0:
                raise ValueError(f"{part_name} point {i} is empty")


def _nnz_array(points) -> np.ndarray:
    return np.array([p.nnz for p in points], dtype=np.int64)


def cosine_matrix(dataset: Dataset) -> np.ndarray:
    """All query x train cosine similarities, exact."""
    _require_nonempty(dataset)
    if dataset.mode == BINARY:
        qi, qp = pack_csr(dataset.query)
        ti, tp = pack_csr(dataset.train)
        inter = _kernels.intersection_matrix(qi, qp, ti, tp).astype(np.float64)
        fq = _nnz_array(dataset.query).astype(np.float64)
        ft = _nnz_array(dataset.train).astype(np.float64)
        # sqrt of the count product, not a product of sqrts: keeps identical
        # pairs at exactly 1 and matches the scalar cosine bit for bit.
        return inter / np.sqrt(np.outer(fq, ft))
    qi, qw, qp = pack_csr_weighted(dataset.query)
    ti, tw, tp = pack_csr_weighted(dataset.train)
    dots = _kernels.dot_matrix(qi, qw, qp, ti, tw, tp)
    qn = np.array([v.norm() for v in dataset.query])
    tn = np.array([v.norm() for v in dataset.train])
    return dots / np.outer(qn, tn)


def resemblance_matrix(dataset: Dataset) -> np.ndarray:
    """All query x train resemblance values; binary datasets only."""
    _require_nonempty(dataset)
    if dataset.mode != BINARY:
        raise ValueError("resemblance requires a binary dataset")
    qi, qp = pack_csr(dataset.query)
    ti, tp = pack_csr(dataset.train)
    inter = _kernels.intersection_matrix(qi, qp, ti, tp).astype(np.float64)
    union = (
        _nnz_array(dataset.query)[:, None]
        + _nnz_array(dataset.train)[None, :]
        - inter
    )
    return inter / union


def _descending_order(sims: np.ndarray) -> np.ndarray:
    """Row-wise order: similarity descending, ties by ascending train id."""
    n_q, n_t = sims.shape
    ids = np.arange(n_t)
    out = np.empty((n_q, n_t), dtype=np.int64)
    for q in range(n_q):
        out[q] = np.lexsort((ids, -sims[q]))
    return out


def gold_topk(dataset: Dataset, k: int) -> GoldStandard:
    """Exact top-k cosine neighbors per query."""
    _require_nonempty(dataset)
    if not 1 <= k <= len(dataset.train):
        raise ValueError(f"k must lie in 1..{len(dataset.train)}")
    sims = cosine_matrix(dataset)
    order = _descending_order(sims)[:, :k]
    top_sims = np.take_along_axis(sims, order, axis=1)
    return GoldStandard(k=k, ids=order, sims=top_sims)


def z_histogram(dataset: Dataset, bin_width: float = 0.01,
                skip_empty: bool = False) -> Histogram:
    """Histogram of the balance statistic over all query x train pairs.

    Bins are [i*w, (i+1)*w); only nonempty bins are emitted.  Empty vectors
    raise unless ``skip_empty``, in which case their pairs are dropped.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    if dataset.mode != BINARY:
        raise ValueError("the balance statistic requires a binary dataset")
    fq = _nnz_array(dataset.query)
    ft = _nnz_array(dataset.train)
    if not skip_empty and (np.any(fq == 0) or np.any(ft == 0)):
        bad_q = np.flatnonzero(fq == 0)
        bad_t = np.flatnonzero(ft == 0)
        raise ValueError(
            f"empty vectors present (query {bad_q.tolist()}, train {bad_t.tolist()})"
        )
    fq = fq[fq > 0]
    ft = ft[ft > 0]
    uq, cq = np.unique(fq, return_counts=True)
    ut, ct = np.unique(ft, return_counts=True)
    ratio = ut[None, :].astype(np.float64) / uq[:, None].astype(np.float64)
    z = np.sqrt(ratio) + np.sqrt(1.0 / ratio)
    weights = np.outer(cq, ct)
    bins = np.floor(z / bin_width).astype(np.int64)
    counts: dict[int, int] = {}
    for b, w in zip(bins.ravel(), weights.ravel()):
        counts[int(b)] = counts.get(int(b), 0) + int(w)
    keys = np.array(sorted(counts), dtype=np.int64)
    return Histogram(
        bin_lo=keys * bin_width,
        bin_hi=(keys + 1) * bin_width,
        count=np.array([counts[int(k)] for k in keys], dtype=np.int64),
    )


def top_location_profile(dataset: Dataset, depth: int) -> RankProfile:
    """Median cosine and resemblance at each rank 1..depth.

    Cosine and resemblance are sorted independently per query; the envelope
    columns are computed from the median-cosine column.
    """
    _require_nonempty(dataset)
    if not 1 <= depth <= len(dataset.train):
        raise ValueError(f"depth must lie in 1..{len(dataset.train)}")
    s_mat = cosine_matrix(dataset)
    r_mat = resemblance_matrix(dataset)
    s_sorted = np.take_along_axis(s_mat, _descending_order(s_mat), axis=1)
    r_sorted = np.take_along_axis(r_mat, _descending_order(r_mat), axis=1)
    med_s = np.median(s_sorted[:, :depth], axis=0)
    med_r = np.median(r_sorted[:, :depth], axis=0)
    return RankProfile(
        rank=np.arange(1, depth + 1),
        median_cosine=med_s,
        median_resemblance=med_r,
        lower=med_s * med_s,
        upper=med_s / (2.0 - med_s),
    )


def ranklist_overlap(dataset: Dataset, depth: int) -> OverlapCurve:
    """Mean resemblance of the cosine-ranked and resemblance-ranked top-T
    id sets, for T = 1..depth."""
    _require_nonempty(dataset)
    if not 1 <= depth <= len(dataset.train):
        raise ValueError(f"depth must lie in 1..{len(dataset.train)}")
    s_order = _descending_order(cosine_matrix(dataset))
    r_order = _descending_order(resemblance_matrix(dataset))
    n_q = len(dataset.query)
    n_t = len(dataset.train)
    totals = np.zeros(depth)
    for q in range(n_q):
        seen_s = np.zeros(n_t, dtype=bool)
        seen_r = np.zeros(n_t, dtype=bool)
        inter = 0
        for t in range(depth):
            s_id = s_order[q, t]
            r_id = r_order[q, t]
            if s_id == r_id:
                inter += 1
            else:
                if seen_r[s_id]:
                    inter += 1
                if seen_s[r_id]:
                    inter += 1
            seen_s[s_id] = True
            seen_r[r_id] = True
            totals[t] += inter / (2 * (t + 1) - inter)
    return OverlapCurve(depth=np.arange(1, depth + 1),
                        mean_overlap=totals / n_q)


def _effective_mode(dataset: Dataset, mode: str) -> str:
    if mode not in ("auto", BINARY, WEIGHTED):
        raise ValueError(f"mode must be 'auto', 'binary', or 'weighted', got {mode!r}")
    if mode == "auto":
        return dataset.mode
    return mode


def _binarized_dataset(dataset: Dataset) -> Dataset:
    if dataset.mode == BINARY:
        return dataset
    return Dataset(
        name=dataset.name,
        query=[v.binarized() for v in dataset.query],
        train=[v.binarized() for v in dataset.train],
        dim=dataset.dim,
        mode=BINARY,
    )


def _hashing_views(dataset: Dataset, family: HashFamilyConfig, mode: str):
    """Vectors each family actually hashes under the given effective mode."""
    if mode == BINARY or dataset.mode == BINARY \
            or family.kind in (MINHASH, BBIT_MINHASH):
        query = [v.binarized() for v in dataset.query]
        train = [v.binarized() for v in dataset.train]
    else:
        query = dataset.query
        train = dataset.train
    return query, train


def sweep(dataset: Dataset, family: HashFamilyConfig, k_grid, l_grid,
          top_k: int, recall_levels, mode: str = "auto") -> BenchmarkReport:
    """Recall and fraction-retrieved over every (K, L) combination.

    For each recall level, reports the minimum fraction over the grid that
    attains it (unattained levels are flagged, not fatal).  Mode "binary"
    binarizes the whole benchmark; "weighted" keeps the gold standard on
    the weighted cosine while minhash-type families hash the binarized
    vectors and simhash projects the raw ones.
    """
    k_grid = sorted(set(int(k) for k in k_grid))
    l_grid = sorted(set(int(l) for l in l_grid))
    if not k_grid or not l_grid:
        raise ValueError("k_grid and l_grid must be nonempty")
    if k_grid[0] < 1 or l_grid[0] < 1:
        raise ValueError("grid values must be at least 1")
    levels = list(recall_levels)
    if any(not 0.0 < lv <= 1.0 for lv in levels):
        raise ValueError("recall levels must lie in (0, 1]")

    effective = _effective_mode(dataset, mode)
    gold_view = _binarized_dataset(dataset) if effective == BINARY else dataset
    gold = gold_topk(gold_view, top_k)
    q_vecs, t_vecs = _hashing_views(dataset, family, effective)
    kmax, lmax = k_grid[-1], l_grid[-1]
    fam = replace(family, num_hashes=kmax * lmax)
    t_hash = hash_matrix(t_vecs, fam)
    q_hash = hash_matrix(q_vecs, fam)

    n_q, n_t = len(q_vecs), len(t_vecs)
    l_set = set(l_grid)
    rows_k, rows_l, rows_recall, rows_fraction = [], [], [], []
    row_index = np.arange(n_q)[:, None]
    for k in k_grid:
        cand = np.zeros((n_q, n_t), dtype=bool)
        for l in range(1, lmax + 1):
            t0 = (l - 1) * kmax
            t_keys = chain_key_columns(t_hash[:, t0:t0 + k])
            q_keys = chain_key_columns(q_hash[:, t0:t0 + k])
            order = np.argsort(t_keys, kind="stable")
            sorted_keys = t_keys[order]
            lo = np.searchsorted(sorted_keys, q_keys, side="left")
            hi = np.searchsorted(sorted_keys, q_keys, side="right")
            for q in range(n_q):
                if lo[q] < hi[q]:
                    cand[q, order[lo[q]:hi[q]]] = True
            if l in l_set:
                hits = cand[row_index, gold.ids]
                rows_k.append(k)
                rows_l.append(l)
                rows_recall.append(float(hits.mean()))
                rows_fraction.append(float(cand.mean()))

    k_arr = np.array(rows_k, dtype=np.int64)
    l_arr = np.array(rows_l, dtype=np.int64)
    recall_arr = np.array(rows_recall)
    fraction_arr = np.array(rows_fraction)

    targets = []
    for level in levels:
        ok = np.flatnonzero(recall_arr >= level)
        if ok.size == 0:
            targets.append(RecallTarget(level, False, None, None, None))
            continue
        pick = ok[np.lexsort((l_arr[ok], k_arr[ok], fraction_arr[ok]))[0]]
        targets.append(RecallTarget(
            level=level,
            attained=True,
            min_fraction=float(fraction_arr[pick]),
            best_k=int(k_arr[pick]),
            best_l=int(l_arr[pick]),
        ))
    return BenchmarkReport(
        family_label=family.label,
        top_k=top_k,
        k_values=k_arr,
        l_values=l_arr,
        recalls=recall_arr,
        fractions=fraction_arr,
        targets=targets,
    )
