"""Dataset ingestion, deterministic synthesis, and the corpus registry.

Input files use the svmlight/libsvm sparse text format: an optional label
followed by ``index:value`` pairs with strictly increasing 1-based indices.
Synthesis plants, for each query point, a block of train neighbors with
prescribed (size ratio, cosine) cells, so retrieval experiments have a
known similarity structure.  All randomness comes from a counter-based
64-bit mixer, making generated corpora reproducible byte-for-byte across
platforms and library versions.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._kernels._common import GOLDEN, MASK64, mix64
from .families import DEFAULT_SEED
from .similarity import SparseVector

__all__ = [
    "Dataset",
    "ProfileCell",
    "DEFAULT_PROFILE",
    "DEFAULT_QUERY_NNZ",
    "SeedStream",
    "load_svmlight",
    "load_dataset",
    "write_svmlight",
    "synthesize",
    "planted_pair",
    "DATASET_REGISTRY",
    "check_registry",
]

BINARY = "binary"
WEIGHTED = "weighted"


@dataclass(frozen=True)
class Dataset:
    name: str
    query: list
    train: list
    dim: int
    mode: str

    def __post_init__(self):
        if self.mode not in (BINARY, WEIGHTED):
            raise ValueError(f"mode must be 'binary' or 'weighted', got {self.mode!r}")
        for part in (self.query, self.train):
            for v in part:
                if v.dim != self.dim:
                    raise ValueError("all vectors must share the dataset dim")


@dataclass(frozen=True)
class RegistryEntry:
    num_query: int
    num_train: int
    dim: int


# Published corpora commonly used for hashing benchmarks, with the expected
# partition sizes used to validate downloads.  Files are not bundled.
DATASET_REGISTRY = {
    "mnist": RegistryEntry(10_000, 60_000, 784),
    "news20": RegistryEntry(2_000, 18_000, 1_355_191),
    "nytimes": RegistryEntry(5_000, 100_000, 102_660),
    "rcv1": RegistryEntry(5_000, 100_000, 47_236),
    "url": RegistryEntry(5_000, 90_000, 3_231_958),
    "webspam": RegistryEntry(5_000, 100_000, 16_609_143),
}


def check_registry(name: str, dataset: Dataset) -> None:
    """Validate partition sizes and dim against the published registry."""
    entry = DATASET_REGISTRY.get(name.lower())
    if entry is None:
        raise ValueError(f"unknown registry name {name!r}")
    actual = (len(dataset.query), len(dataset.train), dataset.dim)
    expected = (entry.num_query, entry.num_train, entry.dim)
    if actual != expected:
        raise ValueError(
            f"{name}: expected (query, train, dim) = {expected}, got {actual}"
        )


class SeedStream:
    """Counter-based deterministic random stream over plain integers."""

    __slots__ = ("_key", "_counter")

    def __init__(self, seed: int, salt: int = 0):
        self._key = mix64((seed ^ salt) & MASK64)
        self._counter = 0

    def next_u64(self) -> int:
        self._counter += 1
        return mix64((self._key + self._counter * int(GOLDEN)) & MASK64)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow needs a positive bound")
        limit = 2**64 - (2**64 % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def sample(self, count: int, universe: int) -> np.ndarray:
        """Uniform sample of ``count`` distinct ids from range(universe),
        sorted ascending (sparse Fisher-Yates)."""
        if count > universe:
            raise ValueError("cannot sample more ids than the universe holds")
        swapped: dict[int, int] = {}
        out = np.empty(count, dtype=np.int64)
        for i in range(count):
            j = i + self.randbelow(universe - i)
            out[i] = swapped.get(j, j)
            swapped[j] = swapped.get(i, i)
        out.sort()
        return out


def _parse_lines(path):
    """Yield (lineno, label, ids, values) for each data line."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            label = None
            if ":" not in tokens[0]:
                label = tokens[0]
                tokens = tokens[1:]
            ids: list[int] = []
            values: list[float] = []
            prev = 0
            for tok in tokens:
                try:
                    idx_s, val_s = tok.split(":", 1)
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError:
                    raise ValueError(
                        f"{path}:{lineno}: malformed feature {tok!r}"
                    ) from None
                if idx < 1:
                    raise ValueError(f"{path}:{lineno}: index {idx} is not 1-based")
                if idx <= prev:
                    raise ValueError(
                        f"{path}:{lineno}: indices must be strictly increasing"
                    )
                prev = idx
                if val != 0.0:
                    ids.append(idx - 1)
                    values.append(val)
            yield lineno, label, ids, values


def load_svmlight(path, binarize: bool = False,
                  dim: int | None = None) -> tuple[list, int]:
    """Parse one partition; returns (vectors, dim).

    1-based file indices become 0-based coordinates.  With ``binarize``,
    values are dropped and only presence is kept.  ``dim`` defaults to the
    largest index seen plus one.
    """
    rows = [(ids, values) for _, _, ids, values in _parse_lines(path)]
    max_idx = max((ids[-1] for ids, _ in rows if ids), default=-1)
    if dim is None:
        dim = max_idx + 1
    elif max_idx >= dim:
        raise ValueError(f"{path}: index {max_idx} exceeds dim {dim}")
    vectors = []
    for ids, values in rows:
        idx = np.asarray(ids, dtype=np.int64)
        if binarize:
            vectors.append(SparseVector(idx, dim))
        else:
            vectors.append(SparseVector(idx, dim, np.asarray(values)))
    return vectors, dim


def load_dataset(query_path, train_path, binarize: bool = False,
                 dim: int | None = None, name: str = "") -> Dataset:
    """Load query and train partitions under one shared dimension."""
    query, qdim = load_svmlight(query_path, binarize=binarize, dim=dim)
    train, tdim = load_svmlight(train_path, binarize=binarize, dim=dim)
    shared = dim if dim is not None else max(qdim, tdim)
    query = [SparseVector(v.indices, shared, v.weights) for v in query]
    train = [SparseVector(v.indices, shared, v.weights) for v in train]
    return Dataset(
        name=name or "dataset",
        query=query,
        train=train,
        dim=shared,
        mode=BINARY if binarize else WEIGHTED,
    )


def write_svmlight(path, vectors) -> None:
    """Write vectors in svmlight format (constant label 1, 1-based indices)."""
    with open(path, "w", encoding="utf-8") as fh:
        for v in vectors:
            if v.weights is None:
                feats = " ".join(f"{int(j) + 1}:1" for j in v.indices)
            else:
                feats = " ".join(
                    f"{int(j) + 1}:{float(w)!r}" for j, w in zip(v.indices, v.weights)
                )
            fh.write(f"1 {feats}\n" if feats else "1\n")


@dataclass(frozen=True)
class ProfileCell:
    """One planted neighbor per query: the neighbor is ``ratio`` times the
    query's cardinality and sits at the given cosine."""

    ratio: float
    cosine: float

    def plan(self, query_nnz: int) -> tuple[int, int]:
        """Resolve to integer (neighbor_nnz, overlap) for a given query size."""
        f2 = int(round(self.ratio * query_nnz))
        if f2 < 1:
            raise ValueError(f"cell {self} yields an empty neighbor")
        a = int(round(self.cosine * math.sqrt(query_nnz * f2)))
        if a > min(query_nnz, f2):
            raise ValueError(
                f"infeasible cell {self}: overlap {a} exceeds "
                f"min({query_nnz}, {f2})"
            )
        if a < 0:
            raise ValueError(f"infeasible cell {self}: negative overlap")
        return f2, a


# Ten planted neighbors per query, cosines from 0.95 down to 0.50 with a
# mixed cardinality-ratio profile (balance between 2.0 and about 2.31).
DEFAULT_PROFILE = (
    ProfileCell(1.0, 0.95),
    ProfileCell(1.0, 0.90),
    ProfileCell(1.0, 0.85),
    ProfileCell(1.2, 0.80),
    ProfileCell(1.5, 0.75),
    ProfileCell(1.8, 0.70),
    ProfileCell(2.0, 0.65),
    ProfileCell(2.2, 0.60),
    ProfileCell(2.5, 0.55),
    ProfileCell(3.0, 0.50),
)

DEFAULT_QUERY_NNZ = (40, 60, 80)


def _ranks_to_complement(ranks: np.ndarray, excluded: np.ndarray) -> np.ndarray:
    """Map ranks into the complement of a sorted exclusion set."""
    out = np.empty_like(ranks)
    for i, rank in enumerate(ranks):
        cur = int(rank)
        while True:
            skip = int(np.searchsorted(excluded, cur, side="right"))
            nxt = int(rank) + skip
            if nxt == cur:
                break
            cur = nxt
        out[i] = cur
    return out


def _neighbor_of(q: SparseVector, f2: int, overlap: int, dim: int,
                 stream: SeedStream) -> SparseVector:
    """Fresh vector sharing exactly ``overlap`` coordinates with q."""
    shared = q.indices[stream.sample(overlap, q.nnz)]
    fresh = _ranks_to_complement(stream.sample(f2 - overlap, dim - q.nnz),
                                 q.indices)
    return SparseVector(np.sort(np.concatenate([shared, fresh])), dim)


def planted_pair(f1: int, f2: int, overlap: int, dim: int,
                 stream: SeedStream) -> tuple[SparseVector, SparseVector]:
    """Draw a binary pair with exact counts (f1, f2, overlap)."""
    if f1 < 1 or f2 < 1:
        raise ValueError("both cardinalities must be positive")
    if overlap > min(f1, f2):
        raise ValueError("overlap exceeds the smaller cardinality")
    if f1 + f2 - overlap > dim:
        raise ValueError("union does not fit in the universe")
    x = SparseVector(stream.sample(f1, dim), dim)
    return x, _neighbor_of(x, f2, overlap, dim, stream)


def synthesize(num_query: int, num_train: int, dim: int,
               profile=DEFAULT_PROFILE, query_nnz=DEFAULT_QUERY_NNZ,
               seed: int = DEFAULT_SEED, name: str = "synthetic") -> Dataset:
    """Planted-neighbor corpus: each query gets one train neighbor per
    profile cell; remaining train points are random background."""
    if num_query < 1 or num_train < 1 or dim < 1:
        raise ValueError("num_query, num_train, and dim must be positive")
    profile = tuple(profile)
    query_nnz = tuple(query_nnz)
    if not profile or not query_nnz:
        raise ValueError("profile and query_nnz must be nonempty")
    planted_total = num_query * len(profile)
    if planted_total > num_train:
        raise ValueError(
            f"profile plants {planted_total} train points but only "
            f"{num_train} requested"
        )
    # Fail fast on infeasible cells before drawing anything.
    for f1 in query_nnz:
        for cell in profile:
            cell.plan(f1)
    stream = SeedStream(seed, salt=0x53594E5448)
    query: list[SparseVector] = []
    train: list[SparseVector] = []
    for i in range(num_query):
        f1 = query_nnz[i % len(query_nnz)]
        q = SparseVector(stream.sample(f1, dim), dim)
        query.append(q)
        for cell in profile:
            f2, a = cell.plan(f1)
            train.append(_neighbor_of(q, f2, a, dim, stream))
    for i in range(num_train - planted_total):
        f = query_nnz[i % len(query_nnz)]
        train.append(SparseVector(stream.sample(f, dim), dim))
    return Dataset(name=name, query=query, train=train, dim=dim, mode=BINARY)
