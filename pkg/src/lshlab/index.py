"""Bucketed (K, L) LSH index.

Each of the L tables keys points by a 64-bit combination of K consecutive
hash values; table t uses function indices t*K .. t*K+K-1, so tables draw
from disjoint function blocks.  Buckets store point ids only.

Snapshot format (version 1, all little-endian):

    offset  size  field
    0       8     magic  b"LSHIDX01"
    8       4     u32 version (1)
    12      4     u32 family kind code (1 minhash, 2 simhash, 3 bbit)
    16      4     u32 bits (0 when not applicable)
    20      4     u32 k (hashes per table)
    24      4     u32 num_tables
    28      8     u64 master_seed
    36      8     u64 family num_hashes
    44      8     u64 num_points
    then, per table:
        u64 num_buckets
        u64[num_buckets]   bucket keys, sorted ascending
        u64[num_buckets]   bucket sizes
        u64[sum(sizes)]    point ids, grouped by bucket, ascending in each

Vectors are not stored; a loaded index operates in id-only mode.
"""

import struct
from dataclasses import dataclass

import numpy as np

from ._kernels._common import BUCKET_KEY_INIT, GOLDEN, MASK64, mix64, mix64_array
from .families import (
    BBIT_MINHASH,
    FAMILY_KINDS,
    MINHASH,
    SIMHASH,
    HashFamilyConfig,
    hash_matrix,
)
from .similarity import SparseVector

__all__ = [
    "IndexConfig",
    "LshIndex",
    "bucket_key",
    "chain_key_columns",
    "build",
]

_MAGIC = b"LSHIDX01"
_VERSION = 1
_KIND_CODES = {MINHASH: 1, SIMHASH: 2, BBIT_MINHASH: 3}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}


@dataclass(frozen=True)
class IndexConfig:
    """(K, L) table layout on top of a hash family."""

    k: int
    num_tables: int
    family: HashFamilyConfig

    def __post_init__(self):
        if not 1 <= self.k:
            raise ValueError("k must be at least 1")
        if not 1 <= self.num_tables:
            raise ValueError("num_tables must be at least 1")

    @property
    def master_seed(self) -> int:
        return self.family.master_seed

    @property
    def num_functions(self) -> int:
        return self.k * self.num_tables


def bucket_key(values) -> int:
    """Sequential keyed mix of hash values into one 64-bit bucket key."""
    acc = int(BUCKET_KEY_INIT)
    golden = int(GOLDEN)
    for v in values:
        acc = mix64(acc + (int(v) * golden & MASK64))
    return acc


def chain_key_columns(columns: np.ndarray) -> np.ndarray:
    """Vectorized bucket_key over the rows of a uint64 (n, K) matrix."""
    n, width = columns.shape
    if width < 1:
        raise ValueError("need at least one hash value per key")
    acc = np.full(n, BUCKET_KEY_INIT, dtype=np.uint64)
    for j in range(width):
        acc = mix64_array(acc + columns[:, j] * GOLDEN)
    return acc


class LshIndex:
    """Immutable after build; queries are safe from concurrent readers."""

    def __init__(self, config: IndexConfig, tables: list[dict[int, list[int]]],
                 num_points: int, points: list[SparseVector] | None = None):
        self.config = config
        self.tables = tables
        self.num_points = num_points
        self.points = points

    def _query_keys(self, q: SparseVector) -> list[int]:
        cfg = self.config
        row = hash_matrix([q], cfg.family, seed_start=0,
                          num_hashes=cfg.num_functions)[0]
        return [
            bucket_key(row[t * cfg.k:(t + 1) * cfg.k])
            for t in range(cfg.num_tables)
        ]

    def query(self, q: SparseVector) -> set[int]:
        """Union of bucket contents matching q's key in each table."""
        candidates: set[int] = set()
        for table, key in zip(self.tables, self._query_keys(q)):
            hit = table.get(key)
            if hit:
                candidates.update(hit)
        return candidates

    def save(self, path) -> None:
        cfg = self.config
        fam = cfg.family
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack(
                "<IIIII QQQ",
                _VERSION,
                _KIND_CODES[fam.kind],
                fam.bits or 0,
                cfg.k,
                cfg.num_tables,
                fam.master_seed & MASK64,
                fam.num_hashes,
                self.num_points,
            ))
            for table in self.tables:
                keys = np.array(sorted(table), dtype="<u8")
                sizes = np.array([len(table[int(k)]) for k in keys], dtype="<u8")
                fh.write(struct.pack("<Q", keys.size))
                fh.write(keys.tobytes())
                fh.write(sizes.tobytes())
                for k in keys:
                    fh.write(np.array(table[int(k)], dtype="<u8").tobytes())

    @classmethod
    def load(cls, path) -> "LshIndex":
        with open(path, "rb") as fh:
            magic = fh.read(8)
            if magic != _MAGIC:
                raise ValueError(f"not an index snapshot: bad magic {magic!r}")
            header = struct.unpack("<IIIII QQQ", fh.read(44))
            version, kind_code, bits, k, num_tables, seed, num_hashes, n = header
            if version != _VERSION:
                raise ValueError(f"unsupported snapshot version {version}")
            if kind_code not in _CODE_KINDS:
                raise ValueError(f"unknown family kind code {kind_code}")
            family = HashFamilyConfig(
                kind=_CODE_KINDS[kind_code],
                num_hashes=num_hashes,
                master_seed=seed,
                bits=bits or None,
            )
            config = IndexConfig(k=k, num_tables=num_tables, family=family)
            tables = []
            for _ in range(num_tables):
                (nb,) = struct.unpack("<Q", fh.read(8))
                keys = np.frombuffer(fh.read(8 * nb), dtype="<u8")
                sizes = np.frombuffer(fh.read(8 * nb), dtype="<u8")
                table: dict[int, list[int]] = {}
                for key, size in zip(keys, sizes):
                    ids = np.frombuffer(fh.read(8 * int(size)), dtype="<u8")
                    table[int(key)] = [int(i) for i in ids]
                tables.append(table)
        return cls(config, tables, num_points=n)


def build(points, config: IndexConfig, store_vectors: bool = True) -> LshIndex:
    """Insert every point into one bucket per table."""
    if config.family.num_hashes < config.num_functions:
        raise ValueError(
            f"family provides {config.family.num_hashes} functions but the "
            f"index needs k*num_tables = {config.num_functions}"
        )
    points = list(points)
    for i, p in enumerate(points):
        if p.nnz == 0:
            raise ValueError(f"point {i}: cannot index an empty vector")
        if config.family.kind in (MINHASH, BBIT_MINHASH) and not p.is_binary:
            raise ValueError(f"point {i}: {config.family.kind} requires binary vectors")
    tables: list[dict[int, list[int]]] = [{} for _ in range(config.num_tables)]
    if points:
        hashes = hash_matrix(points, config.family, seed_start=0,
                             num_hashes=config.num_functions)
        for t in range(config.num_tables):
            keys = chain_key_columns(hashes[:, t * config.k:(t + 1) * config.k])
            table = tables[t]
            for pid, key in enumerate(keys):
                table.setdefault(int(key), []).append(pid)
    return LshIndex(config, tables, num_points=len(points),
                    points=points if store_vectors else None)
