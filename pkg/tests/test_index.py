import numpy as np
import pytest

from lshlab import (
    BBIT_MINHASH,
    MINHASH,
    SIMHASH,
    HashFamilyConfig,
    IndexConfig,
    LshIndex,
    SeedStream,
    SparseVector,
    bucket_key,
    build,
    chain_key_columns,
    estimate_collision,
    hash_matrix,
    planted_pair,
    synthesize,
)


def vec(ids, dim=100):
    return SparseVector(np.asarray(ids, dtype=np.int64), dim)


def family(kind=MINHASH, num_hashes=64, seed=77, bits=None):
    return HashFamilyConfig(kind=kind, num_hashes=num_hashes,
                            master_seed=seed, bits=bits)


class TestBucketKey:
    def test_deterministic(self):
        assert bucket_key([12345]) == bucket_key([12345])
        assert bucket_key([1, 2, 3]) == bucket_key([1, 2, 3])

    def test_single_value_is_mixed(self):
        assert bucket_key([7]) != 7

    def test_order_sensitive(self):
        assert bucket_key([1, 2]) != bucket_key([2, 1])

    def test_chain_matches_scalar(self):
        rng = np.random.default_rng(3)
        mat = rng.integers(0, 2**64, size=(50, 4), dtype=np.uint64)
        keys = chain_key_columns(mat)
        for row, key in zip(mat, keys):
            assert bucket_key(row) == int(key)

    def test_collision_audit(self):
        # 10^5 random distinct sequences must give 10^5 distinct keys.
        rng = np.random.default_rng(4)
        mat = rng.integers(0, 2**64, size=(100_000, 3), dtype=np.uint64)
        mat = np.unique(mat, axis=0)
        keys = chain_key_columns(mat)
        assert np.unique(keys).size == mat.shape[0]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            chain_key_columns(np.empty((5, 0), dtype=np.uint64))


class TestIndexConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            IndexConfig(k=0, num_tables=1, family=family())
        with pytest.raises(ValueError):
            IndexConfig(k=1, num_tables=0, family=family())

    def test_master_seed_delegates(self):
        cfg = IndexConfig(k=2, num_tables=3, family=family(seed=123))
        assert cfg.master_seed == 123
        assert cfg.num_functions == 6

    def test_build_needs_enough_functions(self):
        cfg = IndexConfig(k=8, num_tables=16, family=family(num_hashes=4))
        with pytest.raises(ValueError, match="k\\*num_tables"):
            build([vec([1, 2])], cfg)


def _brute_force_candidates(points, q, config):
    """Recompute every bucket key directly and group by hand."""
    rows = hash_matrix(points, config.family, num_hashes=config.num_functions)
    q_row = hash_matrix([q], config.family, num_hashes=config.num_functions)[0]
    result = set()
    for t in range(config.num_tables):
        sl = slice(t * config.k, (t + 1) * config.k)
        q_key = bucket_key(q_row[sl])
        for pid, row in enumerate(rows):
            if bucket_key(row[sl]) == q_key:
                result.add(pid)
    return result


class TestBuildAndQuery:
    def test_empty_index(self):
        cfg = IndexConfig(k=1, num_tables=2, family=family())
        idx = build([], cfg)
        assert idx.query(vec([1, 2])) == set()

    def test_duplicates_share_buckets(self):
        cfg = IndexConfig(k=2, num_tables=3, family=family())
        v = vec([5, 9, 40])
        idx = build([v, v, vec([1, 2])], cfg)
        for table in idx.tables:
            for members in table.values():
                assert (0 in members) == (1 in members)

    def test_indexed_point_always_candidate(self):
        ds = synthesize(4, 40, 800, seed=9)
        cfg = IndexConfig(k=3, num_tables=4, family=family())
        idx = build(ds.train, cfg)
        for pid, p in enumerate(ds.train):
            assert pid in idx.query(p)

    def test_candidates_are_known_ids(self):
        ds = synthesize(4, 40, 800, seed=10)
        cfg = IndexConfig(k=1, num_tables=4, family=family())
        idx = build(ds.train, cfg)
        for q in ds.query:
            assert idx.query(q) <= set(range(len(ds.train)))

    def test_matches_brute_force_k1(self):
        ds = synthesize(4, 100, 1000, seed=11)
        cfg = IndexConfig(k=1, num_tables=1, family=family())
        idx = build(ds.train, cfg)
        for q in ds.query:
            assert idx.query(q) == _brute_force_candidates(ds.train, q, cfg)

    def test_matches_brute_force_random_configs(self):
        ds = synthesize(3, 60, 800, seed=12)
        stream = SeedStream(13)
        for _ in range(6):
            kind = (MINHASH, SIMHASH, BBIT_MINHASH)[stream.randbelow(3)]
            bits = 1 + stream.randbelow(8) if kind == BBIT_MINHASH else None
            cfg = IndexConfig(
                k=1 + stream.randbelow(4),
                num_tables=1 + stream.randbelow(6),
                family=family(kind=kind, num_hashes=64,
                              seed=stream.randbelow(1000), bits=bits),
            )
            idx = build(ds.train, cfg)
            for q in ds.query:
                assert idx.query(q) == _brute_force_candidates(ds.train, q, cfg)

    def test_more_tables_only_add_candidates(self):
        ds = synthesize(5, 80, 800, seed=14)
        fam = family()
        small = build(ds.train, IndexConfig(k=2, num_tables=3, family=fam))
        large = build(ds.train, IndexConfig(k=2, num_tables=4, family=fam))
        for q in ds.query:
            assert small.query(q) <= large.query(q)

    def test_longer_prefix_keys_only_shrink(self):
        # Prefix-keyed construction: keys over the first k columns of one
        # function block refine as k grows.
        ds = synthesize(5, 80, 800, seed=15)
        rows = hash_matrix(ds.train, family(), num_hashes=8)
        q_rows = hash_matrix(ds.query, family(), num_hashes=8)
        for k in range(1, 8):
            keys_small = chain_key_columns(rows[:, :k])
            keys_big = chain_key_columns(rows[:, :k + 1])
            for qi in range(len(ds.query)):
                qk_small = bucket_key(q_rows[qi, :k])
                qk_big = bucket_key(q_rows[qi, :k + 1])
                cand_small = set(np.flatnonzero(keys_small == qk_small))
                cand_big = set(np.flatnonzero(keys_big == qk_big))
                assert cand_big <= cand_small

    def test_extreme_k_l_behavior(self):
        ds = synthesize(10, 200, 5000, seed=16)
        fam = family(num_hashes=256)
        narrow = build(ds.train, IndexConfig(k=16, num_tables=1, family=fam))
        wide = build(ds.train, IndexConfig(k=1, num_tables=64, family=fam))
        narrow_sizes = [len(narrow.query(q)) for q in ds.query]
        wide_sizes = [len(wide.query(q)) for q in ds.query]
        assert np.mean(narrow_sizes) < np.mean(wide_sizes)

    def test_single_table_collision_rate_is_power(self):
        # Two points colliding on one function with rate p collide on a
        # K-concatenated table key at rate p^K.
        stream = SeedStream(17)
        x, y = planted_pair(50, 50, 40, 2000, stream)  # resemblance 2/3
        fam = family(num_hashes=1, seed=18)
        p = 40 / 60
        tables = 4000
        for k in (2, 5):
            rows = hash_matrix([x, y], fam, num_hashes=k * tables)
            hits = 0
            for t in range(tables):
                sl = slice(t * k, (t + 1) * k)
                hits += bucket_key(rows[0, sl]) == bucket_key(rows[1, sl])
            assert abs(hits / tables - p ** k) <= 0.03

    def test_invalid_points_reported_with_id(self):
        cfg = IndexConfig(k=1, num_tables=1, family=family())
        with pytest.raises(ValueError, match="point 1"):
            build([vec([1]), vec([], dim=100)], cfg)


class TestSnapshot:
    def test_round_trip(self, tmp_path):
        ds = synthesize(5, 60, 600, seed=19)
        cfg = IndexConfig(k=2, num_tables=5,
                          family=family(kind=BBIT_MINHASH, bits=4, num_hashes=16))
        idx = build(ds.train, cfg, store_vectors=False)
        path = tmp_path / "snap.bin"
        idx.save(path)
        loaded = LshIndex.load(path)
        assert loaded.config == cfg
        assert loaded.num_points == idx.num_points
        assert loaded.points is None
        for q in ds.query:
            assert loaded.query(q) == idx.query(q)

    def test_bytes_stable(self, tmp_path):
        ds = synthesize(3, 30, 300, seed=20)
        cfg = IndexConfig(k=2, num_tables=2, family=family())
        a, b = tmp_path / "a.bin", tmp_path / "b.bin"
        build(ds.train, cfg).save(a)
        build(ds.train, cfg).save(b)
        assert a.read_bytes() == b.read_bytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"NOTANIDX" + b"\x00" * 64)
        with pytest.raises(ValueError, match="magic"):
            LshIndex.load(path)
