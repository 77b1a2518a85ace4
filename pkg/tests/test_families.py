import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from lshlab import (
    BBIT_MINHASH,
    MINHASH,
    SIMHASH,
    HashFamilyConfig,
    SeedStream,
    SparseVector,
    bbit_minhash,
    estimate_collision,
    hash_matrix,
    minhash,
    pair_stats,
    permutation_collision_probability,
    planted_pair,
    resemblance,
    simhash,
)


def vec(ids, dim=100, weights=None):
    return SparseVector(np.asarray(ids, dtype=np.int64), dim, weights)


MH = HashFamilyConfig(kind=MINHASH, num_hashes=64, master_seed=900)
SH = HashFamilyConfig(kind=SIMHASH, num_hashes=64, master_seed=900)


class TestConfig:
    def test_bits_required_for_bbit(self):
        with pytest.raises(ValueError, match="bits"):
            HashFamilyConfig(kind=BBIT_MINHASH, num_hashes=4)

    def test_bits_rejected_elsewhere(self):
        with pytest.raises(ValueError, match="bits"):
            HashFamilyConfig(kind=MINHASH, num_hashes=4, bits=8)

    def test_bits_range(self):
        with pytest.raises(ValueError):
            HashFamilyConfig(kind=BBIT_MINHASH, num_hashes=4, bits=0)
        with pytest.raises(ValueError):
            HashFamilyConfig(kind=BBIT_MINHASH, num_hashes=4, bits=65)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            HashFamilyConfig(kind="md5", num_hashes=4)

    def test_labels(self):
        assert HashFamilyConfig(kind=MINHASH, num_hashes=1).label == "minhash"
        assert HashFamilyConfig(kind=BBIT_MINHASH, num_hashes=1, bits=4).label == "bbit4"


class TestDeterminism:
    def test_repeated_calls_identical(self):
        x = vec([3, 17, 44])
        assert minhash(x, 9, MH) == minhash(x, 9, MH)
        assert simhash(x, 9, SH) == simhash(x, 9, SH)

    def test_scalar_matches_matrix(self):
        x = vec([3, 17, 44])
        mat = hash_matrix([x], MH, seed_start=0, num_hashes=16)[0]
        for i in range(16):
            assert minhash(x, i, MH) == int(mat[i])
        bits = hash_matrix([x], SH, seed_start=0, num_hashes=16)[0]
        for i in range(16):
            assert simhash(x, i, SH) == int(bits[i])

    def test_seed_start_offsets(self):
        x = vec([3, 17, 44])
        full = hash_matrix([x], MH, seed_start=0, num_hashes=20)[0]
        tail = hash_matrix([x], MH, seed_start=5, num_hashes=15)[0]
        assert np.array_equal(full[5:], tail)

    def test_different_seeds_differ(self):
        x = vec([3, 17, 44])
        other = HashFamilyConfig(kind=MINHASH, num_hashes=64, master_seed=901)
        a = hash_matrix([x], MH, num_hashes=32)
        b = hash_matrix([x], other, num_hashes=32)
        assert not np.array_equal(a, b)

    def test_thread_pool_agreement(self):
        points = [vec(sorted(np.random.default_rng(s).choice(100, 10, replace=False)))
                  for s in range(12)]
        serial = hash_matrix(points, MH, num_hashes=32)
        with ThreadPoolExecutor(max_workers=4) as pool:
            rows = list(pool.map(
                lambda p: hash_matrix([p], MH, num_hashes=32)[0], points))
        assert np.array_equal(serial, np.stack(rows))


class TestValidation:
    def test_empty_vector_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            minhash(vec([], dim=10), 0, MH)
        with pytest.raises(ValueError, match="empty"):
            simhash(vec([], dim=10), 0, SH)

    def test_weighted_rejected_for_minhash(self):
        w = vec([1, 2], weights=[1.0, 2.0])
        with pytest.raises(ValueError, match="binary"):
            minhash(w, 0, MH)
        with pytest.raises(ValueError, match="point 1"):
            hash_matrix([vec([1, 2]), w], MH, num_hashes=4)

    def test_weighted_allowed_for_simhash(self):
        w = vec([1, 2], weights=[1.0, 2.0])
        assert simhash(w, 0, SH) in (0, 1)


class TestPermutationOracle:
    def test_worked_example(self):
        p = permutation_collision_probability(vec([0, 1], dim=3), vec([1, 2], dim=3))
        assert p == Fraction(1, 3)

    def test_identical_sets(self):
        v = vec([0, 2], dim=4)
        assert permutation_collision_probability(v, v) == 1

    def test_disjoint_sets(self):
        assert permutation_collision_probability(
            vec([0], dim=2), vec([1], dim=2)) == 0

    def test_dim_guard(self):
        with pytest.raises(ValueError, match="too large"):
            permutation_collision_probability(vec([0], dim=10), vec([1], dim=10))

    def test_matches_resemblance_exactly_to_dim_5(self):
        for dim in range(2, 6):
            subsets = []
            for size in range(1, dim + 1):
                subsets.extend(combinations(range(dim), size))
            for sa, sb in combinations(subsets, 2):
                x, y = vec(sa, dim=dim), vec(sb, dim=dim)
                a = len(set(sa) & set(sb))
                union = len(set(sa) | set(sb))
                assert permutation_collision_probability(x, y) == Fraction(a, union)


def _random_pairs(count, dim, stream):
    """Pairs spanning a range of overlaps, cardinalities, and ratios."""
    pairs = []
    ratios = (1.0, 1.5, 2.0, 3.0)
    for i in range(count):
        f1 = 50 + stream.randbelow(151)
        f2 = int(round(f1 * ratios[i % len(ratios)]))
        target_r = 0.05 + 0.85 * stream.randbelow(1000) / 999.0
        a = int(round(target_r * (f1 + f2) / (1.0 + target_r)))
        a = max(0, min(a, min(f1, f2)))
        pairs.append(planted_pair(f1, f2, a, dim, stream))
    return pairs


class TestCollisionContracts:
    N = 10_000

    def test_minhash_worked_example(self):
        # resemblance of {0,1} vs {1,2} is 1/3
        cfg = HashFamilyConfig(kind=MINHASH, num_hashes=1, master_seed=5)
        est = estimate_collision(vec([0, 1], dim=3), vec([1, 2], dim=3), cfg, self.N)
        assert abs(est - 1 / 3) <= 0.02

    def test_minhash_half_resemblance(self):
        stream = SeedStream(31)
        x, y = planted_pair(30, 30, 20, 1000, stream)
        assert resemblance(x, y) == 0.5
        cfg = HashFamilyConfig(kind=MINHASH, num_hashes=1, master_seed=6)
        assert 0.48 <= estimate_collision(x, y, cfg, self.N) <= 0.52

    def test_minhash_random_pairs(self):
        stream = SeedStream(32)
        cfg = HashFamilyConfig(kind=MINHASH, num_hashes=1, master_seed=7)
        for x, y in _random_pairs(5, 1000, stream):
            expected = resemblance(x, y)
            assert abs(estimate_collision(x, y, cfg, self.N) - expected) <= 0.02

    def test_simhash_orthogonal(self):
        cfg = HashFamilyConfig(kind=SIMHASH, num_hashes=1, master_seed=8)
        x, y = vec(range(0, 20), dim=1000), vec(range(500, 520), dim=1000)
        assert abs(estimate_collision(x, y, cfg, self.N) - 0.5) <= 0.02

    def test_simhash_high_similarity(self):
        stream = SeedStream(33)
        x, y = planted_pair(100, 100, 90, 1000, stream)
        s = pair_stats(x, y).cosine
        assert s == pytest.approx(0.9, abs=1e-12)
        cfg = HashFamilyConfig(kind=SIMHASH, num_hashes=1, master_seed=9)
        expected = 1.0 - math.acos(s) / math.pi
        assert abs(estimate_collision(x, y, cfg, self.N) - expected) <= 0.02

    def test_simhash_identical(self):
        x = vec([1, 5, 9], dim=50)
        cfg = HashFamilyConfig(kind=SIMHASH, num_hashes=1, master_seed=10)
        assert estimate_collision(x, x, cfg, 500) == 1.0

    def test_bbit_formula(self):
        stream = SeedStream(34)
        x, y = planted_pair(30, 30, 20, 1000, stream)
        r = resemblance(x, y)
        for bits, expected in [(1, (r + 1) / 2), (2, r + (1 - r) / 4)]:
            cfg = HashFamilyConfig(kind=BBIT_MINHASH, num_hashes=1,
                                   master_seed=11, bits=bits)
            assert abs(estimate_collision(x, y, cfg, self.N) - expected) <= 0.02

    def test_bbit_full_width_equals_minhash(self):
        stream = SeedStream(35)
        x, y = planted_pair(40, 60, 20, 1000, stream)
        wide = HashFamilyConfig(kind=BBIT_MINHASH, num_hashes=1,
                                master_seed=12, bits=64)
        plain = HashFamilyConfig(kind=MINHASH, num_hashes=1, master_seed=12)
        assert estimate_collision(x, y, wide, 2000) == \
            estimate_collision(x, y, plain, 2000)

    def test_bbit_is_pure_truncation(self):
        x = vec([2, 9, 77])
        for bits in (1, 4, 13, 64):
            cfg = HashFamilyConfig(kind=BBIT_MINHASH, num_hashes=1,
                                   master_seed=13, bits=bits)
            mask = (1 << bits) - 1
            for i in range(20):
                assert bbit_minhash(x, i, cfg) == minhash(x, i, cfg) & mask

    def test_estimate_collision_identity(self):
        x = vec([4, 8, 15])
        for cfg in (MH, SH):
            assert estimate_collision(x, x, cfg, 200) == 1.0

    def test_estimate_collision_needs_positive_n(self):
        with pytest.raises(ValueError):
            estimate_collision(vec([1]), vec([2]), MH, 0)
