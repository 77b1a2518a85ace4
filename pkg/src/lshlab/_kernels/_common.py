"""Shared mixing constants and the scalar reference mixer.

Every pseudorandom quantity in the library is derived from one motif:
``splitmix64_finalizer(key + counter * GOLDEN)``.  Both backends (numba and
numpy) implement exactly this arithmetic over wrapping 64-bit unsigned
integers, so integer-valued outputs are bit-identical across backends.
"""

import numpy as np

MASK64 = (1 << 64) - 1

# splitmix64 finalizer multipliers and the Weyl increment.
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX_MUL_1 = np.uint64(0xBF58476D1CE4E5B9)
MIX_MUL_2 = np.uint64(0x94D049BB133111EB)

SHIFT_30 = np.uint64(30)
SHIFT_27 = np.uint64(27)
SHIFT_31 = np.uint64(31)
SHIFT_11 = np.uint64(11)
ONE = np.uint64(1)

# Domain separation salts: each hash family draws from its own key space.
MINHASH_SALT = np.uint64(0x4D494E48415348)
SIMHASH_SALT = np.uint64(0x53494D48415348)

# Starting accumulator for bucket-key chaining (pi digits, nothing up the sleeve).
BUCKET_KEY_INIT = np.uint64(0x243F6A8885A308D3)

# 2^-53 maps the top 53 bits of a u64 onto a dyadic uniform in [0, 1).
INV_2_53 = 2.0 ** -53
TWO_PI = 6.283185307179586


def mix64(x: int) -> int:
    """splitmix64 finalizer on plain python ints (reference implementation)."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return (x ^ (x >> 31)) & MASK64


def mix64_array(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer vectorized over uint64 arrays (wraps mod 2^64)."""
    x = (x ^ (x >> SHIFT_30)) * MIX_MUL_1
    x = (x ^ (x >> SHIFT_27)) * MIX_MUL_2
    return x ^ (x >> SHIFT_31)


def family_base(master_seed: int, salt: np.uint64) -> np.uint64:
    """Per-family base key derived from the master seed."""
    return np.uint64(mix64((master_seed & MASK64) ^ int(salt)))


def function_keys(base: np.uint64, seed_start: int, count: int) -> np.ndarray:
    """Keys of hash functions seed_start .. seed_start+count-1 as uint64[count]."""
    ctr = np.arange(seed_start + 1, seed_start + count + 1, dtype=np.uint64)
    return mix64_array(base + ctr * GOLDEN)
