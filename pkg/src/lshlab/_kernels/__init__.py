"""Backend selection for the hot kernels.

Two interchangeable implementations exist: a numba-jitted one and a pure
numpy one.  The active backend is chosen at import time from the
``LSHLAB_BACKEND`` environment variable ("numba" or "numpy").  When the
variable is unset, numba is used if importable, numpy otherwise.

Integer-valued kernel outputs are bit-identical between backends.  SimHash
bits agree as well unless a projection sum lands within rounding error of
zero (the backends' log/cos implementations may differ in the last ulp).
``benchmarks/backend_bench.py`` compares the two implementations.
"""

import contextlib
import os

from . import _numpy_impl

_ENV_VAR = "LSHLAB_BACKEND"

try:
    from . import _numba_impl
    NUMBA_AVAILABLE = True
except ImportError:
    _numba_impl = None
    NUMBA_AVAILABLE = False

_IMPLS = {"numpy": _numpy_impl}
if NUMBA_AVAILABLE:
    _IMPLS["numba"] = _numba_impl


def _initial_backend() -> str:
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice:
        if choice not in ("numpy", "numba"):
            raise ValueError(
                f"{_ENV_VAR} must be 'numpy' or 'numba', got {choice!r}"
            )
        if choice == "numba" and not NUMBA_AVAILABLE:
            raise ValueError(f"{_ENV_VAR}=numba but numba is not importable")
        return choice
    return "numba" if NUMBA_AVAILABLE else "numpy"


_active = _initial_backend()
_impl = _IMPLS[_active]


def active_backend() -> str:
    return _active


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_IMPLS))


def set_backend(name: str) -> None:
    global _active, _impl
    if name not in _IMPLS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = name
    _impl = _IMPLS[name]


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch backends (used by tests and benchmarks)."""
    previous = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def minhash_matrix(indices, indptr, master_seed, seed_start, num_hashes):
    return _impl.minhash_matrix(indices, indptr, master_seed, seed_start, num_hashes)


def simhash_matrix(indices, weights, indptr, master_seed, seed_start, num_hashes):
    return _impl.simhash_matrix(
        indices, weights, indptr, master_seed, seed_start, num_hashes
    )


def intersection_matrix(q_indices, q_indptr, t_indices, t_indptr):
    return _impl.intersection_matrix(q_indices, q_indptr, t_indices, t_indptr)


def dot_matrix(q_indices, q_weights, q_indptr, t_indices, t_weights, t_indptr):
    return _impl.dot_matrix(
        q_indices, q_weights, q_indptr, t_indices, t_weights, t_indptr
    )
