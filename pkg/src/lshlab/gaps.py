"""Closed-form rho (gap) computations for LSH schemes under cosine thresholds.

For an (s0, c*s0, p1, p2)-sensitive family, rho = log(p1) / log(p2) governs
the n^rho query cost; smaller is better.  SimHash collides with probability
1 - arccos(s)/pi.  MinHash collides with the resemblance, which the bound
envelope ties to cosine; the regimes differ only in which balance value is
assumed on each side of the threshold:

    worst       near pair at the envelope floor cos^2 (balance s0 + 1/s0),
                far pair at the ceiling cos/(2 - cos)
    restricted  near pair at cos/(cap - cos) for a data balance cap,
                far pair at the ceiling
    idealized   both sides at cos/(z - cos) for one fixed balance z

Natural logs throughout; rho is a ratio, so the base cancels.  Values above
1 are returned as computed, never clamped.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "REGIMES",
    "RhoCurve",
    "worst_case_balance",
    "bbit_collision_probability",
    "rho_simhash",
    "rho_minhash",
    "rho_minhash_worst",
    "rho_minhash_restricted",
    "rho_minhash_idealized",
    "rho_bbit",
    "rho_curve",
    "bounds_curve",
]

REGIMES = ("worst", "restricted", "idealized")


@dataclass(frozen=True)
class RhoCurve:
    """One plotted curve: rho over a strictly increasing threshold grid."""

    label: str
    c: float
    s0: np.ndarray
    rho: np.ndarray


def _check_query(s0: float, c: float) -> None:
    if not 0.0 < s0 < 1.0:
        raise ValueError(f"threshold s0 must lie in (0, 1), got {s0}")
    if not 0.0 < c <= 1.0:
        raise ValueError(f"approximation factor c must lie in (0, 1], got {c}")


def worst_case_balance(s0: float) -> float:
    """Balance at which cos/(balance - cos) collapses to cos^2."""
    return s0 + 1.0 / s0


def rho_simhash(s0: float, c: float) -> float:
    _check_query(s0, c)
    p1 = 1.0 - math.acos(s0) / math.pi
    p2 = 1.0 - math.acos(c * s0) / math.pi
    if c == 1.0:
        return 1.0
    return math.log(p1) / math.log(p2)


def rho_minhash(s0: float, c: float, balance_near: float,
                balance_far: float = 2.0) -> float:
    """General MinHash gap: the near pair (similarity >= s0) is assumed to
    collide at rate s0/(balance_near - s0), the far pair (<= c*s0) at
    c*s0/(balance_far - c*s0)."""
    _check_query(s0, c)
    if balance_near <= s0:
        raise ValueError("balance_near must exceed s0")
    if balance_far <= c * s0:
        raise ValueError("balance_far must exceed c * s0")
    p1 = s0 / (balance_near - s0)
    p2 = c * s0 / (balance_far - c * s0)
    return math.log(p1) / math.log(p2)


def rho_minhash_worst(s0: float, c: float) -> float:
    return rho_minhash(s0, c, worst_case_balance(s0), 2.0)


def rho_minhash_restricted(s0: float, c: float, balance_cap: float) -> float:
    if balance_cap < 2.0:
        raise ValueError("balance cap below 2 is unsatisfiable")
    return rho_minhash(s0, c, balance_cap, 2.0)


def rho_minhash_idealized(s0: float, c: float, balance: float) -> float:
    if balance < 2.0:
        raise ValueError("balance below 2 is unsatisfiable")
    return rho_minhash(s0, c, balance, balance)


def bbit_collision_probability(resemblance: float, bits: int) -> float:
    """Collision rate of b-bit minwise hashing given the full-width rate."""
    if not 1 <= bits <= 64:
        raise ValueError("bits must lie in 1..64")
    return resemblance + (1.0 - resemblance) * 2.0 ** -bits


def rho_bbit(s0: float, c: float, bits: int, balance_near: float,
             balance_far: float = 2.0) -> float:
    """Gap for b-bit minwise hashing; reduces at bits=1 to
    log(2(cap - s0)/cap) / log(2 - c*s0) in the restricted regime."""
    _check_query(s0, c)
    if balance_near <= s0:
        raise ValueError("balance_near must exceed s0")
    if balance_far <= c * s0:
        raise ValueError("balance_far must exceed c * s0")
    r1 = s0 / (balance_near - s0)
    r2 = c * s0 / (balance_far - c * s0)
    p1 = bbit_collision_probability(r1, bits)
    p2 = bbit_collision_probability(r2, bits)
    return math.log(p1) / math.log(p2)


def _point(method: str, regime: str, s0: float, c: float,
           balance_cap: float | None, balance: float | None,
           bits: int | None) -> float:
    if method == "simhash":
        return rho_simhash(s0, c)
    if regime == "worst":
        near, far = worst_case_balance(s0), 2.0
    elif regime == "restricted":
        if balance_cap is None:
            raise ValueError("restricted regime requires balance_cap")
        near, far = balance_cap, 2.0
    elif regime == "idealized":
        if balance is None:
            raise ValueError("idealized regime requires a fixed balance")
        near = far = balance
    else:
        raise ValueError(f"unknown regime {regime!r}")
    if method == "minhash":
        return rho_minhash(s0, c, near, far)
    if method == "bbit":
        if bits is None:
            raise ValueError("bbit method requires bits")
        return rho_bbit(s0, c, bits, near, far)
    raise ValueError(f"unknown method {method!r}")


def rho_curve(method: str, regime: str, c: float, s0_grid, *,
              balance_cap: float | None = None, balance: float | None = None,
              bits: int | None = None) -> RhoCurve:
    """Evaluate one method/regime pointwise over a threshold grid."""
    grid = np.asarray(s0_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("s0 grid must be a nonempty 1-d sequence")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("s0 grid must be strictly increasing")
    values = np.array([
        _point(method, regime, float(s), c, balance_cap, balance, bits)
        for s in grid
    ])
    label = method if method != "bbit" else f"bbit{bits}"
    if regime == "restricted" and method != "simhash":
        label += f"/restricted(cap={balance_cap:g})"
    elif regime == "idealized" and method != "simhash":
        label += f"/idealized(balance={balance:g})"
    elif method != "simhash":
        label += "/worst"
    return RhoCurve(label=label, c=c, s0=grid, rho=values)


def bounds_curve(s_grid) -> np.ndarray:
    """Rows (cosine, cosine^2, cosine/(2 - cosine)) over a grid in [0, 1]."""
    grid = np.asarray(s_grid, dtype=np.float64)
    if np.any((grid < 0.0) | (grid > 1.0)):
        raise ValueError("grid values must lie in [0, 1]")
    return np.column_stack([grid, grid * grid, grid / (2.0 - grid)])
