"""High-precision evaluation of the real-valued bound formulas."""

from __future__ import annotations

import math

import mpmath

mpmath.mp.dps = 50
# values within this distance of an integer are treated as that integer
_SNAP = mpmath.mpf("1e-30")


def mp(x) -> mpmath.mpf:
    return mpmath.mpf(x)


def cm_constant(d: int) -> mpmath.mpf:
    """5 d^(13/3)."""
    return 5 * mpmath.power(mp(d), mp(13) / 3)


def floor(x) -> int:
    n = int(mpmath.nint(x))
    if abs(x - n) < _SNAP:
        return n
    return int(mpmath.floor(x))


def ceil(x) -> int:
    n = int(mpmath.nint(x))
    if abs(x - n) < _SNAP:
        return n
    return int(mpmath.ceil(x))


def as_float(x) -> float:
    f = float(x)
    return f if math.isfinite(f) else float("nan")
