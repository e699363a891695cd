"""Round-half-away-from-zero, the single rounding rule used across the package."""

import numpy as np


def round_half_away(x):
    """Round to the nearest integer, ties away from zero.

    Works on scalars and arrays; returns floats (callers cast as needed).
    ``np.round`` and builtin ``round`` both round half to even, which is why
    this exists.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.sign(x) * np.floor(np.abs(x) + 0.5)
    return out if out.ndim else float(out)


def div_round_half_away(num: int, den: int) -> int:
    """Exact ``round_half_away(num / den)`` for integers, ``den > 0``."""
    if den <= 0:
        raise ValueError("den must be positive")
    q = (2 * abs(num) + den) // (2 * den)
    return q if num >= 0 else -q
