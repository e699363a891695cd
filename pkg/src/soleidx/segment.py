"""Otsu global thresholding and the normalized threshold index tau."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .enhance import Histogram, compute_histogram
from .errors import DegenerateHistogram, EmptyHistogram, ThresholdOutOfRange
from .imagecore import GrayImage
from .rounding import div_round_half_away

TAU_DECIMALS = 6


def format_tau(t: int, levels: int) -> str:
    """``t / (levels - 1)`` with exactly six decimals, ties away from zero (exact)."""
    scaled = div_round_half_away(t * 10**TAU_DECIMALS, levels - 1)
    whole, frac = divmod(scaled, 10**TAU_DECIMALS)
    return f"{whole}.{frac:0{TAU_DECIMALS}d}"


@dataclass(frozen=True)
class OtsuResult:
    t: int
    levels: int
    sigma_b2: float

    def __post_init__(self):
        if not 0 <= self.t <= self.levels - 2:
            raise ValueError(f"threshold {self.t} outside [0, {self.levels - 2}]")
        if not self.sigma_b2 > 0:
            raise ValueError("between-class variance must be positive")

    @property
    def tau(self) -> float:
        return self.t / (self.levels - 1)

    @property
    def tau_str(self) -> str:
        return format_tau(self.t, self.levels)

    def summary(self) -> str:
        return f"t={self.t} tau={self.tau_str} sigma_b2={self.sigma_b2!r}"


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Segmentation mask stored as 0 / 255."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.uint8)
        if px.ndim != 2 or not np.isin(px, (0, 255)).all():
            raise ValueError("binary image must be 2-D with values in {0, 255}")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def to_gray(self) -> GrayImage:
        return GrayImage(self.pixels, 256)

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


def otsu_threshold(hist: Histogram) -> OtsuResult:
    """Threshold maximizing the between-class variance; class 0 is ``level <= t``.

    With n0 pixels and level-sum s0 in class 0 out of N pixels with sum S,
    ``sigma_b^2(t) = (N s0 - S n0)^2 / (N^2 n0 n1)``. The scan is a single
    cumulative pass in floats; near-maximal candidates are then compared
    exactly in rational arithmetic so ties resolve to the
    smallest t regardless of rounding.
    """
    total = hist.total
    if total == 0:
        raise EmptyHistogram("histogram has no samples")
    if np.count_nonzero(hist.counts) < 2:
        raise DegenerateHistogram("need at least two occupied gray levels")

    counts = hist.counts[: hist.levels - 1]
    levels = np.arange(hist.levels - 1, dtype=np.float64)
    n0 = np.cumsum(counts, dtype=np.float64)
    s0 = np.cumsum(counts * levels)
    level_sum = float(np.dot(hist.counts, np.arange(hist.levels, dtype=np.float64)))
    n1 = total - n0
    valid = (n0 > 0) & (n1 > 0)
    score = np.zeros(hist.levels - 1)
    d = total * s0[valid] - level_sum * n0[valid]
    score[valid] = d * d / (n0[valid] * n1[valid])

    best_float = score.max()
    candidates = np.flatnonzero(score >= best_float * (1 - 1e-9))

    # exact comparison among near-maximal candidates; plateau thresholds
    # share (n0, s0) and cannot beat the first one
    cum_n = np.cumsum(hist.counts)
    cum_s = np.cumsum(hist.counts * np.arange(hist.levels, dtype=np.int64))
    exact_sum = int(cum_s[-1])
    best_t, best, seen = None, None, None
    for t in candidates:
        a, b = int(cum_n[t]), int(cum_s[t])
        if (a, b) == seen:
            continue
        seen = (a, b)
        value = Fraction((total * b - exact_sum * a) ** 2, a * (total - a) * total * total)
        if best is None or value > best:
            best_t, best = int(t), value
    return OtsuResult(best_t, hist.levels, float(best))


def binarize(img: GrayImage, t: int) -> BinaryImage:
    if not 0 <= t <= img.levels - 2:
        raise ThresholdOutOfRange(f"threshold {t} outside [0, {img.levels - 2}]")
    return BinaryImage(np.where(img.pixels > t, 255, 0))


def global_threshold_index(img: GrayImage) -> OtsuResult:
    return otsu_threshold(compute_histogram(img))
