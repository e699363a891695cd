"""Histogram equalization: PDF -> CDF T(r) -> point-wise gray-level remap."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyHistogram, EmptyImage
from .imagecore import GrayImage


@dataclass(frozen=True, eq=False)
class Histogram:
    levels: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.shape != (self.levels,):
            raise ValueError(f"expected {self.levels} bins, got shape {counts.shape}")
        if counts.size and counts.min() < 0:
            raise ValueError("bin counts must be non-negative")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def pdf(self) -> np.ndarray:
        return self.counts / self.total

    def __eq__(self, other):
        if not isinstance(other, Histogram):
            return NotImplemented
        return self.levels == other.levels and np.array_equal(self.counts, other.counts)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class TransferFunction:
    """Monotone lookup table ``table[r]`` for input level ``r``."""

    levels: int
    table: np.ndarray

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64)
        if table.shape != (self.levels,):
            raise ValueError(f"expected {self.levels} entries, got shape {table.shape}")
        if table.min() < 0 or table.max() > self.levels - 1:
            raise ValueError("table values out of range")
        if np.any(np.diff(table) < 0):
            raise ValueError("transfer function must be non-decreasing")
        table.flags.writeable = False
        object.__setattr__(self, "table", table)

    def apply(self, img: GrayImage) -> GrayImage:
        if img.levels != self.levels:
            raise ValueError(f"image has {img.levels} levels, map has {self.levels}")
        return GrayImage(self.table[img.pixels], self.levels)

    def __eq__(self, other):
        if not isinstance(other, TransferFunction):
            return NotImplemented
        return self.levels == other.levels and np.array_equal(self.table, other.table)

    __hash__ = None


def compute_histogram(img: GrayImage) -> Histogram:
    if img.pixels.size == 0:
        raise EmptyImage("cannot histogram an empty image")
    counts = np.bincount(img.pixels.ravel(), minlength=img.levels)
    return Histogram(img.levels, counts)


def equalization_map(hist: Histogram) -> TransferFunction:
    """``T(r) = round((L-1) * CDF(r))``, ties away from zero.

    Computed in integers, ``(2 (L-1) cum + total) // (2 total)``, so the
    half-way cases (e.g. CDF = 0.5 -> 127.5 -> 128) are exact.
    """
    total = hist.total
    if total == 0:
        raise EmptyHistogram("histogram has no samples")
    cum = np.cumsum(hist.counts, dtype=np.int64)
    # Python ints: 2*(L-1)*cum can overflow int64 for huge images
    if total < 2**40:
        table = (2 * (hist.levels - 1) * cum + total) // (2 * total)
    else:
        table = np.array([(2 * (hist.levels - 1) * int(c) + total) // (2 * total) for c in cum])
    return TransferFunction(hist.levels, table)


def equalize(img: GrayImage) -> GrayImage:
    return equalization_map(compute_histogram(img)).apply(img)
