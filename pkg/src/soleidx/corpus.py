"""Synthetic two-tone sole prints for tests and demos.

Geometry is integer-only (no trig, no float thresholds) and randomness comes
from ``Generator.integers`` on PCG64, so a given seed produces the same bytes
on every platform.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .fileio import atomic_write
from .imagecore import GrayImage, encode_pgm
from .rounding import div_round_half_away

SOLE_TONE = 40
BACKGROUND_TONE = 220

# integer tread directions (a, b): stripes run perpendicular to a*x + b*y
_DIRECTIONS = ((1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2))
_KINDS = ("bars", "blocks", "studs", "chevrons")


def _sole_mask(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Elliptical outsole region and a two-pixel rim around it."""
    y, x = np.mgrid[0:size, 0:size]
    ry = int(rng.integers(size * 38 // 100, size * 47 // 100 + 1))
    rx = int(rng.integers(size * 22 // 100, size * 32 // 100 + 1))
    cy, cx = size - 1, size - 1  # doubled center, keeps everything integral
    dy, dx = 2 * y - cy, 2 * x - cx

    def inside(ax, ay):
        return dx * dx * (2 * ay) ** 2 + dy * dy * (2 * ax) ** 2 <= (2 * ax) ** 2 * (2 * ay) ** 2

    outer = inside(rx, ry)
    inner = inside(rx - 2, ry - 2)
    return inner, outer & ~inner


def tread_print(rng: np.random.Generator, size: int = 128) -> GrayImage:
    """One random tread pattern: dark sole elements on a light background."""
    kind = _KINDS[int(rng.integers(len(_KINDS)))]
    period = int(rng.integers(6, 17))
    on = int(rng.integers(2, period - 1))
    a, b = _DIRECTIONS[int(rng.integers(len(_DIRECTIONS)))]
    y, x = np.mgrid[0:size, 0:size]
    u = a * x + b * y
    v = -b * x + a * y

    if kind == "bars":
        tread = u % period < on
    elif kind == "blocks":
        tread = (u % period < on) & (v % period < on)
    elif kind == "studs":
        du = u % period - period // 2
        dv = v % period - period // 2
        tread = du * du + dv * dv <= on * on // 2
    else:
        zig = np.abs(v % (2 * period) - period)
        tread = (u + zig) % period < on

    sole, rim = _sole_mask(rng, size)
    dark = (sole & tread) | rim
    return GrayImage(np.where(dark, SOLE_TONE, BACKGROUND_TONE), 256)


def striped_print(size: int = 128, coverage: float = 0.3) -> GrayImage:
    """Horizontal bars covering ``round(coverage * size)`` evenly spread rows."""
    dark_rows = div_round_half_away(round(coverage * 10**6) * size, 10**6)
    dark_rows = min(max(dark_rows, 0), size)
    rows = np.zeros(size, dtype=bool)
    if dark_rows:
        rows[(np.arange(dark_rows) * size) // dark_rows] = True
    pixels = np.where(rows[:, None], SOLE_TONE, BACKGROUND_TONE) * np.ones((1, size), dtype=np.int64)
    return GrayImage(pixels, 256)


def generate_corpus(count: int, seed: int, size: int = 128) -> list[GrayImage]:
    return [tread_print(np.random.default_rng([seed, i]), size) for i in range(count)]


def corpus_filename(i: int) -> str:
    return f"print_{i:03d}.pgm"


def write_corpus(out_dir, count: int, seed: int, size: int = 128) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, img in enumerate(generate_corpus(count, seed, size)):
        path = out / corpus_filename(i)
        atomic_write(path, encode_pgm(img))
        paths.append(path)
    return paths
