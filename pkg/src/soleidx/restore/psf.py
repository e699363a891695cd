"""Point-spread functions and their placement on the image grid."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidLength, KernelTooLarge
from ..rounding import round_half_away

LAPLACIAN = np.array([[0, -1, 0], [-1, 4, -1], [0, -1, 0]], dtype=np.float64)
LAPLACIAN.flags.writeable = False


@dataclass(frozen=True, eq=False)
class BlurKernel:
    """Non-negative unit-mass kernel with odd dimensions; center at ``(h//2, w//2)``."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] % 2 == 0 or w.shape[1] % 2 == 0:
            raise ValueError(f"kernel must be 2-D with odd dimensions, got {w.shape}")
        if not np.all(np.isfinite(w)) or w.min() < 0:
            raise ValueError("kernel weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"kernel weights sum to {w.sum()!r}, expected 1")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def width(self) -> int:
        return self.weights.shape[1]

    @property
    def height(self) -> int:
        return self.weights.shape[0]

    def __eq__(self, other):
        if not isinstance(other, BlurKernel):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    __hash__ = None


def identity_psf() -> BlurKernel:
    return BlurKernel(np.ones((1, 1)))


def motion_blur_psf(length: int, angle_deg: float) -> BlurKernel:
    """Rasterized linear motion blur of ``length`` cells through the center.

    The angle is counter-clockwise from horizontal. Cells are picked
    Bresenham-style: step one cell at a time along the dominant axis and
    round the other coordinate (half away from zero). Odd lengths are
    symmetric about the center; even lengths carry the extra cell on the
    negative side of the dominant axis. Every cell weighs ``1/length``.
    """
    if isinstance(length, bool) or int(length) != length or length < 1:
        raise InvalidLength(f"blur length must be an integer >= 1, got {length!r}")
    length = int(length)
    theta = math.radians(angle_deg)
    c, s = math.cos(theta), math.sin(theta)
    steps = np.arange(length) - length // 2
    if abs(c) >= abs(s):
        xs = steps
        # snap float noise (e.g. tan 45 = 0.9999999999999998) before rounding
        ys = round_half_away(np.round(steps * (s / c), 9))
    else:
        ys = steps
        xs = round_half_away(np.round(steps * (c / s), 9))
    rows = -np.asarray(ys, dtype=np.int64)  # y points up, rows point down
    cols = np.asarray(xs, dtype=np.int64)
    ry, rx = int(np.abs(rows).max()), int(np.abs(cols).max())
    weights = np.zeros((2 * ry + 1, 2 * rx + 1))
    weights[rows + ry, cols + rx] = 1.0 / length
    return BlurKernel(weights)


def pad_to_origin(kernel: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Zero-pad a centered odd-sized kernel to ``shape`` with its center at ``[0, 0]``.

    Offsets wrap around, which is what makes FFT multiplication a circular
    convolution about the kernel center.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    kh, kw = kernel.shape
    height, width = shape
    if kh > height or kw > width:
        raise KernelTooLarge(f"{kh}x{kw} kernel does not fit a {height}x{width} image")
    out = np.zeros(shape)
    r = (np.arange(kh) - kh // 2) % height
    c = (np.arange(kw) - kw // 2) % width
    out[np.ix_(r, c)] = kernel
    return out
