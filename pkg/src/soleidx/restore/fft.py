"""2-D discrete Fourier transform for arbitrary sizes.

Power-of-two lengths use an iterative radix-2 decimation-in-time transform
vectorised over all leading axes; every other length goes through
Bluestein's chirp-z algorithm on top of the radix-2 kernel. The forward
transform is unnormalised; ``ifft2`` carries the ``1/(W*H)`` factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import NonRealResult
from ..imagecore import RealPlane

# Relative size of the imaginary residue ifft2 may silently discard.
IMAG_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Complex frequency grid, ``values[v, u]`` with the DC bin at ``[0, 0]``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"expected non-empty 2-D array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("spectrum contains NaN or Inf")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@lru_cache(maxsize=64)
def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.flags.writeable = False
    return rev


def _radix2(x: np.ndarray, sign: int) -> np.ndarray:
    n = x.shape[-1]
    lead = x.shape[:-1]
    y = x[..., _bit_reverse(n)].astype(np.complex128)
    half = 1
    while half < n:
        twiddle = np.exp(sign * 1j * np.pi * np.arange(half) / half)
        y = y.reshape(lead + (n // (2 * half), 2, half))
        even = y[..., 0, :]
        odd = y[..., 1, :] * twiddle
        y = np.concatenate((even + odd, even - odd), axis=-1)
        half *= 2
    return y.reshape(lead + (n,))


@lru_cache(maxsize=64)
def _chirp(n: int, sign: int) -> tuple[np.ndarray, np.ndarray, int]:
    k = np.arange(n, dtype=np.int64)
    # k^2 mod 2n keeps the phase argument small and exact
    chirp = np.exp(sign * 1j * np.pi * ((k * k) % (2 * n)) / n)
    m = 1 << (2 * n - 2).bit_length()
    kernel = np.zeros(m, dtype=np.complex128)
    kernel[:n] = np.conj(chirp)
    kernel[m - n + 1:] = np.conj(chirp[1:][::-1])
    kernel_f = _radix2(kernel, -1)
    chirp.flags.writeable = False
    kernel_f.flags.writeable = False
    return chirp, kernel_f, m


def _bluestein(x: np.ndarray, sign: int) -> np.ndarray:
    n = x.shape[-1]
    chirp, kernel_f, m = _chirp(n, sign)
    a = np.zeros(x.shape[:-1] + (m,), dtype=np.complex128)
    a[..., :n] = x * chirp
    conv = _radix2(_radix2(a, -1) * kernel_f, +1) / m
    return chirp * conv[..., :n]


def _dft_last_axis(x: np.ndarray, sign: int) -> np.ndarray:
    n = x.shape[-1]
    if n == 1:
        return x.astype(np.complex128)
    if n & (n - 1) == 0:
        return _radix2(x, sign)
    return _bluestein(x, sign)


def dft2(a: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Unnormalised 2-D DFT of an array (``inverse`` flips the exponent sign)."""
    sign = 1 if inverse else -1
    rows = _dft_last_axis(np.asarray(a, dtype=np.complex128), sign)
    return _dft_last_axis(rows.T, sign).T


def fft2(plane: RealPlane) -> Spectrum:
    return Spectrum(dft2(plane.values))


def ifft2(spec: Spectrum) -> RealPlane:
    """Inverse transform of a spectrum that should belong to a real signal.

    Raises:
        NonRealResult: the imaginary residue exceeds ``IMAG_TOLERANCE`` times
            the largest output magnitude.
    """
    z = dft2(spec.values, inverse=True) / (spec.width * spec.height)
    scale = float(np.max(np.abs(z)))
    residue = float(np.max(np.abs(z.imag)))
    if residue > IMAG_TOLERANCE * scale:
        raise NonRealResult(
            f"imaginary residue {residue:.3g} exceeds {IMAG_TOLERANCE:g} x magnitude {scale:.3g}"
        )
    return RealPlane(z.real)
