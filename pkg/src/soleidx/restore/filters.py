"""Blur degradation and frequency-domain restoration (Wiener, constrained least squares)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import (
    DimensionMismatch,
    IdenticalImages,
    IllConditioned,
    NegativeGamma,
    NegativeK,
    ParameterError,
)
from ..imagecore import GrayImage, RealPlane, quantize, to_plane
from .fft import Spectrum, dft2, fft2, ifft2
from .psf import LAPLACIAN, BlurKernel, pad_to_origin

# Smallest |H|^2 the unregularised inverse (k = 0 / gamma = 0) accepts.
MIN_SPECTRAL_POWER = 1e-12

DEFAULT_K = 0.01
DEFAULT_GAMMA = 0.01


@dataclass(frozen=True)
class RestorationParams:
    method: str = "wiener"
    k: float = DEFAULT_K
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if self.method not in ("wiener", "cls"):
            raise ParameterError(f"unknown restoration method {self.method!r}")
        _check_non_negative(self.k, NegativeK, "k")
        _check_non_negative(self.gamma, NegativeGamma, "gamma")


def _check_non_negative(value, error, name):
    if not (math.isfinite(value) and value >= 0):
        raise error(f"{name} must be a finite value >= 0, got {value!r}")


def transfer_function(psf: BlurKernel, shape: tuple[int, int]) -> Spectrum:
    """Optical transfer function H: DFT of the PSF padded with its center at the origin."""
    return Spectrum(dft2(pad_to_origin(psf.weights, shape)))


def laplacian_spectrum(shape: tuple[int, int]) -> Spectrum:
    return Spectrum(dft2(pad_to_origin(LAPLACIAN, shape)))


def gaussian_noise(shape: tuple[int, int], sigma: float, seed: int) -> np.ndarray:
    """Deterministic N(0, sigma^2) field.

    Uniforms come from numpy's PCG64 bit generator seeded with ``seed``;
    Box-Muller turns each pair ``(u1, u2)`` into ``r cos(2 pi u2)`` and
    ``r sin(2 pi u2)`` with ``r = sqrt(-2 ln(1 - u1))``, filled in row-major
    order.
    """
    n = shape[0] * shape[1]
    pairs = (n + 1) // 2
    u = np.random.Generator(np.random.PCG64(seed)).random((pairs, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    z = np.stack((radius * np.cos(angle), radius * np.sin(angle)), axis=1).ravel()
    return sigma * z[:n].reshape(shape)


def degrade(img: GrayImage, psf: BlurKernel, noise_sigma: float = 0.0, seed: int = 0) -> GrayImage:
    """Circularly blur ``img`` with ``psf``, add seeded Gaussian noise, requantize."""
    if not (math.isfinite(noise_sigma) and noise_sigma >= 0):
        raise ParameterError(f"noise sigma must be >= 0, got {noise_sigma!r}")
    if isinstance(seed, bool) or int(seed) != seed or seed < 0:
        raise ParameterError(f"seed must be a non-negative integer, got {seed!r}")
    shape = (img.height, img.width)
    h = transfer_function(psf, shape)
    blurred = ifft2(Spectrum(fft2(to_plane(img)).values * h.values)).values
    if noise_sigma > 0:
        blurred = blurred + gaussian_noise(shape, noise_sigma, int(seed))
    return quantize(RealPlane(blurred), img.levels)


def _inverse_filter(img: GrayImage, h: np.ndarray, regulariser) -> GrayImage:
    g = fft2(to_plane(img)).values
    restored = np.conj(h) / (np.abs(h) ** 2 + regulariser) * g
    return quantize(ifft2(Spectrum(restored)), img.levels)


def _guard(h: np.ndarray, what: str):
    smallest = float(np.min(np.abs(h) ** 2))
    if smallest < MIN_SPECTRAL_POWER:
        raise IllConditioned(
            f"{what}: min |H|^2 = {smallest:.3g} < {MIN_SPECTRAL_POWER:g}; use a positive regulariser"
        )


def wiener_restore(img: GrayImage, psf: BlurKernel, k: float = DEFAULT_K) -> GrayImage:
    """Parametric Wiener filter ``H* / (|H|^2 + k)``; ``k = 0`` is the plain inverse filter."""
    _check_non_negative(k, NegativeK, "k")
    h = transfer_function(psf, (img.height, img.width)).values
    if k == 0:
        _guard(h, "inverse filter")
    return _inverse_filter(img, h, float(k))


def cls_restore(img: GrayImage, psf: BlurKernel, gamma: float = DEFAULT_GAMMA) -> GrayImage:
    """Constrained least squares ``H* / (|H|^2 + gamma |P|^2)`` with P the Laplacian's spectrum."""
    _check_non_negative(gamma, NegativeGamma, "gamma")
    shape = (img.height, img.width)
    h = transfer_function(psf, shape).values
    if gamma == 0:
        _guard(h, "inverse filter")
    p = laplacian_spectrum(shape).values
    return _inverse_filter(img, h, float(gamma) * np.abs(p) ** 2)


def restore(img: GrayImage, psf: BlurKernel, params: RestorationParams) -> GrayImage:
    if params.method == "wiener":
        return wiener_restore(img, psf, params.k)
    return cls_restore(img, psf, params.gamma)


def psnr(a: GrayImage, b: GrayImage) -> float:
    """Peak signal-to-noise ratio in dB with peak ``levels - 1`` (255 for 8-bit)."""
    if a.pixels.shape != b.pixels.shape or a.levels != b.levels:
        raise DimensionMismatch(
            f"{a.width}x{a.height}/{a.levels} vs {b.width}x{b.height}/{b.levels}"
        )
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0:
        raise IdenticalImages("images are identical; PSNR is unbounded")
    peak = a.levels - 1
    return 10.0 * math.log10(peak * peak / mse)
