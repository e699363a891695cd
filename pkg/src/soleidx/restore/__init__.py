from .fft import Spectrum, fft2, ifft2
from .filters import (
    DEFAULT_GAMMA,
    DEFAULT_K,
    RestorationParams,
    cls_restore,
    degrade,
    gaussian_noise,
    laplacian_spectrum,
    psnr,
    restore,
    transfer_function,
    wiener_restore,
)
from .psf import LAPLACIAN, BlurKernel, identity_psf, motion_blur_psf, pad_to_origin

__all__ = [
    "BlurKernel",
    "DEFAULT_GAMMA",
    "DEFAULT_K",
    "LAPLACIAN",
    "RestorationParams",
    "Spectrum",
    "cls_restore",
    "degrade",
    "fft2",
    "gaussian_noise",
    "identity_psf",
    "ifft2",
    "laplacian_spectrum",
    "motion_blur_psf",
    "pad_to_origin",
    "psnr",
    "restore",
    "transfer_function",
    "wiener_restore",
]
