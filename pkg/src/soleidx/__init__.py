"""Threshold-indexed reference catalog for commercial shoe-print images.

Pipeline: decode (BMP/PGM) -> grayscale -> histogram equalization ->
optional Wiener / constrained-least-squares restoration -> Otsu global
threshold, whose normalized value tau keys the catalog.
"""

__version__ = "0.1.0"

from .enhance import Histogram, TransferFunction, compute_histogram, equalization_map, equalize
from .imagecore import (
    GrayImage,
    RealPlane,
    RgbImage,
    decode_bmp,
    decode_image,
    decode_pgm,
    encode_bmp,
    encode_pgm,
    to_grayscale,
)
from .indexdb import (
    Catalog,
    IndexRecord,
    add_record,
    ingest,
    load_catalog,
    query_range,
    run_pipeline,
    save_catalog,
)
from .restore import (
    BlurKernel,
    RestorationParams,
    Spectrum,
    cls_restore,
    degrade,
    fft2,
    ifft2,
    motion_blur_psf,
    psnr,
    wiener_restore,
)
from .segment import BinaryImage, OtsuResult, binarize, global_threshold_index, otsu_threshold
