"""Raster containers, BMP/PGM codecs and grayscale conversion.

Images are thin immutable wrappers around numpy arrays indexed ``[row, col]``
with row 0 at the top. Only uncompressed 24-bit bottom-up BMP and binary
8-bit PGM (P5) are understood; everything else is rejected explicitly.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    DecodeFailed,
    MalformedHeader,
    TruncatedData,
    UnsupportedLevels,
    UnsupportedMaxval,
    UnsupportedVariant,
)
from .rounding import round_half_away

DEFAULT_LEVELS = 256


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class RgbImage:
    """8-bit color image, ``pixels`` shaped ``(height, width, 3)`` in R, G, B order."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (height, width, 3) array, got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if px.size and (px.min() < 0 or px.max() > 255):
            raise ValueError("channel values must lie in [0, 255]")
        object.__setattr__(self, "pixels", _frozen(px.astype(np.uint8)))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RgbImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Single-channel image with ``levels`` gray levels (values in ``[0, levels-1]``)."""

    pixels: np.ndarray
    levels: int = DEFAULT_LEVELS

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError(f"expected (height, width) array, got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if not 2 <= self.levels <= 65536:
            raise ValueError(f"levels must be in [2, 65536], got {self.levels}")
        if px.dtype.kind == "f":
            if not np.all(px == np.floor(px)):
                raise ValueError("gray values must be integers")
        elif px.dtype.kind not in "iub":
            raise ValueError(f"unsupported pixel dtype {px.dtype}")
        if px.min() < 0 or px.max() > self.levels - 1:
            raise ValueError(f"gray values must lie in [0, {self.levels - 1}]")
        dtype = np.uint8 if self.levels <= 256 else np.uint16
        object.__setattr__(self, "pixels", _frozen(px.astype(dtype)))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.levels == other.levels and np.array_equal(self.pixels, other.pixels)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class RealPlane:
    """Real-valued working plane; image content lives in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"expected non-empty 2-D array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("plane contains NaN or Inf")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RealPlane):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None


def to_plane(img: GrayImage) -> RealPlane:
    """Scale gray levels to [0, 1]."""
    return RealPlane(img.pixels.astype(np.float64) / (img.levels - 1))


def quantize(plane: RealPlane, levels: int = DEFAULT_LEVELS) -> GrayImage:
    """Clamp a plane to [0, 1] and round to ``levels`` gray levels."""
    v = np.clip(plane.values, 0.0, 1.0) * (levels - 1)
    return GrayImage(round_half_away(v).astype(np.int64), levels)


# --- BMP ------------------------------------------------------------------

_BMP_HEADER = struct.Struct("<2sIHHIIiiHHIIiiII")
_BMP_HEADER_SIZE = 54


def decode_bmp(data: bytes) -> RgbImage:
    """Decode an uncompressed 24-bit bottom-up BMP.

    Raises:
        MalformedHeader: wrong magic, truncated or inconsistent header.
        UnsupportedVariant: bit depth other than 24, compression, top-down
            rows or a pre-BITMAPINFOHEADER core header.
        TruncatedData: pixel array shorter than the header declares.
    """
    data = bytes(data)
    if data[:2] != b"BM":
        raise MalformedHeader("not a BMP file (magic is not 'BM')")
    if len(data) < _BMP_HEADER_SIZE:
        raise MalformedHeader(f"BMP header truncated ({len(data)} < {_BMP_HEADER_SIZE} bytes)")
    (_, _, _, _, offset, info_size, width, height, planes, bpp, compression,
     *_rest) = _BMP_HEADER.unpack_from(data)
    if info_size < 40:
        raise UnsupportedVariant(f"info header of {info_size} bytes; BITMAPINFOHEADER required")
    if bpp != 24:
        raise UnsupportedVariant(f"bit depth {bpp}; only 24-bit is supported")
    if compression != 0:
        raise UnsupportedVariant(f"compression {compression}; only uncompressed is supported")
    if height < 0:
        raise UnsupportedVariant("top-down BMP (negative height) is not supported")
    if width <= 0 or height == 0:
        raise MalformedHeader(f"invalid dimensions {width}x{height}")
    if planes != 1:
        raise MalformedHeader(f"planes field is {planes}, expected 1")
    if offset < 14 + info_size:
        raise MalformedHeader(f"pixel offset {offset} overlaps the header")

    stride = (3 * width + 3) & ~3
    end = offset + stride * height
    if end > len(data):
        raise TruncatedData(f"pixel array needs {end} bytes, file has {len(data)}")
    rows = np.frombuffer(data, dtype=np.uint8, count=stride * height, offset=offset)
    rows = rows.reshape(height, stride)[:, : 3 * width].reshape(height, width, 3)
    # stored bottom-up, BGR
    return RgbImage(rows[::-1, :, ::-1])


def encode_bmp(img: RgbImage) -> bytes:
    """Serialize as an uncompressed 24-bit bottom-up BMP."""
    stride = (3 * img.width + 3) & ~3
    raster = np.zeros((img.height, stride), dtype=np.uint8)
    raster[:, : 3 * img.width] = img.pixels[::-1, :, ::-1].reshape(img.height, -1)
    size = _BMP_HEADER_SIZE + raster.size
    header = _BMP_HEADER.pack(b"BM", size, 0, 0, _BMP_HEADER_SIZE, 40, img.width,
                              img.height, 1, 24, 0, raster.size, 2835, 2835, 0, 0)
    return header + raster.tobytes()


# --- PGM ------------------------------------------------------------------

_PGM_WS = b" \t\n\r\v\f"
_NETPBM_OTHER = {b"P1", b"P2", b"P3", b"P4", b"P6", b"P7"}


def _pgm_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next whitespace-delimited header token, skipping '#' comments."""
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c in _PGM_WS and c:
            pos += 1
        elif c == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos:pos + 1] not in _PGM_WS and data[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise MalformedHeader("PGM header truncated")
    return data[start:pos], pos


def decode_pgm(data: bytes) -> GrayImage:
    """Decode a binary (P5) PGM with maxval 255.

    Raises:
        MalformedHeader: bad magic or unparseable width/height/maxval.
        UnsupportedVariant: another netpbm flavour (P2, P6, ...).
        UnsupportedMaxval: maxval other than 255.
        TruncatedData: fewer raster bytes than ``width * height``.
    """
    data = bytes(data)
    magic = data[:2]
    if magic in _NETPBM_OTHER:
        raise UnsupportedVariant(f"netpbm variant {magic.decode()}; only P5 is supported")
    if magic != b"P5":
        raise MalformedHeader("not a binary PGM (magic is not 'P5')")
    pos = 2
    if pos >= len(data) or data[pos:pos + 1] not in _PGM_WS:
        raise MalformedHeader("missing whitespace after magic")
    fields = []
    for name in ("width", "height", "maxval"):
        tok, pos = _pgm_token(data, pos)
        if not re.fullmatch(rb"[0-9]+", tok):
            raise MalformedHeader(f"PGM {name} is not a decimal integer: {tok!r}")
        fields.append(int(tok))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MalformedHeader(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxval(f"maxval {maxval}; only 255 is supported")
    if pos >= len(data) or data[pos:pos + 1] not in _PGM_WS:
        raise MalformedHeader("missing whitespace byte before raster")
    pos += 1
    need = width * height
    if len(data) - pos < need:
        raise TruncatedData(f"raster needs {need} bytes, {len(data) - pos} present")
    px = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos)
    return GrayImage(px.reshape(height, width), DEFAULT_LEVELS)


def encode_pgm(img: GrayImage) -> bytes:
    """Serialize an 8-bit image as binary PGM."""
    if img.levels != 256:
        raise UnsupportedLevels(f"PGM output needs levels=256, image has {img.levels}")
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.astype(np.uint8).tobytes()


def to_grayscale(img: RgbImage) -> GrayImage:
    """BT.601 luminance, ``round(0.299 r + 0.587 g + 0.114 b)``, ties away from zero.

    Evaluated in integer thousandths so the result is exact: achromatic
    pixels map to themselves and no float tie can flip.
    """
    px = img.pixels.astype(np.int64)
    weighted = 299 * px[..., 0] + 587 * px[..., 1] + 114 * px[..., 2]
    return GrayImage((2 * weighted + 1000) // 2000, DEFAULT_LEVELS)


def decode_image(data: bytes) -> GrayImage:
    """Decode BMP or PGM by sniffing the magic bytes; color input is grayscaled."""
    head = bytes(data[:2])
    if head == b"BM":
        return to_grayscale(decode_bmp(data))
    if head == b"P5" or head in _NETPBM_OTHER:
        return decode_pgm(data)
    raise DecodeFailed("unrecognized image format (expected BMP or binary PGM)")
