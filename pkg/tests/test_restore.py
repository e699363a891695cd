import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import psnr_or_inf
from soleidx.corpus import tread_print
from soleidx.errors import (
    DimensionMismatch,
    IdenticalImages,
    IllConditioned,
    InvalidLength,
    KernelTooLarge,
    NegativeGamma,
    NegativeK,
)
from soleidx.imagecore import GrayImage
from soleidx.restore import (
    LAPLACIAN,
    BlurKernel,
    RestorationParams,
    cls_restore,
    degrade,
    gaussian_noise,
    identity_psf,
    laplacian_spectrum,
    motion_blur_psf,
    pad_to_origin,
    psnr,
    restore,
    transfer_function,
    wiener_restore,
)

K_GRID = [10.0**e for e in np.arange(-4, -0.99, 0.5)]


def print_image(seed=0, size=64):
    return tread_print(np.random.default_rng(seed), size)


# --- PSF ------------------------------------------------------------------


def test_psf_length_one():
    for angle in (0, 33, 90, 271.5):
        assert motion_blur_psf(1, angle).weights.tolist() == [[1.0]]


def test_psf_horizontal():
    k = motion_blur_psf(5, 0).weights
    assert k.shape == (1, 5)
    assert np.allclose(k, 0.2)


def test_psf_vertical():
    k = motion_blur_psf(3, 90).weights
    assert k.shape == (3, 1)
    assert np.allclose(k, 1 / 3)


def test_psf_diagonal_runs_bottom_left_to_top_right():
    k = motion_blur_psf(3, 45).weights
    assert (k > 0).astype(int).tolist() == [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
    k = motion_blur_psf(3, 135).weights
    assert (k > 0).astype(int).tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


@settings(max_examples=200)
@given(st.integers(1, 25), st.floats(-720, 720))
def test_psf_invariants(length, angle):
    k = motion_blur_psf(length, angle)
    w = k.weights
    assert w.shape[0] % 2 == 1 and w.shape[1] % 2 == 1
    assert abs(w.sum() - 1) <= 1e-12
    assert np.count_nonzero(w) == length
    assert np.allclose(w[w > 0], 1 / length)
    # center cell always covered; box is as tight as it can be while centered
    cy, cx = w.shape[0] // 2, w.shape[1] // 2
    assert w[cy, cx] > 0
    rows, cols = np.nonzero(w)
    assert max(abs(rows - cy)) == cy and max(abs(cols - cx)) == cx


@pytest.mark.parametrize("length", [0, -3, 2.5])
def test_psf_invalid_length(length):
    with pytest.raises(InvalidLength):
        motion_blur_psf(length, 0)


def test_blur_kernel_invariants():
    with pytest.raises(ValueError):
        BlurKernel(np.ones((2, 1)) / 2)
    with pytest.raises(ValueError):
        BlurKernel(np.array([[0.5, 0.6, -0.1]]))
    with pytest.raises(ValueError):
        BlurKernel(np.array([[0.5]]))


def test_pad_to_origin_wraps_center():
    padded = pad_to_origin(np.arange(9, dtype=float).reshape(3, 3), (5, 6))
    assert padded[0, 0] == 4  # center
    assert padded[4, 5] == 0  # up-left neighbour wraps
    assert padded[1, 1] == 8
    with pytest.raises(KernelTooLarge):
        pad_to_origin(np.ones((3, 7)), (5, 6))


def test_laplacian_spectrum_has_zero_dc():
    p = laplacian_spectrum((16, 16)).values
    assert abs(p[0, 0]) < 1e-12
    # closed form 4 - 2 cos(2 pi u/W) - 2 cos(2 pi v/H)
    v, u = np.mgrid[0:16, 0:16]
    expected = 4 - 2 * np.cos(2 * np.pi * u / 16) - 2 * np.cos(2 * np.pi * v / 16)
    assert np.allclose(p, expected, atol=1e-12)
    assert LAPLACIAN.sum() == 0


# --- degrade --------------------------------------------------------------


@given(arrays(np.uint8, st.tuples(st.integers(1, 20), st.integers(1, 20))))
def test_degrade_identity_kernel(px):
    img = GrayImage(px)
    assert degrade(img, identity_psf(), 0.0, 0) == img


@pytest.mark.parametrize("length,angle", [(3, 0), (5, 45), (7, 90), (4, 30)])
def test_degrade_preserves_mean(length, angle):
    img = print_image(1)
    out = degrade(img, motion_blur_psf(length, angle), 0.0, 0)
    assert abs(out.pixels.mean() - img.pixels.mean()) <= 1


def test_degrade_single_white_pixel():
    px = np.zeros((64, 64), dtype=np.uint8)
    px[10, 62] = 255
    out = degrade(GrayImage(px), motion_blur_psf(5, 0), 0.0, 0).pixels
    expected = np.zeros((64, 64), dtype=np.uint8)
    expected[10, [60, 61, 62, 63, 0]] = 51  # wraps around the right edge
    assert np.array_equal(out, expected)


def test_degrade_matches_direct_circular_convolution():
    rng = np.random.default_rng(7)
    img = GrayImage(rng.integers(0, 256, (9, 11)))
    psf = motion_blur_psf(5, 30)
    w = psf.weights
    cy, cx = w.shape[0] // 2, w.shape[1] // 2
    x = img.pixels / 255.0
    acc = np.zeros_like(x)
    for (i, j), wt in np.ndenumerate(w):
        acc += wt * np.roll(x, (i - cy, j - cx), axis=(0, 1))
    expected = np.floor(np.clip(acc, 0, 1) * 255 + 0.5)
    assert np.array_equal(degrade(img, psf, 0, 0).pixels, expected)


def test_degrade_is_deterministic_per_seed():
    img = print_image(2)
    psf = motion_blur_psf(7, 0)
    a = degrade(img, psf, 0.05, 11)
    assert a == degrade(img, psf, 0.05, 11)
    assert a != degrade(img, psf, 0.05, 12)


def test_gaussian_noise_statistics():
    z = gaussian_noise((256, 256), 1.0, 123)
    assert abs(z.mean()) < 0.02
    assert abs(z.std() - 1) < 0.02
    assert np.array_equal(z, gaussian_noise((256, 256), 1.0, 123))


def test_degrade_kernel_too_large():
    with pytest.raises(KernelTooLarge):
        degrade(GrayImage(np.zeros((4, 4))), motion_blur_psf(7, 0), 0, 0)


# --- restoration ----------------------------------------------------------


def test_wiener_identity_psf_is_identity():
    img = print_image(3)
    assert wiener_restore(img, identity_psf(), 0) == img


@pytest.mark.parametrize("length,angle", [(3, 0), (5, 90), (5, 45)])
def test_wiener_inverts_noiseless_blur_for_exact_blur_levels(length, angle):
    # 40/220 prints: 180/3 and 180/5 are integers, so blurring loses nothing
    img = print_image(4)
    psf = motion_blur_psf(length, angle)
    assert wiener_restore(degrade(img, psf, 0, 0), psf, 0) == img


def test_wiener_zero_k_guard():
    # even-length horizontal blur on an even width has an exact spectral zero
    img = print_image(5)
    with pytest.raises(IllConditioned):
        wiener_restore(img, motion_blur_psf(4, 0), 0)
    with pytest.raises(IllConditioned):
        cls_restore(img, motion_blur_psf(4, 0), 0)
    wiener_restore(img, motion_blur_psf(4, 0), 1e-3)  # regularised: fine


def test_negative_parameters():
    img = print_image(5)
    with pytest.raises(NegativeK):
        wiener_restore(img, identity_psf(), -1e-3)
    with pytest.raises(NegativeGamma):
        cls_restore(img, identity_psf(), -1)
    with pytest.raises(NegativeK):
        RestorationParams("wiener", k=-1)


@pytest.mark.parametrize("seed", range(12))
def test_cls_gamma_zero_equals_wiener_k_zero(seed):
    rng = np.random.default_rng(seed)
    img = GrayImage(rng.integers(0, 256, (32, 48)))
    psf = motion_blur_psf(int(rng.integers(1, 8)), float(rng.uniform(0, 180)))
    try:
        expected = wiener_restore(img, psf, 0)
    except IllConditioned:
        with pytest.raises(IllConditioned):
            cls_restore(img, psf, 0)
        return
    assert cls_restore(img, psf, 0) == expected


@pytest.mark.parametrize("gamma", [0.0, 0.01, 1.0, 100.0])
def test_cls_passes_constant_image(gamma):
    img = GrayImage(np.full((16, 16), 137))
    out = cls_restore(img, identity_psf(), gamma)
    assert np.abs(out.pixels.astype(int) - 137).max() <= 1


def test_restore_dispatch():
    img = degrade(print_image(6), motion_blur_psf(5, 0), 0.01, 1)
    psf = motion_blur_psf(5, 0)
    assert restore(img, psf, RestorationParams("wiener", k=0.02)) == wiener_restore(img, psf, 0.02)
    assert restore(img, psf, RestorationParams("cls", gamma=0.3)) == cls_restore(img, psf, 0.3)


def test_regularization_beats_inverse_under_noise():
    x = print_image(7, 128)
    psf = motion_blur_psf(7, 0)
    g = degrade(x, psf, 0.01, 0)
    inverse = psnr_or_inf(wiener_restore(g, psf, 0), x)
    assert max(psnr_or_inf(wiener_restore(g, psf, k), x) for k in K_GRID) > inverse
    assert max(psnr_or_inf(cls_restore(g, psf, k), x) for k in K_GRID) > inverse


def test_outputs_are_valid_gray_images():
    x = print_image(8)
    psf = motion_blur_psf(7, 20)
    g = degrade(x, psf, 0.05, 3)
    for out in (wiener_restore(g, psf, 1e-3), cls_restore(g, psf, 1e-3), g):
        assert out.levels == 256 and out.pixels.dtype == np.uint8
        assert out.pixels.shape == x.pixels.shape


def test_transfer_function_dc_gain():
    h = transfer_function(motion_blur_psf(7, 33), (32, 32)).values
    assert abs(h[0, 0] - 1) < 1e-12


# --- PSNR -----------------------------------------------------------------


def test_psnr_identical():
    a = GrayImage(np.array([[1, 2]]))
    with pytest.raises(IdenticalImages):
        psnr(a, a)


def test_psnr_values():
    assert psnr(GrayImage(np.array([[0]])), GrayImage(np.array([[255]]))) == 0.0
    value = psnr(GrayImage(np.array([[0, 0]])), GrayImage(np.array([[0, 255]])))
    assert math.isclose(value, 10 * math.log10(2), rel_tol=1e-12)
    assert round(value, 4) == 3.0103


def test_psnr_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        psnr(GrayImage(np.zeros((2, 2))), GrayImage(np.zeros((2, 3))))


@pytest.mark.xfail(strict=True, reason=(
    "8-bit requantization of the blurred image is amplified by 1/|H| during "
    "inversion; with |H|^2 ~ 1e-5 the error reaches tens of gray levels, so "
    "the stated +/-1 bound does not hold for generic images"))
def test_noiseless_inverse_within_one_level_when_well_conditioned():
    rng = np.random.default_rng(0)
    checked = 0
    for _ in range(20):
        x = GrayImage(rng.integers(0, 256, (32, 32)))
        psf = motion_blur_psf(int(rng.integers(2, 8)), float(rng.choice([0, 45, 90, 30])))
        h = transfer_function(psf, (32, 32)).values
        if np.min(np.abs(h) ** 2) < 1e-6:
            continue
        checked += 1
        out = wiener_restore(degrade(x, psf, 0, 0), psf, 0)
        assert np.abs(out.pixels.astype(int) - x.pixels.astype(int)).max() <= 1
    assert checked
