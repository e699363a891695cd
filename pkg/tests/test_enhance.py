from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from soleidx.enhance import Histogram, compute_histogram, equalization_map, equalize
from soleidx.errors import EmptyHistogram
from soleidx.imagecore import GrayImage


def gray(values, shape=None):
    arr = np.array(values, dtype=np.int64)
    return GrayImage(arr.reshape(shape or (1, -1)))


def test_histogram_counts():
    h = compute_histogram(gray([0, 0, 255, 7], (2, 2)))
    assert h.total == 4
    nonzero = {int(v): int(c) for v, c in enumerate(h.counts) if c}
    assert nonzero == {0: 2, 7: 1, 255: 1}


def test_histogram_constant():
    h = compute_histogram(GrayImage(np.full((3, 3), 100)))
    assert h.total == 9 and h.counts[100] == 9 and h.counts.sum() == 9


@given(arrays(np.uint8, st.integers(1, 64)), st.randoms())
def test_histogram_permutation_invariant(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert compute_histogram(gray(values)) == compute_histogram(gray(shuffled))


def test_map_constant_image():
    table = equalization_map(compute_histogram(GrayImage(np.full((4, 4), 100)))).table
    assert table[100] == 255
    assert table[99] == 0


def test_map_half_tie_rounds_up():
    table = equalization_map(compute_histogram(gray([0, 255]))).table
    assert (table[0], table[255]) == (128, 255)  # 127.5 -> 128


def test_map_three_quarters():
    table = equalization_map(compute_histogram(gray([10, 10, 10, 200]))).table
    assert (table[10], table[200]) == (191, 255)  # 191.25 -> 191


def test_map_rejects_empty_histogram():
    with pytest.raises(EmptyHistogram):
        equalization_map(Histogram(256, np.zeros(256)))


@pytest.mark.parametrize("values,expected", [
    ([100] * 6, [255] * 6),
    ([0, 255], [128, 255]),
    ([10, 10, 10, 200], [191, 191, 191, 255]),
])
def test_equalize_examples(values, expected):
    assert equalize(gray(values)).pixels.ravel().tolist() == expected


@settings(max_examples=200)
@given(arrays(np.int64, st.just(256), elements=st.integers(0, 10**6)))
def test_map_is_valid_transfer_function(counts):
    if counts.sum() == 0:
        counts[0] = 1
    table = equalization_map(Histogram(256, counts)).table
    assert np.all(np.diff(table) >= 0)
    assert table.min() >= 0 and table.max() == 255


def test_map_matches_fraction_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        counts = rng.integers(0, 50, 256) * (rng.random(256) < 0.3)
        counts[rng.integers(256)] += 1
        total = int(counts.sum())
        table = equalization_map(Histogram(256, counts)).table
        cum = 0
        for r in range(256):
            cum += int(counts[r])
            x = Fraction(255 * cum, total)
            expected = int(x + Fraction(1, 2))  # x >= 0 so floor(x + 1/2) is half-away
            assert table[r] == expected


def test_map_symbolic_levels():
    img = GrayImage(np.array([[0, 1023]]), levels=1024)
    out = equalize(img)
    assert out.levels == 1024
    assert out.pixels.tolist() == [[512, 1023]]  # round(1023 * 0.5) = 511.5 -> 512


def output_cdf(out, level):
    return Fraction(int(np.count_nonzero(out.pixels <= level)), out.pixels.size)


def input_cdf(img, level):
    return Fraction(int(np.count_nonzero(img.pixels <= level)), img.pixels.size)


@settings(max_examples=100)
@given(arrays(np.uint8, st.tuples(st.integers(1, 16), st.integers(1, 16))))
def test_equalize_properties(px):
    img = GrayImage(px)
    out = equalize(img)
    table = equalization_map(compute_histogram(img)).table
    assert out.pixels.max() == 255
    # order preservation
    a, b = img.pixels.ravel(), out.pixels.ravel()
    order = np.argsort(a, kind="stable")
    assert np.all(np.diff(b[order].astype(int)) >= 0)
    # CDF transport: levels merged into one output value carry the CDF of the
    # highest member; an unmerged level carries its own
    occupied = np.unique(a)
    for r in occupied:
        top = occupied[table[occupied] == table[r]].max()
        assert output_cdf(out, table[r]) == input_cdf(img, top)


@settings(max_examples=100)
@given(st.lists(st.integers(0, 255), min_size=1, max_size=8, unique=True),
       st.lists(st.integers(1, 30), min_size=8, max_size=8))
def test_equalize_second_pass_keeps_histogram(levels, weights):
    values = np.repeat(levels, weights[: len(levels)])
    img = gray(values)
    table = equalization_map(compute_histogram(img)).table
    mapped = table[np.array(levels)]
    assume(len(set(mapped.tolist())) == len(levels))  # no merge on the first pass
    once = equalize(img)
    assert compute_histogram(equalize(once)) == compute_histogram(once)
