"""Kernel tests: every word-parallel answer is checked against a plain
per-field scan written independently below."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from choicedict.words import (
    BitString,
    CapacityError,
    FieldView,
    leq_mask,
    min_zero_field,
    mw_div,
    mw_mul,
    nonzero_field_bounds,
    ones_pattern,
    regionwise_div,
)


# ---------------------------------------------------------------- oracles

def fields_of(value, m, f):
    """Field tuple (a_1..a_m) of a value, plain shifts."""
    return [(value >> (i * f)) & ((1 << f) - 1) for i in range(m)]


def pack_fields(fields, f):
    v = 0
    for i, a in enumerate(fields):
        v |= a << (i * f)
    return v


def scan_bounds(fields):
    nz = [i + 1 for i, a in enumerate(fields) if a]
    return (nz[0], nz[-1]) if nz else None


def scan_min_zero(fields):
    for i, a in enumerate(fields):
        if a == 0:
            return i + 1
    return None


def scan_leq(fields, k):
    return [1 if k >= a else 0 for a in fields]


def bs(value, len_bits, w=64):
    return BitString(value, len_bits, w)


# ---------------------------------------------------------------- ones_pattern

def test_ones_pattern_known_values():
    assert ones_pattern(3, 2).value == 21
    assert ones_pattern(4, 1).value == 15
    for f in (1, 3, 17):
        assert ones_pattern(1, f).value == 1


def test_ones_pattern_length_and_fields():
    p = ones_pattern(5, 3)
    assert p.len_bits == 15
    assert fields_of(p.value, 5, 3) == [1] * 5


def test_ones_pattern_saturates_every_field():
    for m, f in [(3, 2), (7, 5), (2, 9)]:
        sat = ones_pattern(m, f).value * ((1 << f) - 1)
        assert fields_of(sat, m, f) == [(1 << f) - 1] * m


def test_ones_pattern_rejects_bad_shapes():
    with pytest.raises(ValueError):
        ones_pattern(0, 3)
    with pytest.raises(CapacityError):
        ones_pattern(1 << 30, 8)


# ---------------------------------------------------------------- field scans

def test_bounds_spec_examples():
    v = FieldView(3, 2)
    assert nonzero_field_bounds(bs(pack_fields([0, 2, 0], 2), 6), v) == (2, 2)
    assert nonzero_field_bounds(bs(0, 6), v) is None
    assert nonzero_field_bounds(bs(pack_fields([1, 0, 3], 2), 6), v) == (1, 3)


def test_min_zero_spec_examples():
    v = FieldView(3, 1)
    assert min_zero_field(bs(0b111, 3), v) is None
    assert min_zero_field(bs(0b001, 3), v) == 2


def test_leq_spec_examples():
    v = FieldView(3, 3)
    x = bs(pack_fields([2, 5, 0], 3), 9)
    assert fields_of(leq_mask(x, v, 3).value, 3, 3) == [1, 0, 1]
    assert fields_of(leq_mask(x, v, 7).value, 3, 3) == [1, 1, 1]
    xpos = bs(pack_fields([2, 5, 1], 3), 9)
    assert fields_of(leq_mask(xpos, v, 0).value, 3, 3) == [0, 0, 0]


def all_views(max_bits):
    for m in range(1, max_bits + 1):
        for f in range(1, max_bits // m + 1):
            yield m, f


def test_scans_exhaustive_small():
    # Full sweep over every shape with m*f <= 10 and every value; the
    # acceptance suite pushes this to 16 bits.
    for m, f in all_views(10):
        v = FieldView(m, f)
        for value in range(1 << (m * f)):
            x = bs(value, m * f)
            fl = fields_of(value, m, f)
            assert nonzero_field_bounds(x, v) == scan_bounds(fl)
            assert min_zero_field(x, v) == scan_min_zero(fl)


def test_leq_exhaustive_small():
    for m, f in all_views(8):
        v = FieldView(m, f)
        ks = range(1 << f) if f <= 3 else (0, 1, (1 << f) - 1, 1 << (f - 1))
        for value in range(1 << (m * f)):
            fl = fields_of(value, m, f)
            for k in ks:
                got = fields_of(leq_mask(bs(value, m * f), v, k).value, m, f)
                assert got == scan_leq(fl, k), (m, f, value, k)


@given(st.data())
@settings(max_examples=300, deadline=None)
def test_scans_random_large(data):
    m = data.draw(st.integers(1, 80))
    f = data.draw(st.integers(1, 24))
    value = data.draw(st.integers(0, (1 << (m * f)) - 1))
    k = data.draw(st.integers(0, (1 << f) - 1))
    v = FieldView(m, f)
    x = bs(value, m * f)
    fl = fields_of(value, m, f)
    assert nonzero_field_bounds(x, v) == scan_bounds(fl)
    assert min_zero_field(x, v) == scan_min_zero(fl)
    assert fields_of(leq_mask(x, v, k).value, m, f) == scan_leq(fl, k)


def test_leq_rejects_out_of_range_k():
    with pytest.raises(ValueError):
        leq_mask(bs(0, 4), FieldView(2, 2), 4)


# ---------------------------------------------------------------- mul / div

def test_mul_div_trivial():
    six, seven = bs(6, 8), bs(7, 8)
    assert mw_mul(six, seven).value == 42
    one = bs(1, 8)
    x = bs(173, 8)
    assert mw_mul(x, one).value == 173
    assert mw_div(x, one).value == 173


def test_div_by_zero():
    with pytest.raises(ZeroDivisionError):
        mw_div(bs(5, 4), bs(0, 4))


@given(st.integers(0, (1 << 256) - 1), st.integers(1, (1 << 256) - 1))
@settings(max_examples=200, deadline=None)
def test_mul_div_match_wide_oracle(x, y):
    bx, by = bs(x, 256), bs(y, 256)
    assert mw_mul(bx, by).value == x * y
    assert mw_div(bx, by).value == x // y


@given(st.integers(0, (1 << 120) - 1), st.integers(1, (1 << 120) - 1))
@settings(max_examples=100, deadline=None)
def test_div_of_mul_roundtrip(x, y):
    bx, by = bs(x, 120), bs(y, 120)
    assert mw_div(mw_mul(bx, by), by).value == x


def test_mul_small_word_width():
    # Shrunken word width forces the multiword paths.
    x, y = 0xDEADBEEFCAFE, 0x123456789
    bx = BitString(x, 48, w=8)
    by = BitString(y, 40, w=8)
    p = mw_mul(bx, by)
    assert p.value == x * y
    assert p.w == 8


# ---------------------------------------------------------------- regionwise_div

def scan_regionwise(value, b, r, p):
    out = 0
    for j in range(p):
        a = (value >> (r * j)) & ((1 << r) - 1)
        out |= (a // b) << (r * j)
    return out


def test_regionwise_spec_examples():
    x = bs(pack_fields([7, 10, 3], 4), 12)
    got = regionwise_div(x, 3, 4, 3)
    assert fields_of(got.value, 3, 4) == [2, 3, 1]
    assert regionwise_div(x, 1, 4, 3).value == x.value
    assert regionwise_div(x, 16, 4, 3).value == 0


def test_regionwise_exhaustive_divisors_small():
    rng = random.Random(1)
    for r in range(1, 7):
        p = 5
        for b in range(1, (1 << r) + 1):
            for _ in range(8):
                value = rng.getrandbits(r * p)
                got = regionwise_div(bs(value, r * p), b, r, p)
                assert got.value == scan_regionwise(value, b, r, p), (r, b, value)


@given(st.data())
@settings(max_examples=300, deadline=None)
def test_regionwise_random(data):
    r = data.draw(st.integers(1, 12))
    p = data.draw(st.integers(1, 40))
    b = data.draw(st.integers(1, 1 << r))
    value = data.draw(st.integers(0, (1 << (r * p)) - 1))
    got = regionwise_div(bs(value, r * p), b, r, p)
    assert got.value == scan_regionwise(value, b, r, p)


def test_regionwise_rejects_zero_divisor():
    with pytest.raises(ValueError):
        regionwise_div(bs(0, 8), 0, 4, 2)


# ---------------------------------------------------------------- BitString

def test_bitstring_word_view_roundtrip():
    x = BitString(0x30000000000000001, 66)
    assert x.words == [1, 3]
    assert BitString.from_words([1, 3], 66) == x


def test_bitstring_rejects_oversized_value():
    with pytest.raises(ValueError):
        BitString(16, 4)
