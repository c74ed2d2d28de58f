"""Compaction is a shape-determined permutation of live bit positions.

The oracle used throughout: feed unit vectors through the public
functions and record where each live bit lands.  Everything else
(arbitrary values, popcounts, round-trips) must then be consistent with
that permutation.
"""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choicedict.compaction import (
    GapShape,
    compact_groups,
    compact_pow2,
    expand_groups,
    expand_pow2,
)
from choicedict.words import BitString, ones


def live_positions(shape):
    return [i * shape.m + j for i in range(shape.n) for j in range(shape.u)]


def pow2_live_positions(g, h):
    return [i * g + j for i in range(h) for j in range(g - 1)]


def landing_map(compact_fn, positions, out_bits, width):
    """Where each live bit lands, via unit vectors; asserts injectivity."""
    perm = {}
    for p in positions:
        y = int(compact_fn(BitString(1 << p, width)))
        assert y and y & (y - 1) == 0, f"bit {p} did not stay a single bit"
        k = y.bit_length() - 1
        assert k < out_bits
        perm[p] = k
    assert len(set(perm.values())) == len(positions)
    return perm


def scatter(perm, positions, bits):
    value = 0
    for i, p in enumerate(positions):
        if (bits >> i) & 1:
            value |= 1 << p
    return value, sum(1 << perm[p] for p in positions if (value >> p) & 1)


# -- fixed-pattern scheme --------------------------------------------------


def test_pow2_tiny_frozen():
    # g=2, h=2: live bits 0 and 2 land at 0 and 1, worked by hand.
    for x, y in [(0, 0), (1, 1), (4, 2), (5, 3)]:
        got = compact_pow2(BitString(x, 4), 2, 2)
        assert (int(got), got.len_bits) == (y, 2)
        assert int(expand_pow2(BitString(y, 2), 2, 2)) == x


def test_pow2_figure_shape():
    g, h = 4, 16
    live = 7 * ones(h, g)
    out = compact_pow2(BitString(live, 64), g, h)
    assert int(out) == (1 << 48) - 1 and out.len_bits == 48
    perm = landing_map(
        lambda b: compact_pow2(b, g, h), pow2_live_positions(g, h), 48, 64
    )
    assert sorted(perm.values()) == list(range(48))


@pytest.mark.parametrize("g,h", [(2, 4), (3, 3), (3, 6), (5, 5), (6, 12)])
def test_pow2_all_live_set(g, h):
    live = ((1 << (g - 1)) - 1) * ones(h, g)
    assert int(compact_pow2(BitString(live, g * h), g, h)) == (1 << (h * (g - 1))) - 1


def test_pow2_exhaustive_g2_h4():
    g, h = 2, 4
    perm = landing_map(
        lambda b: compact_pow2(b, g, h), pow2_live_positions(g, h), h * (g - 1), g * h
    )
    for bits in range(1 << (h * (g - 1))):
        x, want = scatter(perm, pow2_live_positions(g, h), bits)
        got = compact_pow2(BitString(x, g * h), g, h)
        assert int(got) == want
        assert int(expand_pow2(got, g, h)) == x


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_pow2_roundtrip_random(data):
    g = data.draw(st.integers(2, 7))
    h = g * data.draw(st.integers(1, 6))
    picks = data.draw(st.lists(st.sampled_from(pow2_live_positions(g, h)), unique=True))
    x = sum(1 << p for p in picks)
    y = compact_pow2(BitString(x, g * h), g, h)
    assert bin(int(y)).count("1") == len(picks)
    back = expand_pow2(y, g, h)
    assert int(back) == x and back.len_bits == g * h


def test_pow2_argument_errors():
    with pytest.raises(ValueError):
        compact_pow2(BitString(0, 4), 1, 4)
    with pytest.raises(ValueError):
        compact_pow2(BitString(0, 6), 2, 3)  # h not a multiple of g
    with pytest.raises(ValueError):
        compact_pow2(BitString(0, 5), 2, 2)  # wrong operand length
    with pytest.raises(ValueError):
        compact_pow2(BitString(2, 4), 2, 2)  # dead bit set
    with pytest.raises(ValueError):
        expand_pow2(BitString(1 << 2, 4), 2, 2)  # high bits set


# -- general gapped layouts ------------------------------------------------


def test_groups_identity_when_packed():
    for shape in [GapShape(3, 4, 4), GapShape(1, 9, 5), GapShape(7, 1, 1)]:
        bits = shape.n * shape.m if shape.u == shape.m else shape.n * shape.u
        rng = random.Random(7)
        x = BitString(rng.getrandbits(bits), shape.n * shape.m)
        if shape.u != shape.m:
            x = BitString(int(x) & ((1 << (shape.n * shape.u)) - 1), shape.n * shape.m)
        y, trace = compact_groups(x, shape)
        assert int(y) == int(x)
        assert trace.stages == ()


def test_groups_spec_shape_exhaustive():
    shape = GapShape(3, 4, 2)
    pos = live_positions(shape)
    perm = landing_map(lambda b: compact_groups(b, shape)[0], pos, 6, 12)
    assert sorted(perm.values()) == list(range(6))
    for bits in range(1 << 6):
        x, want = scatter(perm, pos, bits)
        y, _ = compact_groups(BitString(x, 12), shape)
        assert int(y) == want
        assert bin(want).count("1") == bin(x).count("1")
        assert int(expand_groups(y, shape)) == x


def all_small_shapes(weight_cap=20, m_cap=10):
    for m in range(1, m_cap + 1):
        for u in range(1, m + 1):
            for n in range(1, weight_cap // u + 1):
                yield GapShape(n, m, u)


def test_groups_bijection_exhaustive_small():
    rng = random.Random(2024)
    for shape in all_small_shapes():
        pos = live_positions(shape)
        total = shape.n * shape.u
        perm = landing_map(
            lambda b: compact_groups(b, shape)[0], pos, total, shape.n * shape.m
        )
        assert sorted(perm.values()) == list(range(total))
        for _ in range(3):
            x, want = scatter(perm, pos, rng.getrandbits(total))
            y, _ = compact_groups(BitString(x, shape.n * shape.m), shape)
            assert int(y) == want
            assert int(expand_groups(y, shape)) == x


@settings(max_examples=250, deadline=None)
@given(st.data())
def test_groups_roundtrip_random_shapes(data):
    m = data.draw(st.integers(1, 64))
    u = data.draw(st.integers(1, m))
    n = data.draw(st.integers(1, 64))
    shape = GapShape(n, m, u)
    raw = data.draw(st.integers(0, (1 << (n * u)) - 1))
    x = 0
    for i in range(n):
        x |= ((raw >> (i * u)) & ((1 << u) - 1)) << (i * m)
    y, _ = compact_groups(BitString(x, n * m), shape)
    assert bin(int(y)).count("1") == bin(x).count("1")
    assert y.len_bits == n * u
    back = expand_groups(y, shape)
    assert int(back) == x and back.len_bits == n * m


def test_groups_argument_errors():
    with pytest.raises(ValueError):
        compact_groups(BitString(0b100, 8), GapShape(2, 4, 2))  # stray bit
    with pytest.raises(ValueError):
        compact_groups(BitString(0, 9), GapShape(2, 4, 2))  # wrong length
    with pytest.raises(ValueError):
        expand_groups(BitString(1 << 4, 8), GapShape(2, 4, 2))  # high bits set
    with pytest.raises(ValueError):
        compact_groups(BitString(0, 8), GapShape(2, 4, 5))  # u > m


def test_groups_expand_trivia():
    shape = GapShape(4, 6, 3)
    assert int(expand_groups(BitString(0, 12), shape)) == 0
    one = GapShape(1, 9, 4)
    y = BitString(0b1011, 4)
    assert int(expand_groups(y, one)) == 0b1011  # offsets 0..u-1 of the period


def test_groups_stage_count_bound():
    rng = random.Random(5)
    shapes = [
        GapShape(n, m, u)
        for m in range(2, 33)
        for u in range(1, m)
        for n in rng.sample(range(1, 41), 6)
    ]
    for shape in shapes:
        _, trace = compact_groups(BitString(0, shape.n * shape.m), shape)
        cap = 2 * math.log2(min(shape.u, shape.m - shape.u) + 2) + 4
        assert trace.euclid_stages <= cap, (shape, trace.euclid_stages, cap)
