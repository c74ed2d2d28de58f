import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choicedict.chainstore import ChainStore
from choicedict.words import CapacityError


def pattern_default(k):
    return (k * 0x9E37) & 0x3FFF


class PlainCells:
    """What the store must look like: an ordinary initialized array."""

    def __init__(self, N, default):
        self.default = default
        self.vals = [default(k) for k in range(1, N + 1)]

    def read(self, k):
        return self.vals[k - 1]

    def write(self, k, x):
        self.vals[k - 1] = x

    def weak_count(self):
        return sum(1 for k, v in enumerate(self.vals, 1) if v == self.default(k))

    def grow(self, content=None):
        self.vals.append(self.default(len(self.vals) + 1) if content is None else content)

    def shrink(self):
        self.vals.pop()


def check_equiv(cs, plain):
    assert cs.validate() == []
    got = [cs.read(k) for k in range(1, cs.N + 1)]
    assert got == plain.vals
    assert cs.mu == plain.weak_count()
    nz = cs.nonzero()
    if all(v == plain.default(k) for k, v in enumerate(plain.vals, 1)):
        assert nz is None
    else:
        assert nz is not None and plain.vals[nz - 1] != plain.default(nz)


def clone(cs):
    dup = ChainStore(
        cs.N,
        cs.cell_bits,
        default=cs._default,
        mode="strict" if cs.strict else "loose",
        w=cs.w,
    )
    dup._a = cs._a
    dup._flag = cs._flag
    dup._mu_loose = cs._mu_loose
    return dup


def test_frozen_tiny_strict():
    # Hand-computed: N=2, cell_bits=28 (b=14, p=7), zero defaults.
    cs = ChainStore(2, 28)
    assert cs.mu == 2 and cs.nonzero() is None
    cs.write(2, 5)
    assert cs.mu == 1
    assert [cs.read(1), cs.read(2)] == [0, 5]
    assert cs.nonzero() == 2
    # A[1] holds mu=1 at bits [21,28); A[2] holds the value 5 verbatim.
    assert cs._a == (1 << 21) | (5 << 28) == 1344274432
    words, flag = cs.dump_words()
    assert words == [1344274432] and flag == 1
    cs.write(2, 0)
    assert cs.mu == 2 and cs.nonzero() is None
    assert [cs.read(1), cs.read(2)] == [0, 0]
    assert cs.validate() == []


@pytest.mark.parametrize("mode", ["strict", "loose"])
@pytest.mark.parametrize("default", [None, pattern_default])
def test_plain_equivalence_random(mode, default):
    N, cell_bits = 40, 48
    cs = ChainStore(N, cell_bits, default=default, mode=mode)
    plain = PlainCells(N, cs.default)
    rng = random.Random(0xC0FFEE ^ (mode == "strict") ^ ((default is None) << 1))
    for step in range(3000):
        k = rng.randint(1, N)
        r = rng.random()
        if r < 0.3:
            x = cs.default(k)
        elif r < 0.6:
            x = rng.randint(0, 6)
        else:
            x = rng.getrandbits(cell_bits)
        cs.write(k, x)
        plain.write(k, x)
        if step % 50 == 0 or step > 2950:
            check_equiv(cs, plain)
        else:
            assert cs.read(k) == x
            assert cs.mu == plain.weak_count()
    check_equiv(cs, plain)


@pytest.mark.parametrize(
    "N,vals,mode,default",
    [
        (1, (0, 1, 2), "strict", None),
        (2, (0, 1, 2), "strict", None),
        (3, (0, 1, 2), "strict", None),
        (4, (0, 1), "strict", None),
        (3, (0, 1, 2), "loose", None),
        (3, (0, 1, 2), "strict", pattern_default),
    ],
)
def test_exhaustive_state_machine(N, vals, mode, default):
    # Walk every reachable raw state (storage, flag, mu) for tiny stores,
    # carrying the logical contents independently, and check the
    # plain-array contract plus all invariants at every node.
    start = ChainStore(N, 28, default=default, mode=mode)
    ops = [
        (k, v)
        for k in range(1, N + 1)
        for v in sorted(set(vals) | {start.default(k)})
    ]
    seen = set()
    stack = [(start, tuple(start.default(k) for k in range(1, N + 1)))]
    while stack:
        cs, vals_now = stack.pop()
        key = (cs._a, cs._flag, cs._mu_loose)
        if key in seen:
            continue
        seen.add(key)
        assert len(seen) < 60_000
        plain = PlainCells(N, cs.default)
        plain.vals = list(vals_now)
        check_equiv(cs, plain)
        for k, v in ops:
            nxt = clone(cs)
            nxt.write(k, v)
            assert nxt.read(k) == v
            stack.append((nxt, vals_now[: k - 1] + (v,) + vals_now[k:]))
    assert len(seen) > N  # sanity: the walk actually went somewhere


def test_spurious_edge_is_severed():
    cs = ChainStore(3, 28)
    b, p = cs.b, cs.p
    # Garbage in a weak cell that points at cell 3 is inert while
    # everything sits left of the barrier...
    cs._set_matefield(1, 3)
    assert cs.validate() == []
    assert [cs.read(k) for k in (1, 2, 3)] == [0, 0, 0]
    # ...and writing a value to cell 3 whose bits happen to point back
    # at cell 1 must sever the coincidence, not follow it.
    x = 1 << b  # mate-field bits of the value spell "cell 1"
    cs.write(3, x)
    assert cs._field(1, b, p) == 1  # pointer redirected to itself
    assert cs.mate(1) == 1
    assert [cs.read(k) for k in (1, 2, 3)] == [0, 0, x]
    assert cs.validate() == []


def test_grow_over_adversarial_memory():
    for garbage in [0, (1 << 14) | 3, 2 << 14, (1 << 28) - 1]:
        cs = ChainStore(2, 28)
        cs.write(1, 9)
        cs.grow(adopted=garbage)
        assert cs.N == 3
        assert [cs.read(k) for k in (1, 2, 3)] == [9, 0, 0]
        assert cs.validate() == []
        assert cs.mu == 2


def test_grow_strong_content():
    cs = ChainStore(2, 28)
    cs.write(2, 11)
    cs.grow(content=77, adopted=(1 << 28) - 1)
    assert [cs.read(k) for k in (1, 2, 3)] == [0, 11, 77]
    assert cs.validate() == []
    plain = PlainCells(3, cs.default)
    for k in (1, 2, 3):
        plain.write(k, cs.read(k))
    check_equiv(cs, plain)


def test_grow_then_read_default():
    cs = ChainStore(1, 28, default=pattern_default)
    cs.grow()
    assert cs.read(2) == pattern_default(2)
    assert cs.mu == 2 and cs.validate() == []


def test_shrink_round_trips():
    cs = ChainStore(2, 28)
    cs.write(1, 9)  # strong-left, its upper half parked in cell 2's lower
    cs.grow(adopted=(2 << 14) | 1)
    with pytest.raises(ValueError):
        cs.write(3, 4) or cs.shrink()  # last cell not at default
    cs.write(3, 0)
    cs.shrink()
    assert cs.N == 2
    assert [cs.read(1), cs.read(2)] == [9, 0]
    assert cs.validate() == []
    cs.write(2, 0)
    cs.write(1, 0)
    cs.shrink()
    assert cs.N == 1 and cs.read(1) == 0
    with pytest.raises(ValueError):
        cs.shrink()


def test_grow_shrink_interleaved_vs_plain():
    cs = ChainStore(1, 28, mode="loose")
    plain = PlainCells(1, cs.default)
    rng = random.Random(7)
    for _ in range(800):
        r = rng.random()
        if r < 0.25 and cs.N < 12:
            content = rng.choice([None, rng.getrandbits(28)])
            cs.grow(content=content, adopted=rng.getrandbits(28))
            plain.grow(content)
        elif r < 0.4 and cs.N > 1 and plain.vals[-1] == plain.default(cs.N):
            cs.shrink()
            plain.shrink()
        else:
            k = rng.randint(1, cs.N)
            x = rng.choice([0, 1, rng.getrandbits(28)])
            cs.write(k, x)
            plain.write(k, x)
        check_equiv(cs, plain)


def test_footprint_and_dump():
    cs = ChainStore(5, 32)
    assert cs.footprint_bits == 5 * 32 + 1
    words, flag = cs.dump_words()
    assert len(words) == -(-5 * 32 // 64) and flag == 1
    assert all(0 <= wd < (1 << 64) for wd in words)
    loose = ChainStore(5, 32, mode="loose")
    assert loose.footprint_bits == 5 * 32 + 64


def test_init_cost_independent_of_size():
    costs = []
    for N in (8, 4096):
        cs = ChainStore(N, 80)
        costs.append(cs.access_counts())
    assert costs[0] == costs[1]
    assert costs[0]["writes"] <= 2 and costs[0]["reads"] == 0


def test_ops_touch_constantly_many_cells():
    worst = {}
    for N in (16, 4096):
        cs = ChainStore(N, 80)
        rng = random.Random(3)
        peak = 0
        for _ in range(300):
            k = rng.randint(1, 16)
            cs.reset_access_counts()
            cs.write(k, rng.choice([0, 1, rng.getrandbits(80)]))
            c = cs.access_counts()
            peak = max(peak, c["reads"] + c["writes"])
        worst[N] = peak
    assert worst[16] <= 64 and worst[4096] <= 64


def test_argument_errors():
    cs = ChainStore(3, 28)
    with pytest.raises(IndexError):
        cs.read(0)
    with pytest.raises(IndexError):
        cs.write(4, 1)
    with pytest.raises(ValueError):
        cs.write(1, 1 << 28)
    with pytest.raises(ValueError):
        ChainStore(3, 8)  # strict needs room to hide mu
    with pytest.raises(ValueError):
        ChainStore(3, 27)
    with pytest.raises(CapacityError):
        ChainStore(1 << 40, 28, mode="loose")
    tiny = ChainStore(1, 4, mode="loose")
    with pytest.raises(CapacityError):
        tiny.grow()  # 1-bit mate field cannot address cell 2
    with pytest.raises(ValueError):
        ChainStore(2, 28, mode="fast")


@settings(deadline=None, max_examples=120)
@given(
    st.integers(1, 10),
    st.booleans(),
    st.lists(
        st.tuples(st.integers(1, 10), st.integers(0, (1 << 28) - 1)), max_size=40
    ),
    st.booleans(),
)
def test_random_programs_match_oracle(N, strict, prog, patterned):
    default = pattern_default if patterned else None
    cs = ChainStore(N, 40, default=default, mode="strict" if strict else "loose")
    plain = PlainCells(N, cs.default)
    for k, x in prog:
        k = 1 + (k - 1) % N
        cs.write(k, x)
        plain.write(k, x)
        check_equiv(cs, plain)
