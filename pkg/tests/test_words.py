import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from halo import words
from halo.numeric.contfrac import cf_expand
from halo.numeric.quadratic import QuadraticNumber
from oracles import brute_cutting_sequence, brute_word_from, rational_start

SQRT2 = QuadraticNumber.sqrt(2)
GOLDEN = (1 + QuadraticNumber.sqrt(5)) / 2
SQRT3 = QuadraticNumber.sqrt(3)


def close_rational(theta, k=40):
    cf = cf_expand(theta)
    return Fraction(cf.p(k), cf.q(k))


def test_rational_word_examples():
    w = words.rational_word(Fraction(5, 3), 1)
    assert w.blocks == (2, 2, 1) and w.letters() == "bbabbaba"
    assert words.rational_word(Fraction(2), 1).letters() == "bba"


def test_rational_word_preconditions():
    with pytest.raises(ValueError):
        words.rational_word(Fraction(3, 5), 1)
    with pytest.raises(ValueError):
        words.rational_word(Fraction(5, 3), 4)


@settings(max_examples=60)
@given(st.integers(1, 40), st.integers(1, 40), st.data())
def test_rational_word_matches_brute_force(q, extra, data):
    p = q + extra
    if math.gcd(p, q) != 1:
        return
    l1 = data.draw(st.integers(1, q))
    w = words.rational_word(Fraction(p, q), l1)
    assert w.letters() == brute_cutting_sequence(Fraction(p, q), rational_start(q, l1), q)
    assert w.letters().count("a") == q and w.letters().count("b") == p
    assert w.is_rotation_of(words.rational_word(Fraction(p, q), 1))


def test_rational_block_and_lazy_word():
    for p, q in [(7, 5), (17, 12), (99, 70), (13, 4)]:
        for l1 in (1, q):
            w = words.rational_word(Fraction(p, q), l1)
            assert tuple(words.rational_block(p, q, l1, j) for j in range(q)) == w.blocks
            lazy = words.CyclicBlockWord(p, q, l1, 2 * q, ((0, w.n + 1 if w.blocks[0] == w.n else w.n),))
            m = lazy.materialize()
            assert m.blocks[1:q] == w.blocks[1:] and m.blocks[q:] == w.blocks
            assert m.blocks[0] != w.blocks[0]


def test_cutting_sequence_examples():
    assert words.cutting_sequence(Fraction(2), Fraction(1, 4), 3) == "bba"
    pref = words.theta_prefix(SQRT2, 8)
    assert words.cutting_sequence(SQRT2, Fraction(1, 3), 50) == pref.letters()[:50]


@pytest.mark.parametrize("theta", [SQRT2, GOLDEN, SQRT3], ids=str)
def test_cutting_sequence_against_close_rational(theta):
    s = Fraction(1, 3)
    got = words.cutting_sequence(theta, s, 200)
    ref = brute_word_from(close_rational(theta), Fraction(0), s, Fraction(120))
    assert got == ref[:200]


def test_lattice_hit_reported():
    with pytest.raises(words.LatticeHit):
        words.cutting_sequence(Fraction(2), Fraction(0), 5)


def test_theta_prefix_examples():
    w2 = words.theta_prefix(SQRT2, 2)
    assert len(w2) == 5 and w2.blocks.count(1) == 3 and w2.blocks.count(2) == 2
    w3 = words.theta_prefix(SQRT2, 3)
    assert w3.blocks[:5] == w2.blocks


@pytest.mark.parametrize("theta", [SQRT2, GOLDEN + 1, SQRT3], ids=str)
def test_theta_prefix_is_a_convergent_word(theta):
    cf = cf_expand(theta)
    for k in range(2, 7):
        w = words.theta_prefix(theta, k)
        assert w.is_rotation_of(words.rational_word(Fraction(cf.p(k), cf.q(k)), 1))
        nxt = words.theta_prefix(theta, k + 2)
        assert nxt.blocks[: len(w)] == w.blocks


def test_admissibility_examples():
    assert not words.is_admissible([2, 2], SQRT2)
    assert words.is_admissible([1, 2, 1], SQRT2)
    assert not words.is_admissible("aA", SQRT2)
    res = words.is_admissible(words.theta_prefix(SQRT2, 4), SQRT2)
    assert res and res.interval[0] < res.witness < res.interval[1]


@settings(max_examples=40)
@given(st.lists(st.sampled_from([1, 2]), min_size=1, max_size=9))
def test_block_interval_oracle_agrees(blocks):
    theta = SQRT2
    fast = words.block_start_interval(blocks, theta) is not None
    slow = bool(words.is_admissible("a" + words.BlockWord(1, tuple(blocks)).letters(), theta))
    assert fast == slow


@settings(max_examples=40)
@given(st.text(alphabet="ab", min_size=1, max_size=14), st.data())
def test_admissible_closed_under_factors(w, data):
    if not words.is_admissible(w, GOLDEN):
        return
    i = data.draw(st.integers(0, len(w) - 1))
    j = data.draw(st.integers(i + 1, len(w)))
    assert words.is_admissible(w[i:j], GOLDEN)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_inadmissible_word(k):
    res = words.inadmissible_word(SQRT2, k)
    diff = [i for i, (a, b) in enumerate(zip(res.word.blocks, res.unflipped.blocks)) if a != b]
    assert diff == [res.flipped_index] == [len(res.word) - 1]
    assert words.is_admissible(res.unflipped, SQRT2)
    assert not words.is_admissible(res.letters, SQRT2)
    assert res.letters == "a" + res.word.letters()


def test_bare_flipped_word_parity():
    # without the leading a, the flipped word survives for even k only
    assert [words.inadmissible_word(SQRT2, k).bare_admissible for k in (2, 3, 4, 5)] == [True, False, True, False]


@pytest.mark.parametrize("k", [2, 3, 4, 6])
def test_leaf_segment_word(k):
    m = words.leaf_segment_word(SQRT2, k)
    cf = cf_expand(SQRT2)
    q = cf.q(k)
    assert len(m.word) == 2 * q - 1 and m.marker == q - 1 and m.verified
    ref = words.inadmissible_word(SQRT2, k)
    assert m.word.materialize().blocks[:q] == ref.word.blocks


def test_same_tail():
    a = "ab" * 700
    assert words.same_tail(a, "b" + a, 1000) == "same"
    assert words.same_tail(a, "ab" * 200 + "aab" * 400, 1000) == "different"
    assert words.same_tail("ab", "ab", 1000) == "inconclusive"


def test_factor_counts():
    assert words.count_factors(SQRT2, 1) == 2
    assert words.count_factors(SQRT2, 10) == 11
    ratios = [words.count_all_block_words(SQRT2, n) / words.count_factors(SQRT2, n) for n in (6, 12, 24)]
    assert ratios[0] < ratios[1] < ratios[2]


def test_reduce_word():
    assert words.reduce_word("abBA") == ""
    assert words.is_reduced("abab") and not words.is_reduced("aAb")
