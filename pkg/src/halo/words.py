"""Cutting sequences of straight lines on the square torus.

Letters: ``a`` for crossing the right side of the unit square, ``b`` for the
top side, and capitals ``A``/``B`` for their inverses. A leaf of slope
theta > 1 started on the left side reads b^{n_1} a b^{n_2} a ... with every
n_j in {n, n+1}, n = floor(theta); BlockWord stores the n_j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .numeric.contfrac import cf_expand
from .numeric.quadratic import QuadraticNumber, Real, exact_sign, format_exact

LETTERS = "aAbB"
INVERSE = {"a": "A", "A": "a", "b": "B", "B": "b"}


def reduce_word(w: str) -> str:
    out: list[str] = []
    for ch in w:
        if out and out[-1] == INVERSE[ch]:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def is_reduced(w: str) -> bool:
    return all(INVERSE[x] != y for x, y in zip(w, w[1:]))


@dataclass(frozen=True)
class BlockWord:
    """The word prod_j b^{n_j} a, or prod_j a^{n_j} b when ``swapped``."""

    n: int
    blocks: tuple[int, ...]
    swapped: bool = False

    def __post_init__(self) -> None:
        if any(b not in (self.n, self.n + 1) for b in self.blocks):
            raise ValueError(f"blocks must lie in {{{self.n}, {self.n + 1}}}")

    def letters(self) -> str:
        x, y = ("a", "b") if self.swapped else ("b", "a")
        return "".join(x * k + y for k in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def rotate(self, i: int) -> BlockWord:
        i %= max(1, len(self.blocks))
        return BlockWord(self.n, self.blocks[i:] + self.blocks[:i], self.swapped)

    def is_rotation_of(self, other: BlockWord) -> bool:
        if self.n != other.n or len(self) != len(other):
            return False
        doubled = other.blocks + other.blocks
        m = len(self.blocks)
        return any(doubled[i : i + m] == self.blocks for i in range(max(1, m)))

    def with_block(self, index: int, value: int) -> BlockWord:
        b = list(self.blocks)
        b[index] = value
        return BlockWord(self.n, tuple(b), self.swapped)

    def to_json(self) -> dict:
        return {"n": self.n, "blocks": list(self.blocks), "swapped": self.swapped}


@dataclass(frozen=True)
class SpEpTable:
    n: int
    s: int
    t: int
    sp: tuple[int, ...]
    ep: tuple[int, ...]


def sp_ep_table(p: int, q: int) -> SpEpTable:
    n = p // q
    s, t = (n + 1) * q - p, p - n * q
    sp = tuple(n + 1 if j <= t else n for j in range(1, q + 1))
    ep = tuple(n if j <= s else n + 1 for j in range(1, q + 1))
    return SpEpTable(n, s, t, sp, ep)


def rational_word(slope: Union[Fraction, int, str], l1: int = 1) -> BlockWord:
    """Block word of the closed leaf of slope p/q > 1 from its l1-th start
    point on the left side (l1 = 1 is the highest, l1 = q the lowest)."""
    slope = Fraction(slope)
    p, q = slope.numerator, slope.denominator
    if p <= q:
        raise ValueError("slope must exceed 1; invert it and swap a and b")
    if not 1 <= l1 <= q:
        raise ValueError(f"l1 must lie in 1..{q}")
    tab = sp_ep_table(p, q)
    blocks = []
    l = l1
    while True:
        blocks.append(tab.sp[l - 1])
        l = tab.s + l if l <= tab.t else l - tab.t
        if l == l1:
            break
    return BlockWord(tab.n, tuple(blocks))


def rational_block(p: int, q: int, l1: int, j: int) -> int:
    """Block j (from 0) of rational_word(p/q, l1) without building the word.

    The loop visits l1 + j*s (mod q), read in 1..q.
    """
    n = p // q
    s, t = (n + 1) * q - p, p - n * q
    l = (l1 - 1 + j * s) % q + 1
    return n + 1 if l <= t else n


@dataclass(frozen=True)
class CyclicBlockWord:
    """Lazy block word: ``length`` blocks of the cyclic p/q-word from l1,
    with individual blocks overridden by ``flips``. Used when q is too
    large to spell out."""

    p: int
    q: int
    l1: int
    length: int
    flips: tuple[tuple[int, int], ...] = ()

    @property
    def n(self) -> int:
        return self.p // self.q

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        for pos, val in self.flips:
            if pos == j:
                return val
        return rational_block(self.p, self.q, self.l1, j)

    def materialize(self, limit: int = 10**6) -> BlockWord:
        if self.length > limit:
            raise OverflowError(f"word has {self.length} blocks, limit {limit}")
        return BlockWord(self.n, tuple(self[j] for j in range(self.length)))

    def to_json(self) -> dict:
        return {"p": str(self.p), "q": str(self.q), "l1": str(self.l1),
                "length": str(self.length), "flips": [[str(a), b] for a, b in self.flips]}


# -- cutting sequences -------------------------------------------------------


@dataclass(frozen=True)
class StartHeight:
    """A start point at height ``value`` on the left side, or the one-sided
    limit value+0 (side=+1) / value-0 (side=-1)."""

    value: Real
    side: int = 0

    def __str__(self) -> str:
        tag = {1: "+", -1: "-", 0: ""}[self.side]
        return format_exact(self.value) + tag


ZERO_PLUS = StartHeight(Fraction(0), 1)
# default start height for irrational prefixes; any fixed generic height works
BASE_POINT = StartHeight(Fraction(1, 3), 0)
ONE_MINUS = StartHeight(Fraction(1), -1)


class LatticeHit(ValueError):
    def __init__(self, index: int) -> None:
        super().__init__(f"line passes through a lattice point at crossing {index}")
        self.index = index


def _as_start(s: Union[Real, StartHeight]) -> StartHeight:
    return s if isinstance(s, StartHeight) else StartHeight(s, 0)


def _floor_side(x: Real, side: int, index: int) -> int:
    m = math.floor(x)
    if x == m:
        if side == 0:
            raise LatticeHit(index)
        return m if side > 0 else m - 1
    return m


def mechanical_blocks(theta: Real, start: Union[Real, StartHeight], count: int) -> list[int]:
    """n_j = floor(s + j theta) - floor(s + (j-1) theta) for j = 1..count."""
    st = _as_start(start)
    prev = _floor_side(st.value, st.side, 0) if st.value != 0 or st.side else 0
    out = []
    for j in range(1, count + 1):
        cur = _floor_side(st.value + theta * j, st.side, j)
        out.append(cur - prev)
        prev = cur
    return out


def cutting_sequence(theta: Real, s: Union[Real, StartHeight], N: int) -> str:
    """First N letters of the line through (0, s) with slope theta."""
    if exact_sign(theta) <= 0:
        raise ValueError("slope must be positive")
    out: list[str] = []
    j = 0
    st = _as_start(s)
    prev = 0 if (st.value == 0 and st.side >= 0) else _floor_side(st.value, st.side, 0)
    while len(out) < N:
        j += 1
        cur = _floor_side(st.value + theta * j, st.side, j)
        out.extend("b" * (cur - prev))
        out.append("a")
        prev = cur
    return "".join(out[:N])


def blocks_of(letters: str) -> list[int]:
    """Split an a/b word into b-run lengths, one per trailing 'a'."""
    runs, k = [], 0
    for ch in letters:
        if ch == "b":
            k += 1
        elif ch == "a":
            runs.append(k)
            k = 0
        else:
            raise ValueError("only a and b expected")
    return runs


def theta_prefix(theta: Real, k: int, start: Union[Real, StartHeight] = BASE_POINT) -> BlockWord:
    """First q_k blocks of the theta-leaf from ``start``.

    Certifies exactly that no lattice point separates the theta-leaf from
    the p_k/q_k-leaf over those q_k blocks, so the result is a p_k/q_k-word.
    """
    if exact_sign(theta - 1) <= 0:
        raise ValueError("theta must exceed 1")
    if isinstance(theta, QuadraticNumber) and theta.is_rational or not isinstance(theta, QuadraticNumber):
        raise ValueError("theta must be irrational")
    if k < 2:
        raise ValueError("approximation too coarse: need k >= 2")
    cf = cf_expand(theta)
    p, q = cf.p(k), cf.q(k)
    r = Fraction(p, q)
    st = _as_start(start)
    # if the rational leaf itself hits a lattice point, read it from the side
    # the theta-leaf lies on
    rside = st.side or (1 if theta > r else -1)
    for i in range(1, q + 1):
        if _floor_side(st.value + theta * i, st.side, i) != _floor_side(st.value + r * i, rside, i):
            raise ValueError(f"approximation too coarse: lattice point between leaves at block {i}")
    n = math.floor(theta)
    return BlockWord(n, tuple(mechanical_blocks(theta, st, q)))


# -- admissibility -----------------------------------------------------------


@lru_cache(maxsize=256)
def _prefix_table(theta: Real, J: int) -> tuple[tuple[Real, Real, Real, str], ...]:
    """For each open interval of start heights on which the first J blocks
    are constant: (left, right, midpoint, letters)."""
    pts = {Fraction(0)}
    for j in range(1, J + 1):
        x = -theta * j
        x = x - math.floor(x)
        pts.add(x)
    cuts = sorted(pts) + [Fraction(1)]
    out = []
    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        word = "".join("b" * k + "a" for k in mechanical_blocks(theta, mid, J))
        out.append((lo, hi, mid, word))
    return tuple(out)


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    witness: Optional[Real] = None
    interval: Optional[tuple[Real, Real]] = None
    offset: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.admissible

    def to_json(self) -> dict:
        out = {"admissible": self.admissible, "reason": self.reason}
        if self.admissible:
            out["witness"] = format_exact(self.witness)
            out["interval"] = [format_exact(x) for x in self.interval]
            out["offset"] = self.offset
        return out


def _letters(w: Union[BlockWord, str, Sequence[int]], theta: Real) -> str:
    if isinstance(w, BlockWord):
        return w.letters()
    if isinstance(w, str):
        return w
    return BlockWord(math.floor(theta), tuple(w)).letters()


def is_admissible(w: Union[BlockWord, str, Sequence[int]], theta: Real) -> Admissibility:
    """Does w occur as a factor of some theta-word?

    Decided exactly: the first J blocks of the leaf from height s only change
    when s crosses a point -j*theta mod 1, so one midpoint per interval
    covers every leaf. J = (#a in w) + 1 blocks hold any occurrence of w.
    """
    if exact_sign(theta) <= 0:
        raise ValueError("slope must be positive")
    letters = _letters(w, theta)
    if any(ch in "AB" for ch in letters):
        return Admissibility(False, reason="negative letter")
    if any(ch not in "ab" for ch in letters):
        raise ValueError("unknown letter")
    if not letters:
        return Admissibility(True, Fraction(1, 2), (Fraction(0), Fraction(1)), 0)
    J = letters.count("a") + 1
    for lo, hi, mid, word in _prefix_table(theta, J):
        at = word.find(letters)
        if at >= 0:
            return Admissibility(True, mid, (lo, hi), at)
    return Admissibility(False, reason="no start height produces this factor")


def _exact_extreme(theta: Real, sums: np.ndarray, idx: np.ndarray, upper: bool) -> Real:
    best = None
    for j in idx.tolist():
        v = int(sums[j]) - theta * j + (1 if upper else 0)
        if best is None or (v < best if upper else v > best):
            best = v
    return best


def block_start_interval(blocks: Sequence[int], theta: Real) -> Optional[tuple[Real, Real]]:
    """Heights s in [0, 1) on the left side whose leaf starts with ``blocks``.

    That set is the intersection of [N_j - j*theta, N_j + 1 - j*theta) over
    the partial sums N_j, so it is an interval, possibly empty (None).
    Floats only shortlist the extreme terms; the winners are compared
    exactly. This is a second, independent oracle for words that begin at
    a block boundary, i.e. words of the form "a" + blocks.
    """
    m = len(blocks)
    sums = np.zeros(m + 1, dtype=object if m and max(blocks) > 2**40 else np.int64)
    sums[1:] = np.cumsum(np.asarray(blocks, dtype=np.int64))
    j = np.arange(m + 1, dtype=np.float64)
    tf = float(theta)
    v = sums.astype(np.float64) - j * tf
    tol = 1e-13 * (float(sums[-1]) + m * tf + 1.0)
    lo_idx = np.nonzero(v >= v.max() - tol)[0]
    hi_idx = np.nonzero(v + 1.0 <= v.min() + 1.0 + tol)[0]
    lo = _exact_extreme(theta, sums, lo_idx, upper=False)
    hi = _exact_extreme(theta, sums, hi_idx, upper=True)
    if exact_sign(hi - lo) <= 0:
        return None
    return lo, hi


@dataclass(frozen=True)
class InadmissibleWord:
    k: int
    word: BlockWord  # w'_k
    unflipped: BlockWord  # w_k
    flipped_index: int
    letters: str  # "a" + letters of w'_k, the form that is never admissible
    bare_admissible: bool  # whether w'_k without the leading a is admissible

    def to_json(self) -> dict:
        return {"k": self.k, "word": self.word.to_json(), "unflipped": self.unflipped.to_json(),
                "flipped_index": self.flipped_index, "letters": self.letters,
                "bare_admissible": self.bare_admissible}


def inadmissible_word(theta: Real, k: int) -> InadmissibleWord:
    """Flip the last block of the extreme-start p_k/q_k-word.

    Even k starts at the lowest point (l1 = q_k) and turns the final
    (n+1)-block into an n-block; odd k starts at the highest (l1 = 1) and
    turns the final n-block into an (n+1)-block. Both verdicts are checked
    with the exact oracle before returning.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if not isinstance(theta, QuadraticNumber) or theta.is_rational:
        raise ValueError("theta must be an exact irrational")
    cf = cf_expand(theta)
    p, q = cf.p(k), cf.q(k)
    n = math.floor(theta)
    wk = rational_word(Fraction(p, q), q if k % 2 == 0 else 1)
    last = len(wk) - 1
    new = n if k % 2 == 0 else n + 1
    if wk.blocks[last] == new:
        raise ArithmeticError("extreme-start word does not end with the expected block")
    flipped = wk.with_block(last, new)
    if not is_admissible(wk, theta):
        raise ArithmeticError("unflipped word rejected by the oracle")
    prefixed = "a" + flipped.letters()
    if is_admissible(prefixed, theta):
        raise ArithmeticError("flipped word accepted by the oracle")
    return InadmissibleWord(k, flipped, wk, last, prefixed, bool(is_admissible(flipped, theta)))


# -- tails -------------------------------------------------------------------


def same_tail(w1: Union[str, Sequence[str]], w2: Union[str, Sequence[str]], horizon: int) -> str:
    """Compare tails at a finite horizon.

    The window is positions [horizon/2, horizon) of w1; w2 may be shifted by
    up to horizon/4. "same" if some shift matches the whole window,
    "different" otherwise, "inconclusive" if either word is too short.
    """
    slack = horizon // 4
    if len(w1) < horizon or len(w2) < horizon + slack:
        return "inconclusive"
    lo = horizon // 2
    window = w1[lo:horizon]
    for d in range(-slack, slack + 1):
        if w2[lo + d : horizon + d] == window:
            return "same"
    return "different"


# -- complexity counts ---------------------------------------------------------


def factors(theta: Real, n: int) -> set[str]:
    """All admissible a/b words of length n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out: set[str] = set()
    for _, _, _, word in _prefix_table(theta, n + 1):
        for i in range(len(word) - n + 1):
            out.add(word[i : i + n])
    return out


def count_factors(theta: Real, n: int) -> int:
    return len(factors(theta, n))


def first_return_blocks(theta: Real) -> list[str]:
    """Single blocks b^m a that occur in theta-words."""
    n = math.floor(theta)
    return [("b" * m + "a") for m in (n, n + 1) if m >= 0 and is_admissible("b" * m + "a", theta)]


def count_all_block_words(theta: Real, n: int) -> int:
    """Number of words of at most n letters built freely from the admissible
    first-return blocks (the empty word included)."""
    sizes = [len(b) for b in first_return_blocks(theta)]
    ways = [0] * (n + 1)
    ways[0] = 1
    for L in range(1, n + 1):
        ways[L] = sum(ways[L - s] for s in sizes if s <= L)
    return sum(ways)


# -- marked segment words ------------------------------------------------------


@dataclass(frozen=True)
class MarkedWord:
    """Block word of one leaf-approximation segment with the position of
    its flipped block. ``verified`` is None when q_k was too large for the
    exact check."""

    k: int
    word: CyclicBlockWord
    marker: int
    verified: Optional[bool]

    def to_json(self) -> dict:
        return {"k": self.k, "word": self.word.to_json(), "marker": str(self.marker),
                "verified": self.verified}


def leaf_segment_word(theta: Real, k: int, verify_limit: int = 200_000) -> MarkedWord:
    """w'_k followed by the first q_k - 1 blocks of w_k: 2 q_k - 1 blocks,
    matching the horizontal extent of the leaf run. The marker is the flipped
    last block of w'_k.

    For q_k <= verify_limit both verdicts are checked with
    block_start_interval: "a" + w'_k has no start height, w_k has one.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    cf = cf_expand(theta)
    p, q = cf.p(k), cf.q(k)
    n = math.floor(theta)
    l1 = q if k % 2 == 0 else 1
    new = n if k % 2 == 0 else n + 1
    if rational_block(p, q, l1, q - 1) == new:
        raise ArithmeticError("extreme-start word does not end with the expected block")
    word = CyclicBlockWord(p, q, l1, 2 * q - 1, ((q - 1, new),))
    verified: Optional[bool] = None
    if q <= verify_limit:
        plain = [rational_block(p, q, l1, j) for j in range(q)]
        flipped = plain[:-1] + [new]
        verified = (block_start_interval(flipped, theta) is None
                    and block_start_interval(plain, theta) is not None)
        if not verified:
            raise ArithmeticError(f"segment word at k={k} failed the admissibility check")
    return MarkedWord(k, word, q - 1, verified)
