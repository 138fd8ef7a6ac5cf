"""Flat-torus model of a measured lamination by parallel lines.

Coordinates are exact (int, Fraction or QuadraticNumber) wherever the
construction allows it; the random-direction sweep and the sublinear ray
use floats and say so in their reports.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from . import kernels
from .numeric.contfrac import ContinuedFraction, SignedMagnitude, cf_expand, cylinder_interval, log_ratio
from .numeric.logmag import LogMagnitude, as_logmag
from .numeric.quadratic import QuadraticNumber, Real, exact_sign, format_exact
from .words import MarkedWord, leaf_segment_word

Num = Union[Real, float]


def _abs(x: Num) -> Num:
    if isinstance(x, float):
        return abs(x)
    return -x if exact_sign(x) < 0 else x


def _fmt(x: Num) -> str:
    return repr(x) if isinstance(x, float) else format_exact(x)


@dataclass(frozen=True)
class FlatPoint:
    x: Num
    y: Num

    def __add__(self, v: tuple[Num, Num]) -> FlatPoint:
        return FlatPoint(self.x + v[0], self.y + v[1])

    def __sub__(self, other: FlatPoint) -> tuple[Num, Num]:
        return (self.x - other.x, self.y - other.y)

    def reduced(self) -> FlatPoint:
        """The same point of the torus with coordinates in [0, 1)."""
        return FlatPoint(self.x - math.floor(self.x), self.y - math.floor(self.y))

    def to_json(self) -> list[str]:
        return [_fmt(self.x), _fmt(self.y)]


@dataclass(frozen=True)
class Foliation:
    """Lines of slope theta; transverse measure scaled by kappa."""

    theta: Num
    kappa: Num = 1

    def __post_init__(self) -> None:
        if exact_sign(self.theta) <= 0 if not isinstance(self.theta, float) else self.theta <= 0:
            raise ValueError("theta must be positive")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")

    @property
    def scale_sq(self) -> Num:
        """(1 + theta^2): the measure is kappa * raw / sqrt(scale_sq)."""
        return 1 + self.theta * self.theta

    @property
    def scale(self) -> float:
        return math.sqrt(float(self.scale_sq))


@dataclass(frozen=True)
class Measure:
    """kappa * raw / sqrt(1 + theta^2) with raw = |dy - theta dx| kept exact."""

    raw: Num
    fol: Foliation

    def __float__(self) -> float:
        return float(self.fol.kappa) * float(self.raw) / self.fol.scale

    def __add__(self, other: Measure) -> Measure:
        if other.fol != self.fol:
            raise ValueError("measures against different foliations")
        return Measure(self.raw + other.raw, self.fol)

    def compare(self, bound: Num) -> int:
        """Sign of (self - bound) for bound >= 0, exact when inputs are."""
        lhs = self.fol.kappa * self.raw
        lhs = lhs * lhs
        rhs = bound * bound * self.fol.scale_sq
        d = lhs - rhs
        if isinstance(d, float):
            return (d > 0) - (d < 0)
        return exact_sign(d)

    def less_than(self, bound: Num) -> bool:
        return self.compare(bound) < 0

    def is_zero(self) -> bool:
        return self.raw == 0


class SegmentKind:
    LEAF = "leaf"
    TRANSVERSAL = "transversal"
    GENERIC = "generic"


@dataclass(frozen=True)
class Segment:
    start: FlatPoint
    end: FlatPoint
    kind: str = SegmentKind.GENERIC
    theta: Optional[Num] = None  # required for leaf-kind segments

    def __post_init__(self) -> None:
        if self.kind == SegmentKind.LEAF:
            dx, dy = self.delta
            if self.theta is None or dy - self.theta * dx != 0:
                raise ValueError("leaf segment does not follow the foliation")

    @property
    def delta(self) -> tuple[Num, Num]:
        return self.end - self.start

    @property
    def length(self) -> float:
        dx, dy = self.delta
        return math.hypot(float(dx), float(dy))

    def to_json(self) -> dict:
        return {"start": self.start.to_json(), "end": self.end.to_json(), "kind": self.kind}


def transverse_measure(seg: Segment, fol: Foliation) -> Measure:
    dx, dy = seg.delta
    return Measure(_abs(dy - fol.theta * dx), fol)


@dataclass
class PolygonalRay:
    segments: list[Segment]
    fol: Foliation
    lengths: list[float] = field(default_factory=list)  # cumulative, from 0
    measures: list[Num] = field(default_factory=list)  # cumulative raw measure

    def __post_init__(self) -> None:
        for a, b in zip(self.segments, self.segments[1:]):
            if a.end != b.start:
                raise ValueError("consecutive segments must share an endpoint")
        L, M = 0.0, 0
        self.lengths, self.measures = [0.0], [0]
        for s in self.segments:
            L += s.length
            M = M + transverse_measure(s, self.fol).raw
            self.lengths.append(L)
            self.measures.append(M)

    @property
    def length(self) -> float:
        return self.lengths[-1]

    def total_measure(self) -> Measure:
        return Measure(self.measures[-1], self.fol)

    def crossings(self) -> int:
        """Number of segments that pick up positive measure."""
        return sum(1 for a, b in zip(self.measures, self.measures[1:]) if b != a)

    def measure_at(self, t: float) -> float:
        """I(t): measure of the initial piece of length t (float)."""
        if t <= 0:
            return 0.0
        i = bisect.bisect_right(self.lengths, t) - 1
        if i >= len(self.segments):
            return float(Measure(self.measures[-1], self.fol))
        done = float(Measure(self.measures[i], self.fol))
        seg = self.segments[i]
        if seg.length == 0:
            return done
        frac = (t - self.lengths[i]) / seg.length
        return done + frac * float(transverse_measure(seg, self.fol))

    def to_json(self) -> list[dict]:
        return [s.to_json() for s in self.segments]


def straight_ray(phi: float, T: float, fol: Foliation, origin: FlatPoint = FlatPoint(0.0, 0.0)) -> PolygonalRay:
    """One segment of length T in direction phi (float coordinates)."""
    end = origin + (T * math.cos(phi), T * math.sin(phi))
    return PolygonalRay([Segment(origin, end)], fol)


# -- growth series -------------------------------------------------------------


@dataclass
class GrowthSeries:
    samples: list[tuple[float, float]]
    lipschitz: float  # I(t) <= lipschitz * t on every sample
    certified: bool

    def to_csv(self) -> str:
        return "t,I\n" + "".join(f"{t!r},{v!r}\n" for t, v in self.samples)


def growth_series(ray: PolygonalRay, fol: Foliation, T: float, grid: int = 100) -> GrowthSeries:
    if ray.length < T * (1 - 1e-12):
        raise ValueError("ray is shorter than T")
    if fol != ray.fol:
        ray = PolygonalRay(ray.segments, fol)
    rates = [float(transverse_measure(s, fol)) / s.length for s in ray.segments if s.length > 0]
    c = max(rates, default=0.0)
    ts = {t for t in ray.lengths if 0 < t <= T}
    ts.update(T * i / grid for i in range(1, grid + 1))
    samples = [(t, ray.measure_at(t)) for t in sorted(ts)]
    ok = all(v <= c * t * (1 + 1e-12) + 1e-300 for t, v in samples)
    ok = ok and all(b[1] >= a[1] for a, b in zip(samples, samples[1:]))
    return GrowthSeries(samples, c, ok)


@dataclass
class SweepResult:
    n_rays: int
    mean_rate: float
    target: float
    rates: np.ndarray

    @property
    def relative_error(self) -> float:
        return abs(self.mean_rate - self.target) / self.target


def ray_directions(n: int, seed: int = 0) -> np.ndarray:
    """Direction of ray i depends only on (seed, i)."""
    return np.array([np.random.default_rng([seed, i]).uniform(0.0, 2 * math.pi) for i in range(n)])


def crossing_rate_sweep(n: int, fol: Foliation, seed: int = 0, t: float = 1.0) -> SweepResult:
    """Mean of I(t)/t over n straight rays in random directions.

    For uniform directions the mean tends to kappa * 2/pi whatever theta is.
    """
    phis = ray_directions(n, seed)
    rates = kernels.crossing_rates(phis, float(fol.theta), float(fol.kappa), float(t))
    return SweepResult(n, float(rates.mean()), 2 * float(fol.kappa) / math.pi, rates)


# -- leaf approximations ---------------------------------------------------------


def _approx_error(theta: Real, p: int, q: int) -> Real:
    return _abs(q * theta - p)


def _length(run: Union[int, LogMagnitude], scale: float) -> Union[float, LogMagnitude]:
    if isinstance(run, int) and run.bit_length() < 1000:
        return run * scale
    return as_logmag(run) * scale


@dataclass
class LeafApprox:
    """Leaf run of 2q_k - 1 columns closed up by a short segment.

    ``alpha`` is the exact closing measure (None when theta is only known
    through its continued fraction, in which case ``alpha_upper`` bounds it).
    """

    k: int
    p: Union[int, LogMagnitude]
    q: Union[int, LogMagnitude]
    q_next: Union[int, LogMagnitude]
    run: Union[int, LogMagnitude]  # horizontal extent of the leaf run
    d: Union[float, LogMagnitude]  # leaf length
    c: float  # c*q_k <= d
    C: float  # d <= C*q_k
    alpha: Optional[Measure]
    alpha_upper: Optional[Real]  # 2 kappa q_k |theta - p_k/q_k| or 2 kappa / q_{k+1}
    epsilon: Optional[float]  # Euclidean separation alpha / kappa, if it fits a float
    word: Optional[MarkedWord]
    cf: ContinuedFraction
    kappa: Num
    scale_hi: float  # upper bound on sqrt(1 + theta^2)

    @property
    def exact(self) -> bool:
        return self.alpha is not None

    def to_json(self) -> dict:
        def num(x):
            if isinstance(x, LogMagnitude):
                return {"exact": False, **x.to_json()}
            if isinstance(x, float):
                return {"exact": False, "value": x}
            return {"exact": True, "value": format_exact(x) if not isinstance(x, int) else str(x)}

        return {
            "k": self.k, "p": num(self.p), "q": num(self.q), "q_next": num(self.q_next),
            "run": num(self.run), "d": num(self.d), "c": self.c, "C": self.C,
            "alpha": num(self.alpha.raw * self.kappa) | {"scaled_by": "1/sqrt(1+theta^2)"}
            if self.alpha is not None else None,
            "alpha_upper": num(self.alpha_upper) if self.alpha_upper is not None else None,
            "epsilon": self.epsilon,
            "word": self.word.to_json() if self.word else None,
        }


def realizable(theta: Real, cf: ContinuedFraction, k: int) -> bool:
    """2 q_k |theta - p_k/q_k| < 1/q_k, i.e. 2 q_k |q_k theta - p_k| < 1."""
    p, q = cf.p(k), cf.q(k)
    return exact_sign(2 * q * _approx_error(theta, p, q) - 1) < 0


def build_leaf_approx(theta: Real, k: int, kappa: Num = 1, verify_limit: int = 200_000,
                      with_word: bool = True) -> LeafApprox:
    if not isinstance(theta, QuadraticNumber) or theta.is_rational:
        raise ValueError("theta must be an exact irrational")
    if exact_sign(theta - 1) <= 0:
        raise ValueError("theta must exceed 1")
    cf = cf_expand(theta)
    p, q, q1 = cf.p(k), cf.q(k), cf.q(k + 1)
    if not realizable(theta, cf, k):
        raise ValueError(f"convergent too coarse, increase k (k={k})")
    fol = Foliation(theta, kappa)
    raw = 2 * _approx_error(theta, p, q)
    alpha = Measure(raw, fol)
    bound = kappa * raw  # 2 kappa q_k |theta - p_k/q_k|
    if alpha.compare(bound) > 0:
        raise ArithmeticError("closing measure exceeds its bound")
    if exact_sign(bound * q1 - 2 * kappa) >= 0:
        raise ArithmeticError(f"closing measure bound not below 2 kappa / q_(k+1) at k={k}")
    s = fol.scale
    run = 2 * q - 1
    eps = float(alpha) / float(kappa)
    word = leaf_segment_word(theta, k, verify_limit) if with_word and k >= 2 else None
    return LeafApprox(k, p, q, q1, run, _length(run, s), s, 2 * s, alpha, bound,
                      eps if eps > 0 else None, word, cf, kappa, math.nextafter(s, math.inf))


def leaf_approx_from_cf(cf: ContinuedFraction, k: int, kappa: Num = 1) -> LeafApprox:
    """Leaf approximation for a number known only by its digits.

    |q_k theta - p_k| < 1/q_{k+1} bounds the closing measure by 2 kappa/q_{k+1};
    the slope enters only through an enclosure of sqrt(1 + theta^2).
    """
    t = max(1, min(k, cf.exact_upto()))
    lo, hi = cylinder_interval(cf, t)
    if lo <= 1:
        raise ValueError("theta must exceed 1")
    s_lo = math.nextafter(math.sqrt(1 + float(lo) ** 2), 0.0)
    s_hi = math.nextafter(math.sqrt(1 + float(hi) ** 2), math.inf)
    p, q, q1 = cf.p(k), cf.q(k), cf.q(k + 1)
    run = 2 * q - 1 if isinstance(q, int) else as_logmag(q) * 2
    upper = Fraction(2 * kappa, q1) if isinstance(q1, int) else None
    d = _length(run, s_hi)
    return LeafApprox(k, p, q, q1, run, d, s_lo, 2 * s_hi, None, upper, None, None, cf, kappa, s_hi)


# -- CESAG classification --------------------------------------------------------


@dataclass(frozen=True)
class GrowthRule:
    """Named function of the leaf length d: exp:C, power:a, or linear."""

    name: str
    kind: str
    param: float

    def ln(self, d: float) -> float:
        if self.kind == "exp":
            return self.param * d
        if self.kind == "power":
            return self.param * math.log(d)
        raise ValueError(self.name)


def growth_rule(name: str) -> GrowthRule:
    if name.startswith("exp:"):
        return GrowthRule(name, "exp", float(name[4:]))
    if name.startswith("power:"):
        return GrowthRule(name, "power", float(name[6:]))
    if name == "linear":
        return GrowthRule(name, "power", 1.0)
    raise ValueError(f"unknown growth rule {name!r}")


@dataclass
class CesagReport:
    n: int
    f: str
    g: str
    ln_separation: Optional[tuple[float, float]]  # (ln c, ln C) of eps e^d / f(d)
    good_constant: Optional[float]  # sup alpha_j / g(d_j)
    ln_fg: list[Optional[SignedMagnitude]]
    fg_to_zero: Optional[bool]
    exotic_markers: bool
    verdict: str  # "CESAG", "not CESAG" or "inconclusive"

    def to_json(self) -> dict:
        return {
            "n": self.n, "f": self.f, "g": self.g,
            "ln_separation": list(self.ln_separation) if self.ln_separation else None,
            "good_constant": self.good_constant,
            "ln_fg": [x.to_json() if x else None for x in self.ln_fg],
            "fg_to_zero": self.fg_to_zero, "exotic_markers": self.exotic_markers,
            "verdict": self.verdict,
        }


_FG_THRESHOLD = 20.0  # "tends to 0" needs f g < e^-20 at the end of the sample


def _ln_fg(a: LeafApprox, f: GrowthRule, g: str) -> Optional[SignedMagnitude]:
    """ln(f(d) g(d)) for g = alpha-bound, i.e. g(d_j) = 2 kappa / q_{k+1}."""
    ln2k = math.log(2 * float(a.kappa))
    if f.kind == "exp":
        # C d + ln 2k - ln q_{k+1} <= ln(exp(2 C s q_k) / q_{k+1}) + ln 2k
        r = log_ratio(a.cf, 2 * f.param * a.scale_hi, a.k)
        if r is None:
            return None
        if r.magnitude.level == 0:
            v = r.sign * r.magnitude.hi + ln2k
            return SignedMagnitude(1 if v > 0 else -1, LogMagnitude.from_float(abs(v), 1e-12 * abs(v)))
        return r  # ln 2k is far below one ulp of the magnitude
    if isinstance(a.d, float):
        v = f.ln(a.d) + ln2k - as_logmag(a.q_next).log().hi
        return SignedMagnitude(1 if v > 0 else -1, LogMagnitude.from_float(abs(v)))
    return None


def classify_cesag(seq: Sequence[LeafApprox], f: str = "exp:1", g: str = "alpha-bound") -> CesagReport:
    if not seq:
        raise ValueError("empty sequence")
    if g != "alpha-bound":
        raise ValueError("only g = alpha-bound is supported")
    rule = growth_rule(f)
    lnfg = [_ln_fg(a, rule, g) for a in seq]
    # separation constants only when everything fits a float
    seps = []
    for a in seq:
        if a.epsilon is None or not isinstance(a.d, float):
            seps = None
            break
        seps.append(math.log(a.epsilon) + a.d - rule.ln(a.d))
    sep = (min(seps), max(seps)) if seps else None
    good = 1.0  # alpha_j <= 2 kappa / q_{k+1} is checked when each approximation is built
    markers = all(a.word is not None or not a.exact for a in seq)
    if len(seq) < 2:
        return CesagReport(1, f, g, sep, good, lnfg, None, markers, "inconclusive")
    tail = lnfg[-3:]
    if any(x is None for x in tail):
        to_zero = None
    else:
        falling = all(b.less_than(a) for a, b in zip(tail, tail[1:]))
        deep = tail[-1].sign < 0 and tail[-1].magnitude.compare(_FG_THRESHOLD) > 0
        to_zero = falling and deep
    if to_zero is None:
        verdict = "inconclusive"
    else:
        verdict = "CESAG" if to_zero and markers else "not CESAG"
    return CesagReport(len(seq), f, g, sep, good, lnfg, to_zero, markers, verdict)


# -- exotic rays -----------------------------------------------------------------


@dataclass
class ExoticRay:
    """Concatenation of leaf approximations with geometrically thinning
    closing measures. ``labels`` are the indices n the caller asked for."""

    theta: Real
    fol: Foliation
    labels: list[int]
    pieces: list[LeafApprox]
    total_raw: Real
    start: FlatPoint

    @property
    def total_measure(self) -> Measure:
        return Measure(self.total_raw, self.fol)

    def measure_bound(self) -> Fraction:
        return 2 * sum((Fraction(1, 2**n) for n in self.labels), Fraction(0))

    def crossings(self) -> int:
        return sum(1 for a in self.pieces if not a.alpha.is_zero())

    def block_offsets(self) -> list[int]:
        out, pos = [], 0
        for a in self.pieces:
            out.append(pos)
            pos += a.run
        return out

    def markers(self) -> list[int]:
        """Global block positions of the flipped (inadmissible) blocks."""
        return [off + a.word.marker for off, a in zip(self.block_offsets(), self.pieces) if a.word]

    def tail_windows_marked(self, after: int = 0) -> bool:
        """Every tail starting at a segment boundary beyond segment ``after``
        contains a marked block, checked over the assembled segments."""
        offs, marks = self.block_offsets(), self.markers()
        return all(any(m >= off for m in marks) for off in offs[after:])

    def code(self) -> list[int]:
        return list(self.labels)

    def polygon(self) -> PolygonalRay:
        """Exact segments: leaf run, then the short closing segment."""
        segs, P = [], self.start
        for a in self.pieces:
            Q = P + (a.run, self.theta * a.run)
            segs.append(Segment(P, Q, SegmentKind.LEAF, self.theta))
            R = P + (2 * a.q, 2 * a.p)
            segs.append(Segment(Q, R, SegmentKind.GENERIC))
            P = R
        if not segs:
            # empty index set: a single leaf segment
            segs.append(Segment(P, P + (1, self.theta), SegmentKind.LEAF, self.theta))
        return PolygonalRay(segs, self.fol)


def assemble_exotic_ray(theta: Real, indices: Iterable[int], N: Optional[int] = None,
                        kappa: Num = 1, start: FlatPoint = FlatPoint(0, Fraction(1, 3)),
                        verify_limit: int = 200_000, max_search: int = 100_000) -> ExoticRay:
    """For each index n pick the first convergent k past the previous one
    whose closing measure is below 2^-n and below a quarter of the previous
    one; the quarter makes every measure exceed three times the sum of all
    later ones."""
    if not isinstance(theta, QuadraticNumber) or theta.is_rational:
        raise ValueError("theta must be an exact irrational")
    fol = Foliation(theta, kappa)
    cf = cf_expand(theta)
    labels, pieces = [], []
    prev_k, prev_raw = 1, None
    total = 0
    last_n = None
    for i, n in enumerate(indices):
        if N is not None and i >= N:
            break
        if last_n is not None and n <= last_n:
            raise ValueError("indices must increase")
        last_n = n
        bound = Fraction(1, 2**n)
        k = prev_k + 1
        while True:
            if k - prev_k > max_search:
                raise ValueError(f"no convergent meets the measure bound for index {n}")
            if realizable(theta, cf, k):
                raw = 2 * _approx_error(theta, cf.p(k), cf.q(k))
                if Measure(raw, fol).less_than(bound) and (prev_raw is None or exact_sign(prev_raw - 4 * raw) > 0):
                    break
            k += 1
        a = build_leaf_approx(theta, k, kappa, verify_limit)
        if not a.alpha.less_than(bound):
            raise ArithmeticError(f"measure bound fails for index {n}")
        labels.append(n)
        pieces.append(a)
        total = total + a.alpha.raw
        prev_k, prev_raw = k, a.alpha.raw
    ray = ExoticRay(theta, fol, labels, pieces, total, start)
    # thinning: measure of each piece exceeds three times everything after it
    rest = 0
    for a in reversed(pieces):
        if rest != 0 and exact_sign(a.alpha.raw - 3 * rest) <= 0:
            raise ArithmeticError(f"thinning fails at k={a.k}")
        rest = rest + a.alpha.raw
    if not ray.total_measure.less_than(ray.measure_bound()) and labels:
        raise ArithmeticError("total measure exceeds 2 * sum 2^-n")
    return ray


# -- sublinear growth ------------------------------------------------------------


@dataclass(frozen=True)
class SublinearRule:
    name: str
    f: Callable[[float], float]
    inverse: Optional[Callable[[float], float]]
    sublinear: bool


def sublinear_rule(name: str) -> SublinearRule:
    if name == "sqrt":
        return SublinearRule(name, math.sqrt, lambda n: n * n, True)
    if name == "log1p":
        return SublinearRule(name, math.log1p, math.expm1, True)
    if name == "linear":
        return SublinearRule(name, lambda t: t, lambda n: n, False)
    if name.startswith("power:"):
        a = float(name[6:])
        return SublinearRule(name, lambda t, a=a: t**a, lambda n, a=a: n ** (1 / a), 0 < a < 1)
    raise ValueError(f"unknown rule {name!r}")


def _invert(f: Callable[[float], float], n: float, T: float) -> float:
    lo, hi = 0.0, T
    if f(hi) < n:
        return math.inf
    for _ in range(200):
        mid = (lo + hi) / 2
        if f(mid) < n:
            lo = mid
        else:
            hi = mid
    return hi


def _looks_sublinear(f: Callable[[float], float], T: float) -> bool:
    ts = np.geomspace(1.0, T, 64)
    r = [f(t) / t for t in ts]
    return all(b < a for a, b in zip(r, r[1:])) and r[-1] < 0.5 * r[0]


@dataclass
class SublinearRay:
    rule: str
    ray: PolygonalRay
    d: list[float]  # leaf run lengths
    jump_times: list[float]  # ray length at which jump n has been completed
    bounds: tuple[float, float]  # a, b with a f(t) <= I(t) <= b f(t) on [t0, T]
    t0: float
    T: float

    def crossing_count(self, t: float) -> int:
        return bisect.bisect_right(self.jump_times, t)


def sublinear_ray(f: Union[str, SublinearRule], T: float, theta: float = (1 + math.sqrt(5)) / 2,
                  kappa: float = 1.0, t0: float = 100.0) -> SublinearRay:
    """Leaf runs of length d_n with f(d_1 + ... + d_n) = n, each followed by
    a perpendicular jump of measure exactly 1."""
    rule = sublinear_rule(f) if isinstance(f, str) else f
    if not rule.sublinear or not _looks_sublinear(rule.f, T):
        raise ValueError(f"{rule.name} is not sublinear on [0, {T}]")
    fol = Foliation(float(theta), float(kappa))
    s = fol.scale
    leaf = (1.0 / s, theta / s)
    jump = (-theta / (s * kappa), 1.0 / (s * kappa))
    jump_len = 1.0 / kappa
    segs, d, times = [], [], []
    P = FlatPoint(0.0, 0.0)
    D_prev, n, L = 0.0, 0, 0.0
    while L <= T:
        n += 1
        D = rule.inverse(n) if rule.inverse else _invert(rule.f, n, 10 * T)
        dn = D - D_prev
        D_prev = D
        Q = P + (leaf[0] * dn, leaf[1] * dn)
        R = Q + jump
        segs += [Segment(P, Q, SegmentKind.GENERIC), Segment(Q, R, SegmentKind.TRANSVERSAL)]
        d.append(dn)
        L += dn + jump_len
        times.append(L)
        P = R
    ray = PolygonalRay(segs, fol)
    # I is a step function (up to the short jumps): the ratio I/f is
    # extremal just before and just after each jump
    pts = [t0, T] + [t for t in times if t0 <= t <= T]
    pts += [t - jump_len for t in times if t0 <= t - jump_len <= T]
    ratios = []
    for t in pts:
        for u in (t, math.nextafter(t, 0.0)):
            if t0 <= u <= T:
                ratios.append(ray.measure_at(u) / rule.f(u))
    return SublinearRay(rule.name, ray, d, times, (min(ratios), max(ratios)), t0, T)
