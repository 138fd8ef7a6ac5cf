"""Continued fractions: exact expansion, convergents, and digit schedules
that grow too fast for integers."""

from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

import mpmath

from .logmag import LogMagnitude, as_logmag
from .quadratic import QuadraticNumber, Real, exact_sign

Digit = Union[int, LogMagnitude]

# exponents up to this size still get an exact ceil(exp(.)) digit
EXACT_EXPONENT_LIMIT = 4000


@dataclass(frozen=True)
class DigitRule:
    """c_k = ceil(exp(q_{k-1} ** power)), or c_k = func(q_{k-1}) if func is set."""

    name: str
    power: float = 2.0
    func: Optional[Callable[[int], int]] = None

    def describe(self) -> str:
        if self.func is not None:
            return f"{self.name}: custom"
        return f"{self.name}: ceil(exp(q**{self.power:g}))"


SQUARE_RULE = DigitRule("square", 2.0)
DESK_RULE = DigitRule("desk", 1.0)


def rule_by_name(name: str) -> DigitRule:
    name = name.lower()
    if name in ("square", "paper"):  # "paper" is the command-line name
        return SQUARE_RULE
    if name == "desk":
        return DESK_RULE
    if name.startswith("power:"):
        return DigitRule(name, float(name.split(":", 1)[1]))
    if name.startswith("const:"):
        c = int(name.split(":", 1)[1])
        return DigitRule(name, 0.0, func=lambda q, c=c: c)
    raise ValueError(f"unknown digit rule {name!r}")


def ceil_exp(y: Union[int, float]) -> int:
    """Exact ceil(e**y) for a non-negative exponent."""
    if y == 0:
        return 1
    bits = int(float(y) * 1.4427) + 96
    while True:
        with mpmath.workprec(bits):
            v = mpmath.exp(mpmath.mpf(y))
            f = mpmath.floor(v)
            frac = v - f
            if mpmath.mpf(2) ** -40 < frac < 1 - mpmath.mpf(2) ** -40:
                return int(f) + 1
        bits *= 2
        if bits > 1 << 22:
            raise ArithmeticError("exp(y) too close to an integer")


class ContinuedFraction:
    """A lazily evaluated digit stream c_0; c_1, c_2, ... with memoized
    convergents.

    Digits come from a fixed prefix, then either a repeating period (quadratic
    irrationals) or a DigitRule driven by the previous denominator. Once a
    digit is too large for an exact integer it is carried as a LogMagnitude,
    and so are all later p_k, q_k.
    """

    def __init__(
        self,
        prefix: Sequence[int],
        *,
        period: Sequence[int] = (),
        rule: Optional[DigitRule] = None,
        value: Optional[Real] = None,
    ) -> None:
        if not prefix and not period:
            raise ValueError("need at least c_0")
        head = list(prefix) + list(period)
        if head[0] < 0 or any(c < 1 for c in head[1:]):
            raise ValueError("digits must be positive (c_0 >= 0)")
        if period and rule is not None:
            raise ValueError("a stream is either periodic or rule-driven")
        self._prefix = [int(c) for c in prefix]
        self._period = [int(c) for c in period]
        self.rule = rule
        self.value = value
        self._digits: list[Digit] = []
        self._rule_power: list[Optional[float]] = []
        self._p: list[Union[int, LogMagnitude]] = []
        self._q: list[Union[int, LogMagnitude]] = []
        self._lock = threading.RLock()

    # -- structure --------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return not self._period and self.rule is None

    @property
    def periodic_from(self) -> Optional[int]:
        return len(self._prefix) if self._period else None

    @property
    def period(self) -> tuple[int, ...]:
        return tuple(self._period)

    @property
    def log_domain(self) -> bool:
        return self.rule is not None

    def __len__(self) -> int:
        if not self.is_finite:
            raise TypeError("infinite continued fraction")
        return len(self._prefix)

    def available(self, k: int) -> bool:
        return not self.is_finite or k < len(self._prefix)

    # -- lazy extension ---------------------------------------------------

    def _next_digit(self, i: int) -> tuple[Digit, Optional[float]]:
        if i < len(self._prefix):
            return self._prefix[i], None
        if self._period:
            return self._period[(i - len(self._prefix)) % len(self._period)], None
        if self.rule is None:
            raise IndexError(f"finite continued fraction has no digit {i}")
        q = self._q[i - 1]
        rule = self.rule
        if rule.func is not None:
            if not isinstance(q, int):
                raise OverflowError("custom digit rules need exact denominators")
            c = int(rule.func(q))
            if c < 1:
                raise ValueError("digit rule produced a non-positive digit")
            return c, None
        if isinstance(q, int) and q.bit_length() < 64 and float(q) ** rule.power <= EXACT_EXPONENT_LIMIT:
            y = q ** int(rule.power) if float(rule.power).is_integer() else mpmath.mpf(q) ** rule.power
            return ceil_exp(y), rule.power
        # ceil(e^y) lies in [e^y, e^y + 1]
        e = as_logmag(q).power(rule.power).exp()
        return e + 1, rule.power

    def _extend(self, k: int) -> None:
        with self._lock:
            while len(self._digits) <= k:
                i = len(self._digits)
                c, power = self._next_digit(i)
                p1, p2 = (self._p[i - 1], self._p[i - 2] if i >= 2 else 1) if i >= 1 else (1, 0)
                q1, q2 = (self._q[i - 1], self._q[i - 2] if i >= 2 else 0) if i >= 1 else (0, 1)
                self._p.append(_recur(c, p1, p2))
                self._q.append(_recur(c, q1, q2))
                self._rule_power.append(power)
                self._digits.append(c)

    def digit(self, k: int) -> Digit:
        if k < 0:
            raise IndexError(k)
        self._extend(k)
        return self._digits[k]

    def digits(self, n: int) -> list[Digit]:
        if self.is_finite:
            n = min(n, len(self._prefix))
        if n > 0:
            self._extend(n - 1)
        return list(self._digits[:n])

    def p(self, k: int) -> Union[int, LogMagnitude]:
        if k == -1:
            return 1
        self._extend(k)
        return self._p[k]

    def q(self, k: int) -> Union[int, LogMagnitude]:
        if k == -1:
            return 0
        self._extend(k)
        return self._q[k]

    def rule_power(self, k: int) -> Optional[float]:
        """Exponent m if c_k was produced as ceil(exp(q_{k-1}**m))."""
        self._extend(k)
        return self._rule_power[k]

    def exact_upto(self) -> int:
        """Largest k such that c_0..c_k are exact integers (-1 if none)."""
        k = -1
        while self.available(k + 1) and isinstance(self.digit(k + 1), int):
            k += 1
            if not self.log_domain and k > 10_000:
                break
        return k

    def evaluate(self) -> Fraction:
        """Exact value of a finite continued fraction."""
        if not self.is_finite:
            raise TypeError("infinite continued fraction")
        n = len(self._prefix) - 1
        return Fraction(self.p(n), self.q(n))

    # -- serialization ----------------------------------------------------

    def to_json(self, n_digits: Optional[int] = None) -> dict:
        if n_digits is None:
            if self.is_finite:
                n_digits = len(self._prefix)
            elif self._period:
                n_digits = len(self._prefix) + len(self._period)
            else:
                n_digits = 6
        ds = self.digits(n_digits)
        return {
            "digits": [d if isinstance(d, int) else d.to_json() for d in ds],
            "periodic_from": self.periodic_from,
            "log_domain": self.log_domain,
        }

    @classmethod
    def from_json(cls, data: dict) -> ContinuedFraction:
        if data.get("log_domain"):
            raise ValueError("log-domain streams are rebuilt from their rule, not from JSON")
        ds = [int(d) for d in data["digits"]]
        k = data.get("periodic_from")
        if k is None:
            return cls(ds)
        return cls(ds[:k], period=ds[k:])

    def __repr__(self) -> str:
        head = self.digits(8 if not self.is_finite else len(self._prefix))
        txt = ", ".join(str(d) if isinstance(d, int) else "<huge>" for d in head[1:])
        tail = ", ..." if not self.is_finite else ""
        return f"[{head[0]}; {txt}{tail}]"


def _recur(c: Digit, a1, a2):
    if isinstance(c, int) and isinstance(a1, int) and isinstance(a2, int):
        return c * a1 + a2
    prod = as_logmag(c) * as_logmag(a1) if a1 != 0 else as_logmag(0)
    return prod + as_logmag(a2) if a2 != 0 else prod


# -- expansion ---------------------------------------------------------------


def cf_expand(x: Real) -> ContinuedFraction:
    """Continued fraction of a non-negative rational or quadratic irrational.

    Quadratic inputs yield a periodic stream; the period is found by spotting
    a repeated complete quotient. Results are cached per value, so repeated
    calls share one lazily extended convergent table.
    """
    return _cf_expand_cached(x)


@lru_cache(maxsize=256)
def _cf_expand_cached(x: Real) -> ContinuedFraction:
    if exact_sign(x) < 0:
        raise ValueError("negative slopes are rejected; swap generators instead")
    if isinstance(x, QuadraticNumber) and x.is_rational:
        x = x.a
    if not isinstance(x, QuadraticNumber):
        f = Fraction(x)
        ds, n, d = [], f.numerator, f.denominator
        while d:
            a, r = divmod(n, d)
            ds.append(a)
            n, d = d, r
        return ContinuedFraction(ds, value=f)
    seen: dict[tuple[Fraction, Fraction], int] = {}
    ds: list[int] = []
    y = x
    while (y.a, y.b) not in seen:
        seen[(y.a, y.b)] = len(ds)
        c = math.floor(y)
        ds.append(c)
        y = (y - c).inverse()
    start = seen[(y.a, y.b)]
    return ContinuedFraction(ds[:start], period=ds[start:], value=x)


def cf_from_digits(digits: Iterable[int]) -> ContinuedFraction:
    return ContinuedFraction(list(digits))


# -- convergents -------------------------------------------------------------


@dataclass(frozen=True)
class Convergent:
    k: int
    p: Union[int, LogMagnitude]
    q: Union[int, LogMagnitude]

    @property
    def exact(self) -> bool:
        return isinstance(self.p, int) and isinstance(self.q, int)

    def fraction(self) -> Fraction:
        if not self.exact:
            raise ValueError("log-domain convergent has no exact value")
        return Fraction(self.p, self.q)

    def to_json(self) -> dict:
        def enc(v):
            return v if isinstance(v, int) else v.to_json()

        return {"k": self.k, "p": enc(self.p), "q": enc(self.q),
                "exactness": "exact" if self.exact else "log-domain"}


def convergents(cf: ContinuedFraction, k_max: int) -> list[Convergent]:
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    if cf.is_finite:
        k_max = min(k_max, len(cf) - 1)
    return [Convergent(k, cf.p(k), cf.q(k)) for k in range(k_max + 1)]


def determinant(cf: ContinuedFraction, k: int) -> int:
    """p_k q_{k-1} - p_{k-1} q_k, which equals (-1)**(k-1)."""
    p0, q0, p1, q1 = cf.p(k), cf.q(k), cf.p(k - 1), cf.q(k - 1)
    if not all(isinstance(v, int) for v in (p0, q0, p1, q1)):
        raise ValueError("determinant is only available in exact mode")
    return p0 * q1 - p1 * q0


def approximation_error(theta: Real, conv: Convergent):
    """q_k * theta - p_k, exactly."""
    if not conv.exact:
        raise ValueError("exact convergent required")
    return conv.q * theta - conv.p


def best_approximation_holds(theta: Real, cf: ContinuedFraction, k: int) -> bool:
    """Exact check of |q_k theta - p_k| < 1 / q_{k+1}."""
    e = approximation_error(theta, Convergent(k, cf.p(k), cf.q(k)))
    if exact_sign(e) < 0:
        e = -e
    return exact_sign(e * cf.q(k + 1) - 1) < 0


def cylinder_interval(cf: ContinuedFraction, t: int) -> tuple[Fraction, Fraction]:
    """All numbers whose expansion starts with c_0..c_t lie in this interval."""
    p, q = cf.p(t), cf.q(t)
    pp, qq = cf.p(t - 1), cf.q(t - 1)
    if not all(isinstance(v, int) for v in (p, q, pp, qq)):
        raise ValueError("exact convergents required")
    a = Fraction(p, q)
    b = Fraction(p + pp, q + qq)
    return (a, b) if a <= b else (b, a)


# -- well-approximated schedules ---------------------------------------------


def well_approximated_cf(rule: Union[str, DigitRule] = "square", prefix: Sequence[int] = (1, 1)) -> ContinuedFraction:
    """Digits ``prefix`` followed by rule-generated digits."""
    if isinstance(rule, str):
        rule = rule_by_name(rule)
    return ContinuedFraction(list(prefix), rule=rule)


@dataclass(frozen=True)
class SignedMagnitude:
    sign: int  # -1 or +1
    magnitude: LogMagnitude

    def less_than(self, other: SignedMagnitude) -> bool:
        """Certified self < other."""
        if self.sign < 0 < other.sign:
            return True
        if self.sign > 0 > other.sign:
            return False
        if self.sign < 0:
            return self.magnitude.compare(other.magnitude) > 0
        return self.magnitude.compare(other.magnitude) < 0

    def to_json(self) -> dict:
        return {"sign": self.sign, **self.magnitude.to_json()}


def _signed_from_interval(lo: float, hi: float) -> Optional[SignedMagnitude]:
    if lo > 0:
        return SignedMagnitude(1, LogMagnitude(0, lo, hi))
    if hi < 0:
        return SignedMagnitude(-1, LogMagnitude(0, -hi, -lo))
    return None


def _signed_difference(a: LogMagnitude, b: LogMagnitude) -> Optional[SignedMagnitude]:
    """a - b with a certified sign, or None."""
    if a.level == 0 and b.level == 0:
        return _signed_from_interval(math.nextafter(a.lo - b.hi, -math.inf),
                                     math.nextafter(a.hi - b.lo, math.inf))
    try:
        c = a.compare(b)
        if c > 0:
            return SignedMagnitude(1, a - b)
        if c < 0:
            return SignedMagnitude(-1, b - a)
    except ValueError:
        pass
    return None


def _upper_ratio(C: float, base: LogMagnitude) -> float:
    """Upper bound on C / base as a float."""
    lo = base.lo if base.level == 0 else sys.float_info.max
    return min(1.0, math.nextafter(C / lo, math.inf)) if lo > 0 else 1.0


def _log1p_floor(v: float) -> float:
    return math.nextafter(math.nextafter(math.log1p(v), -math.inf), -math.inf)


def log_ratio(cf: ContinuedFraction, C: float, k: int) -> Optional[SignedMagnitude]:
    """ln(exp(C q_k) / q_{k+1}) = C q_k - ln q_{k+1} with certified sign.

    Rule digits are handled structurally: ln q_{k+1} = q_k**m + ln q_k + delta
    with 0 <= delta < 1, which avoids cancelling two astronomically large
    numbers.
    """
    q = as_logmag(cf.q(k))
    m = cf.rule_power(k + 1)
    if m is None or cf.q(k) == 0:
        return _signed_difference(q * C, as_logmag(cf.q(k + 1)).log())
    lnq = q.log().add_interval(0.0, 1.0)  # ln q_k + delta
    if m == 1.0:
        a = C - 1.0
        if a == 0.0:
            return SignedMagnitude(-1, lnq)
        if a < 0:
            return SignedMagnitude(-1, q * (-a) + lnq)
        return _signed_difference(q * a, lnq)
    if m > 1.0:
        # q^m - C q = q^m (1 - r) with r = C / q^(m-1); deep towers cannot
        # subtract q from q^m directly, so bound r first
        base = q.power(m - 1.0)
        if base.compare(2.0 * C) > 0:
            r_hi = _upper_ratio(C, base)
            qm = q.power(m)
            shrunk = qm.log().add_interval(_log1p_floor(-r_hi), 0.0).exp()
            return SignedMagnitude(-1, shrunk + lnq)
        return _signed_difference(q * C, q.power(m) + lnq)
    return _signed_difference(q * C, q.power(m) + lnq)


@dataclass
class CReport:
    C: float
    passed: bool
    parity: Optional[int]
    tail_start: Optional[int]
    last: Optional[SignedMagnitude]

    def to_json(self) -> dict:
        return {"C": self.C, "passed": self.passed, "parity": self.parity,
                "tail_start": self.tail_start,
                "last_log_ratio": self.last.to_json() if self.last else None}


@dataclass
class WellApproximationReport:
    well_approximated: bool
    failing_C: Optional[float]
    k_max: int
    per_C: list[CReport] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "well-approximated" if self.well_approximated else "not well-approximated"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "well_approximated": self.well_approximated,
                "failing_C": self.failing_C, "k_max": self.k_max,
                "per_C": [r.to_json() for r in self.per_C]}


def check_well_approximated(cf: ContinuedFraction, Cs: Iterable[float] = (1.0, 5.0, 10.0),
                            k_max: int = 10, min_tail: int = 3) -> WellApproximationReport:
    """Finite-horizon test that exp(C q_k)/q_{k+1} eventually decreases strictly to 0.

    For each C and each parity class of k, the longest certified strictly
    decreasing tail of ln(exp(C q_k)/q_{k+1}) ending at k_max - 1 must have
    at least ``min_tail`` terms and end below 0. The better parity counts.
    """
    Cs = list(Cs)
    reports = []
    for C in Cs:
        best = CReport(C, False, None, None, None)
        for parity in (0, 1):
            ks = [k for k in range(1, k_max) if k % 2 == parity and cf.available(k + 1)]
            vals = [log_ratio(cf, C, k) for k in ks]
            j = len(ks) - 1
            if j < 0 or vals[j] is None:
                continue
            while j > 0 and vals[j - 1] is not None and vals[j].less_than(vals[j - 1]):
                j -= 1
            tail = len(ks) - j
            ok = tail >= min_tail and vals[-1].sign < 0
            if ok or best.last is None:
                best = CReport(C, ok, parity, ks[j], vals[-1])
            if ok:
                break
        reports.append(best)
    failing = next((r.C for r in reports if not r.passed), None)
    return WellApproximationReport(failing is None, failing, k_max, reports)


# -- SE_d membership ---------------------------------------------------------


@dataclass
class SEVerdict:
    member: bool
    d: int
    indices: list[int]
    parity: Optional[int]
    inconclusive: bool = False
    reason: str = ""

    def __bool__(self) -> bool:
        return self.member

    def to_json(self) -> dict:
        return {"member": self.member, "d": self.d, "indices": self.indices,
                "parity": self.parity, "inconclusive": self.inconclusive,
                "reason": self.reason}


def digit_dominates(cf: ContinuedFraction, k: int) -> Optional[bool]:
    """Is c_k >= exp(q_{k-1}**2)?  None when the bounds cannot decide."""
    q = cf.q(k - 1)
    c = cf.digit(k)
    m = cf.rule_power(k)
    if m is not None and m >= 2 and (not isinstance(q, int) or q >= 1):
        return True  # ceil(exp(q**m)) >= exp(q**m) >= exp(q**2)
    if m is not None and m < 2 and not isinstance(c, int):
        # c <= exp(q**m) + 1 < exp(q**2) as soon as q**m (q**(2-m) - 1) > 1,
        # which holds once q**(2-m) >= 2 and q >= 1
        if as_logmag(q).compare(2.0 ** (1.0 / (2.0 - m)) * (1 + 1e-12)) > 0:
            return False
    if isinstance(c, int) and isinstance(q, int):
        y = q * q
        if y == 0:
            return c >= 1
        if c.bit_length() - 1 > y * 1.4427 + 2:
            return True
        if c.bit_length() < y * 1.4426 - 2:
            return False
        with mpmath.workprec(c.bit_length() + 64):
            return bool(mpmath.log(c) >= y)
    target = as_logmag(q).power(2).exp()
    cmp = as_logmag(c).compare(target)
    if cmp > 0:
        return True
    if cmp < 0:
        return False
    return None


def is_in_SE_d(cf: ContinuedFraction, d: int, k_max: int) -> SEVerdict:
    """Are there d indices 1 <= k_1 < ... < k_d <= k_max of one parity with
    c_{k_i} >= exp(q_{k_i - 1}**2)?"""
    if d <= 0:
        return SEVerdict(True, d, [], None)
    hits: dict[int, list[int]] = {0: [], 1: []}
    undecided = []
    last = k_max
    for k in range(1, k_max + 1):
        if not cf.available(k):
            last = k - 1
            break
        r = digit_dominates(cf, k)
        if r is None:
            undecided.append(k)
        elif r:
            hits[k % 2].append(k)
    for parity in (0, 1):
        if len(hits[parity]) >= d:
            return SEVerdict(True, d, hits[parity][:d], parity)
    parity = max((0, 1), key=lambda p: len(hits[p]))
    if last < k_max:
        return SEVerdict(False, d, hits[parity], parity, True,
                         f"inconclusive at k_max: only {last} digits available")
    if undecided:
        return SEVerdict(False, d, hits[parity], parity, True,
                         f"undecided digits at {undecided}")
    return SEVerdict(False, d, hits[parity], parity, False,
                     f"only {len(hits[parity])} qualifying digits of one parity up to {k_max}")


def se_density_truncate(cf: ContinuedFraction, t: int) -> ContinuedFraction:
    """Keep c_0..c_t and continue with the square rule."""
    if t < 0:
        raise ValueError("t must be >= 0")
    head = cf.digits(t + 1)
    if len(head) < t + 1:
        raise ValueError("continued fraction has fewer than t+1 digits")
    if not all(isinstance(c, int) for c in head):
        raise ValueError("truncation point lies in the log domain")
    return ContinuedFraction(head, rule=SQUARE_RULE)
