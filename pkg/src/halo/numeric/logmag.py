"""Rigorous magnitudes for numbers far beyond floating-point range.

A LogMagnitude at level j encloses the j-fold iterated natural log of a
value in a float interval [lo, hi]. Level 0 is a plain real interval; any
level >= 1 denotes a positive number. Every operation rounds outward, so
the enclosure only ever widens.

Digits such as ceil(exp(q**2)) reach level 2 after a couple of steps and
keep climbing by one level per continued-fraction index, which is why a
single log is not enough.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Union

INF = math.inf
_FMAX = sys.float_info.max
_TINY = 5e-324
_EXP_SAFE = 709.0
# gap in log scale beyond which the smaller summand is treated as a ulp
_SEPARATED = 40.0


def _down(x: float) -> float:
    return math.nextafter(x, -INF) if math.isfinite(x) else x


def _up(x: float) -> float:
    return math.nextafter(x, INF) if math.isfinite(x) else x


def exp_down(x: float) -> float:
    if x == -INF:
        return 0.0
    if x > _EXP_SAFE:
        return _FMAX if x > 709.78 else _down(_down(math.exp(min(x, 709.78))))
    return max(0.0, _down(_down(math.exp(x))))


def exp_up(x: float) -> float:
    if x > 709.78:
        return INF
    return _up(_up(math.exp(x)))


def log_down(x: float) -> float:
    if x <= 0.0:
        return -INF
    if x == INF:
        return _FMAX
    return _down(_down(math.log(x)))


def log_up(x: float) -> float:
    if x <= 0.0:
        raise ValueError("log of a non-positive upper bound")
    if x == INF:
        return INF
    return _up(_up(math.log(x)))


def _log1p_down(v: float) -> float:
    if v == 0.0:
        return 0.0
    if v <= -1.0:
        return -INF
    return _down(_down(math.log1p(v)))


def _log1p_up(v: float) -> float:
    if v == 0.0:
        return 0.0
    if v == INF:
        return INF
    return _up(_up(math.log1p(v)))


def _div_down(a: float, b: float) -> float:
    if b == 0.0:
        return -INF if a < 0 else 0.0
    if b == INF:
        return 0.0 if a >= 0 else -_TINY
    r = _down(a / b)
    if r == 0.0 and a < 0:
        return -_TINY
    return r


def _div_up(a: float, b: float) -> float:
    if b == 0.0:
        return INF if a > 0 else 0.0
    if b == INF:
        return _TINY if a > 0 else 0.0
    r = _up(a / b)
    if r == 0.0 and a > 0:
        return _TINY
    return r


@dataclass(frozen=True)
class LogMagnitude:
    level: int
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.level < 0 or not self.lo <= self.hi:
            raise ValueError(f"malformed enclosure {self!r}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_int(cls, n: int) -> LogMagnitude:
        if n.bit_length() <= 1000:
            f = float(n)
            if abs(n) < 2**53:
                return cls(0, f, f)
            return cls(0, _down(f), _up(f))
        if n <= 0:
            raise ValueError("huge negative integers are not supported")
        ln = math.log(n)
        return cls(1, _down(_down(ln)), _up(_up(ln)))

    @classmethod
    def from_float(cls, x: float, tol: float = 0.0) -> LogMagnitude:
        return cls(0, _down(x - tol) if tol else x, _up(x + tol) if tol else x)

    @classmethod
    def interval(cls, lo: float, hi: float) -> LogMagnitude:
        return cls(0, lo, hi)

    @classmethod
    def from_log(cls, ln_lo: float, ln_hi: float) -> LogMagnitude:
        return cls(1, ln_lo, ln_hi).normalized()

    # -- level bookkeeping ------------------------------------------------

    def normalized(self) -> LogMagnitude:
        level, lo, hi = self.level, self.lo, self.hi
        while level >= 1 and hi <= _EXP_SAFE:
            level -= 1
            lo, hi = exp_down(lo), exp_up(hi)
        if (level, lo, hi) == (self.level, self.lo, self.hi):
            return self
        return LogMagnitude(level, lo, hi)

    def lifted(self) -> LogMagnitude:
        """Same value, one level higher. Needs the value to be positive."""
        if self.hi <= 0.0:
            raise ValueError("cannot lift a non-positive enclosure")
        return LogMagnitude(self.level + 1, log_down(self.lo), log_up(self.hi))

    def at_level(self, level: int) -> LogMagnitude:
        t = self
        while t.level < level:
            t = t.lifted()
        return t

    @property
    def is_positive(self) -> bool:
        return self.level >= 1 or self.lo > 0.0

    def _chain(self, lower: bool) -> tuple[list[float], int]:
        """Bounds on ln^i(x) for i = start..level, computed top-down.

        Indices below ``start`` are saturated: at least the float maximum
        for lower bounds, infinite for upper bounds.
        """
        step = exp_down if lower else exp_up
        cap = _FMAX if lower else INF
        vals = [self.lo if lower else self.hi]
        i = self.level
        while i > 0 and vals[-1] != cap:
            vals.append(step(vals[-1]))
            i -= 1
        vals.reverse()
        return vals, i

    def add_interval(self, s_lo: float, s_hi: float) -> LogMagnitude:
        """x + s for s in [s_lo, s_hi]; s may be negative if x + s stays positive."""
        if self.level == 0:
            return LogMagnitude(0, _down(self.lo + s_lo), _up(self.hi + s_hi))
        Lv, Ls = self._chain(True)
        Uv, Us = self._chain(False)
        u_lo, u_hi = s_lo, s_hi
        i = 0
        while i < self.level:
            if i < Ls and abs(u_lo) <= _TINY and abs(u_hi) <= _TINY:
                # every skipped ln^i(x) exceeds 1, so the increment stays sub-ulp
                i = Ls
                continue
            Li = Lv[i - Ls] if i >= Ls else _FMAX
            Ui = Uv[i - Us] if i >= Us else INF
            # ln^{i+1}(x + s) = ln^{i+1}(x) + log1p(u_i / ln^i(x))
            v_lo = _div_down(u_lo, Ui if u_lo >= 0 else Li)
            v_hi = _div_up(u_hi, Li if u_hi >= 0 else Ui)
            if v_lo <= -1.0:
                raise ValueError("subtraction would leave the positive range")
            u_lo, u_hi = _log1p_down(v_lo), _log1p_up(v_hi)
            i += 1
        return LogMagnitude(self.level, _down(self.lo + u_lo), _up(self.hi + u_hi))

    def log(self) -> LogMagnitude:
        if self.level >= 1:
            return LogMagnitude(self.level - 1, self.lo, self.hi)
        return LogMagnitude(0, log_down(self.lo), log_up(self.hi))

    def exp(self) -> LogMagnitude:
        if self.level == 0 and self.hi <= _EXP_SAFE:
            return LogMagnitude(0, exp_down(self.lo), exp_up(self.hi))
        return LogMagnitude(self.level + 1, self.lo, self.hi).normalized()

    def __add__(self, other: Number) -> LogMagnitude:
        o = as_logmag(other)
        if o.level == 0:
            return self.add_interval(o.lo, o.hi).normalized()
        if self.level == 0:
            return o.add_interval(self.lo, self.hi).normalized()
        la, lb = self.log(), o.log()
        if la.compare(lb.add_interval(_SEPARATED, _SEPARATED)) > 0:
            return _log_sum(la, lb).exp()
        if lb.compare(la.add_interval(_SEPARATED, _SEPARATED)) > 0:
            return _log_sum(lb, la).exp()
        if la.level == 0 and lb.level == 0:
            hi_gap = max(la.hi, lb.hi)
            top = hi_gap + _log1p_up(exp_up(min(la.hi, lb.hi) - hi_gap))
            lo_gap = max(la.lo, lb.lo)
            bot = lo_gap + _log1p_down(exp_down(min(la.lo, lb.lo) - lo_gap))
            return LogMagnitude(0, _down(bot), _up(top)).exp()
        h = hull(la, lb)
        return h.add_interval(0.0, _up(math.log(2.0))).exp()

    __radd__ = __add__

    def __sub__(self, other: Number) -> LogMagnitude:
        """x - y for 0 < y < x; raises when positivity cannot be certified."""
        o = as_logmag(other)
        if o.level == 0:
            return self.add_interval(-o.hi, -o.lo).normalized()
        la, lb = self.log(), o.log()
        if la.level == 0 and lb.level == 0:
            r_hi = exp_up(lb.hi - la.lo)
            r_lo = exp_down(lb.lo - la.hi)
        elif la.compare(lb.add_interval(_SEPARATED, _SEPARATED)) > 0:
            r_lo, r_hi = 0.0, exp_up(-_SEPARATED)
        else:
            raise ValueError("difference not certifiably positive")
        if r_hi >= 1.0:
            raise ValueError("difference not certifiably positive")
        return la.add_interval(_log1p_down(-r_hi), _log1p_up(-r_lo)).exp()

    def __mul__(self, other: Number) -> LogMagnitude:
        o = as_logmag(other)
        if self.level == 0 and o.level == 0:
            prods = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
            return LogMagnitude(0, _down(min(prods)), _up(max(prods))).normalized()
        return (self.log() + o.log()).exp()

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> LogMagnitude:
        o = as_logmag(other)
        if self.level == 0 and o.level == 0:
            if o.lo <= 0:
                raise ZeroDivisionError("divisor not certifiably positive")
            qs = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi]
            return LogMagnitude(0, _down(min(qs)), _up(max(qs)))
        return log_difference(self.log(), o.log()).exp()

    def power(self, m: float) -> LogMagnitude:
        """x ** m for x positive and m > 0."""
        if m <= 0:
            raise ValueError("only positive exponents are supported")
        return (self.log() * m).exp()

    # -- comparison -------------------------------------------------------

    def compare(self, other: Number) -> int:
        """+1 if certainly greater, -1 if certainly smaller, 0 if undecided."""
        a, b = self, as_logmag(other)
        if a.level != b.level:
            swap = a.level > b.level
            low, high = (b, a) if swap else (a, b)
            while low.level < high.level:
                if low.hi <= 0.0:
                    # low is at most 1 on this scale while high exceeds it
                    return 1 if swap else -1
                low = low.lifted()
            a, b = (high, low) if swap else (low, high)
        if a.lo > b.hi:
            return 1
        if a.hi < b.lo:
            return -1
        return 0

    def certainly_ge(self, other: Number) -> bool:
        a, b = self, as_logmag(other)
        c = a.compare(b)
        if c != 0:
            return c > 0
        if a.level == b.level:
            return a.lo >= b.hi
        return False

    # -- reporting --------------------------------------------------------

    def ln_bounds(self) -> tuple[float, float]:
        """Bounds on ln(x) as floats (may be infinite for deep levels)."""
        if self.level == 0:
            return log_down(self.lo), log_up(self.hi)
        t = LogMagnitude(self.level - 1, self.lo, self.hi).normalized()
        if t.level == 0:
            return t.lo, t.hi
        return _FMAX, INF

    def to_float(self) -> float:
        if self.level == 0:
            return 0.5 * (self.lo + self.hi)
        return INF

    def to_json(self) -> dict:
        t = self if self.level >= 1 else self.lifted()
        out = {"ln_lower": t.lo, "ln_upper": t.hi}
        if t.level > 1:
            out["level"] = t.level
        return out

    @classmethod
    def from_json(cls, data: dict) -> LogMagnitude:
        return cls(int(data.get("level", 1)), float(data["ln_lower"]), float(data["ln_upper"]))

    def __repr__(self) -> str:
        return f"LogMagnitude(level={self.level}, [{self.lo!r}, {self.hi!r}])"


Number = Union[int, float, LogMagnitude]


def as_logmag(x: Number) -> LogMagnitude:
    if isinstance(x, LogMagnitude):
        return x
    if isinstance(x, int):
        return LogMagnitude.from_int(x)
    if isinstance(x, float):
        return LogMagnitude(0, x, x)
    # Fraction and friends
    f = float(x)
    return LogMagnitude(0, _down(f), _up(f))


def hull(a: LogMagnitude, b: LogMagnitude) -> LogMagnitude:
    level = max(a.level, b.level)
    a, b = a.at_level(level), b.at_level(level)
    return LogMagnitude(level, min(a.lo, b.lo), max(a.hi, b.hi))


def _log_sum(big: LogMagnitude, small: LogMagnitude) -> LogMagnitude:
    """ln(e^big + e^small) when big exceeds small by the separation margin."""
    if big.level == 0 and small.level == 0:
        gap = big.lo - small.hi
    else:
        gap = _SEPARATED
    return big.add_interval(0.0, _log1p_up(exp_up(-gap)))


def log_difference(la: LogMagnitude, lb: LogMagnitude) -> LogMagnitude:
    """la - lb for log-scale enclosures (the result may be any real)."""
    if la.level == 0 and lb.level == 0:
        return LogMagnitude(0, _down(la.lo - lb.hi), _up(la.hi - lb.lo))
    if lb.level == 0:
        return la.add_interval(-lb.hi, -lb.lo).normalized()
    return la - lb


def is_exact(x) -> bool:
    return isinstance(x, int)
