"""A chain of support planes bent along the closing segments of leaf
approximations, and the search for a subsequence that keeps the radii
bounded below.

Schedules built from continued fractions can carry numbers such as
2 / q_{k+1} that underflow any float; those enter only through upper
bounds on their logarithms (LogUpper), and the step certificate is
computed from the logarithms.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from . import kernels
from .hyperbolic import VERTICAL, bent_plane_radius
from .numeric.contfrac import ContinuedFraction, log_ratio
from .numeric.logmag import LogMagnitude, as_logmag

LN2 = math.log(2.0)


@dataclass(frozen=True)
class LogUpper:
    """Upper bound on ln(x) for some x > 0: either a float, or -neg with neg
    an enclosure (possibly astronomically large)."""

    finite: Optional[float] = None
    neg: Optional[LogMagnitude] = None

    @classmethod
    def of(cls, x: float) -> LogUpper:
        if x <= 0:
            return cls(-math.inf)
        return cls(math.nextafter(math.log(x), math.inf))

    def plus(self, c: float) -> LogUpper:
        if self.neg is None:
            return LogUpper(math.nextafter(self.finite + c, math.inf))
        m = self.neg.add_interval(-c, -c)
        return _from_neg(m)

    def at_most(self, t: float) -> bool:
        """Certified ln(x) <= t."""
        if self.neg is None:
            return self.finite <= t
        return self.neg.compare(-t) > 0

    def value(self) -> float:
        """Upper bound on x itself (0.0 when below the float range)."""
        if self.neg is None:
            return math.exp(min(self.finite, 709.0)) if self.finite > -745 else 0.0
        lo = self.neg.lo if self.neg.level == 0 else math.inf
        return math.exp(-lo) if lo < 745 else 0.0

    def to_json(self) -> dict:
        if self.neg is None:
            return {"ln_upper": self.finite}
        return {"ln_upper_negated": self.neg.to_json()}


def _from_neg(m: LogMagnitude) -> LogUpper:
    if m.level == 0:
        return LogUpper(-m.lo)
    return LogUpper(None, m)


# -- schedules -------------------------------------------------------------------


@dataclass(frozen=True)
class ScheduleEntry:
    """One leaf approximation seen by the roof: its length d, closing measure
    alpha and separation eps, with certified upper bounds on ln(alpha) and
    ln(eps e^d)."""

    n: int
    d: Union[float, LogMagnitude]
    ln_alpha: LogUpper
    ln_sep: LogUpper

    @property
    def alpha(self) -> float:
        return self.ln_alpha.value()

    def to_row(self) -> dict:
        d = self.d if isinstance(self.d, float) else self.d.to_json()
        return {"n": self.n, "d": d, "ln_alpha": self.ln_alpha.to_json(), "ln_sep": self.ln_sep.to_json()}


def float_entry(n: int, d: float, alpha: float, eps: float) -> ScheduleEntry:
    if alpha < 0 or eps < 0:
        raise ValueError("alpha and eps must be non-negative")
    sep = LogUpper.of(eps).plus(d) if eps > 0 else LogUpper(-math.inf)
    return ScheduleEntry(n, float(d), LogUpper.of(alpha), sep)


class BendingSchedule:
    """A possibly lazy sequence of entries, built on demand and cached."""

    def __init__(self, entries: Union[Sequence[ScheduleEntry], Callable[[int], ScheduleEntry]],
                 length: Optional[int] = None, name: str = "") -> None:
        if callable(entries):
            self._make, self._cache = entries, {}
            if length is None:
                raise ValueError("lazy schedules need a length")
            self._len = length
        else:
            self._make, self._cache = None, dict(enumerate(entries))
            self._len = len(entries)
        self.name = name

    def __len__(self) -> int:
        return self._len

    def __getitem__(self, i: int) -> ScheduleEntry:
        if not 0 <= i < self._len:
            raise IndexError(i)
        if i not in self._cache:
            self._cache[i] = self._make(i)
        return self._cache[i]

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out)
        w.writerow(["n", "d", "alpha", "epsilon"])
        for i in range(len(self)):
            e = self[i]
            d = e.d if isinstance(e.d, float) else math.inf
            eps = e.ln_sep.value() * math.exp(-d) if math.isfinite(d) and d < 700 else 0.0
            w.writerow([e.n, repr(d), repr(e.alpha), repr(eps)])
        return out.getvalue()


def constant_schedule(alpha: float, d: float, eps: float, length: int) -> BendingSchedule:
    e = [float_entry(i + 1, d, alpha, eps) for i in range(length)]
    return BendingSchedule(e, name=f"constant alpha={alpha}")


def schedule_from_csv(text: str) -> BendingSchedule:
    reader = csv.DictReader(io.StringIO(text))
    missing = {"n", "d", "alpha", "epsilon"} - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"line 1: missing columns {sorted(missing)}")
    e: list[ScheduleEntry] = []
    for r in reader:
        line = reader.line_num
        try:
            e.append(float_entry(int(r["n"]), float(r["d"]), float(r["alpha"]), float(r["epsilon"])))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"line {line}: {exc}") from None
        if len(e) > 1 and e[-1].d <= e[-2].d:
            raise ValueError(f"line {line}: d must increase")
    if not e:
        raise ValueError("empty schedule")
    return BendingSchedule(e, name="csv")


def cf_entry(cf: ContinuedFraction, k: int, kappa: float = 1.0, length_scale: float = 1.0) -> ScheduleEntry:
    """Leaf approximation k of a continued fraction, seen by the roof.

    d = length_scale * q_k; alpha <= 2 kappa / q_{k+1}; eps = alpha / kappa,
    so ln(eps e^d) <= ln 2 + ln(exp(length_scale q_k) / q_{k+1}).
    """
    q, q1 = cf.q(k), cf.q(k + 1)
    d = float(length_scale * q) if isinstance(q, int) and q.bit_length() < 1000 else as_logmag(q) * length_scale
    lnq1 = as_logmag(q1).log()
    ln_alpha = _from_neg(lnq1).plus(math.log(2 * kappa)) if lnq1.level else LogUpper(
        math.nextafter(math.log(2 * kappa) - lnq1.lo, math.inf))
    r = log_ratio(cf, length_scale, k)
    if r is None:
        raise ArithmeticError(f"cannot bound exp(d)/q_(k+1) at k={k}")
    if r.sign < 0:
        sep = _from_neg(r.magnitude).plus(LN2)
    else:
        hi = r.magnitude.hi if r.magnitude.level == 0 else math.inf
        sep = LogUpper(math.nextafter(hi + LN2, math.inf))
    return ScheduleEntry(k, d, ln_alpha, sep)


def schedule_from_cf(cf: ContinuedFraction, k_start: int = 2, count: int = 1000, kappa: float = 1.0,
                     length_scale: float = 1.0) -> BendingSchedule:
    return BendingSchedule(lambda i: cf_entry(cf, k_start + i, kappa, length_scale), count,
                           name=f"cf from k={k_start}")


def schedule_from_leaf_approx(seq: Sequence, length_scale: float = 1.0) -> BendingSchedule:
    """Entries for LeafApprox objects (exact or continued-fraction based)."""
    return BendingSchedule([cf_entry(a.cf, a.k, float(a.kappa), length_scale) for a in seq], name="leaf approx")


# -- steps -----------------------------------------------------------------------


def beta_from_alpha(alpha: float, mode: str = "equal", D: float = 2.0) -> float:
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if mode == "equal":
        return alpha
    if mode == "capped":
        return min(D * alpha, math.pi / 2)
    if mode == "custom":
        return D * alpha
    raise ValueError(f"unknown mode {mode!r}")


def _ln_beta_factor(mode: str, D: float) -> float:
    return 0.0 if mode == "equal" else math.log(D)


@dataclass(frozen=True)
class RoofState:
    r: float
    r_ridge: float  # radius of the geodesic the next leaf run starts on
    offset: float  # distance from that start to the peak of the geodesic
    k: int
    certificate: float
    live: bool = True


def initial_state(r1: float = 1.0) -> RoofState:
    return RoofState(r1, r1, 0.0, 0, r1)


@dataclass(frozen=True)
class StepRecord:
    k: int
    n: int
    r: float
    bound: float
    beta: float
    ridge: float
    ridge_forward: float  # the crossing run with the orientation of the geodesic
    offset: float
    ln_delta: LogUpper

    def csv_row(self) -> list:
        return [self.k, self.n, repr(self.r), repr(self.bound), repr(self.beta)]


def step_delta(state: RoofState, e: ScheduleEntry, mode: str = "equal", D: float = 2.0) -> LogUpper:
    """Upper bound on ln(delta), where r_next >= r / (1 + delta).

    The bent radius is r / (sqrt((r/rho)^2 - 1) sin(beta) + cos(beta))
    <= r / (1 + beta r / rho) and r / rho = (r / r_G)(1 + eps e^{d + offset}).
    """
    if e.ln_alpha.neg is None and e.ln_alpha.finite == -math.inf:
        return LogUpper(-math.inf)  # no bending, no contraction
    ln_x = e.ln_sep.plus(state.offset)
    if ln_x.at_most(0.0):
        ln1px = LN2 if not ln_x.at_most(-745.0) else 1e-300
        if ln_x.neg is None and ln_x.finite > -745:
            ln1px = math.log1p(math.exp(ln_x.finite)) * (1 + 1e-15)
    else:
        if ln_x.neg is not None or not math.isfinite(ln_x.finite):
            return LogUpper(math.inf)
        ln1px = LN2 + ln_x.finite
    c = _ln_beta_factor(mode, D) + math.log(state.r / state.r_ridge) * (1 + 1e-15) + ln1px
    return e.ln_alpha.plus(c)


def roof_step(state: RoofState, e: ScheduleEntry, mode: str = "equal", D: float = 2.0) -> tuple[RoofState, StepRecord]:
    if not state.live:
        raise ValueError("state is terminated")
    sep = e.ln_sep.plus(state.offset).value()
    rho = state.r_ridge / (1.0 + sep)
    d = e.d if isinstance(e.d, float) else math.inf
    fwd = state.r_ridge / (1.0 + sep * math.exp(-2 * min(d + state.offset, 350.0)))
    beta = beta_from_alpha(e.alpha, mode, D)
    ln_delta = step_delta(state, e, mode, D)
    if beta == 0.0:
        new_r = state.r  # the plane is not bent
    elif rho > 0:
        new_r = bent_plane_radius(state.r, rho, beta)
    else:
        new_r = 0.0  # the ridge radius underflowed: nothing is left of the plane
    if new_r is VERTICAL:
        rec = StepRecord(state.k + 1, e.n, math.inf, 0.0, beta, rho, fwd, math.inf, ln_delta)
        return RoofState(math.inf, rho, math.inf, state.k + 1, 0.0, False), rec
    delta = ln_delta.value()
    if ln_delta.neg is None and ln_delta.finite == -math.inf:
        cert = state.certificate
    elif delta == 0.0:
        cert = math.nextafter(state.certificate, 0.0)
    else:
        cert = math.nextafter(state.certificate / (1.0 + delta), 0.0)
    cert = min(cert, new_r)
    ridge = min(rho, new_r)
    offset = math.acosh(max(1.0, new_r / ridge)) if ridge > 0 else math.inf
    rec = StepRecord(state.k + 1, e.n, new_r, cert, beta, rho, fwd, offset, ln_delta)
    return RoofState(new_r, ridge, offset, state.k + 1, cert), rec


# -- runs ------------------------------------------------------------------------


@dataclass
class RecursionTrace:
    records: list[StepRecord]
    verdict: str  # bounded-below, decayed, inconclusive
    r1: float
    reason: str = ""
    position: Optional[int] = None

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out)
        w.writerow(["k", "n", "r", "bound", "beta"])
        for rec in self.records:
            w.writerow(rec.csv_row())
        return out.getvalue()

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "r1": self.r1, "steps": len(self.records),
                "reason": self.reason, "position": self.position,
                "min_r": min((r.r for r in self.records), default=self.r1),
                "min_bound": min((r.bound for r in self.records), default=self.r1)}


def target_ln(k: int) -> float:
    """Step k may shrink r by at most the factor 1 - 2^-(k+2); the product of
    all these factors stays above 1/2."""
    return -(k + 2) * LN2


def _select(schedule: BendingSchedule, pos: int, state: RoofState, k: int, mode: str, D: float,
            budget: Optional[int]) -> Optional[int]:
    """First index >= pos meeting the target, by doubling then bisection
    (assuming the condition, once met, persists further on)."""
    t = target_ln(k)
    end = len(schedule) if budget is None else min(len(schedule), pos + budget)

    def ok(i: int) -> bool:
        return step_delta(state, schedule[i], mode, D).at_most(t)

    if pos >= end:
        return None
    if ok(pos):
        return pos
    lo, jump = pos, 1
    while True:
        hi = lo + jump
        if hi >= end:
            hi = end - 1
            if hi <= lo or not ok(hi):
                return None
            break
        if ok(hi):
            break
        lo, jump = hi, jump * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def run_roof(schedule: BendingSchedule, max_steps: int, selector: Optional[str] = "doubling",
             r1: float = 1.0, mode: str = "equal", D: float = 2.0, floor: float = 0.01,
             budget: Optional[int] = None, stride: int = 1) -> RecursionTrace:
    """Iterate roof_step. With ``selector="doubling"`` each step takes the
    first schedule entry (at least ``stride`` past the last one used) whose
    certified contraction meets the per-step target; with ``selector=None``
    entries are used in order."""
    state = initial_state(r1)
    records: list[StepRecord] = []
    pos = 0
    if budget == 0:
        return RecursionTrace(records, "inconclusive", r1, "selector budget is empty", 0)
    for k in range(1, max_steps + 1):
        if selector is None:
            i = pos if pos < len(schedule) else None
        else:
            i = _select(schedule, pos, state, k, mode, D, budget)
        if i is None:
            return RecursionTrace(records, "inconclusive", r1, "schedule exhausted", pos)
        state, rec = roof_step(state, schedule[i], mode, D)
        records.append(rec)
        pos = i + stride
        if not state.live:
            return RecursionTrace(records, "decayed", r1, "bent plane became vertical", i)
        if state.r < floor * r1 or state.r < 1e-300:
            return RecursionTrace(records, "decayed", r1, f"r below {floor} r1", i)
    ok = all(rec.bound > r1 / 2 for rec in records)
    return RecursionTrace(records, "bounded-below" if ok else "inconclusive", r1,
                          "" if ok else "certificate fell below r1/2", pos)


def direct_radii(schedule: BendingSchedule, indices: Sequence[int], r1: float = 1.0,
                 mode: str = "equal", D: float = 2.0) -> list[float]:
    """Radii from the compiled float recursion on float-representable entries;
    used to cross-check roof_step."""
    ds, eps, betas = [], [], []
    for i in indices:
        e = schedule[i]
        d = e.d if isinstance(e.d, float) else math.inf
        ds.append(d if math.isfinite(d) else 0.0)
        # eps e^d is what enters; pass it with d = 0 when d is huge
        if math.isfinite(d) and d < 700:
            eps.append(e.ln_sep.value() * math.exp(-d))
        else:
            eps.append(e.ln_sep.value())
            ds[-1] = 0.0
        betas.append(beta_from_alpha(e.alpha, mode, D))
    r, _, _ = kernels.roof_chain(r1, ds, eps, betas)
    return [float(x) for x in r]
