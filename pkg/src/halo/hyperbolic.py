"""Boundary geometry in the upper half-space model.

A plane is a hemisphere over a circle in C, a geodesic on it a half circle
over two boundary points. Everything here is double precision; each radius
formula has an oracle that recomputes the same quantity from the geometry
(a Moebius map, or a rotation in R^3) without calling the formula.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

INF = None  # the point at infinity of the Riemann sphere
Point = Optional[complex]


class Vertical:
    """Tag for a plane whose boundary is a line (infinite radius)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "VERTICAL"

    def __float__(self) -> float:
        return math.inf


VERTICAL = Vertical()
# a bent plane this close to vertical (relative to its size) is tagged vertical
_DEGENERATE = 1e-12
Radius = Union[float, Vertical]


# -- Moebius maps ----------------------------------------------------------------


@dataclass(frozen=True)
class MobiusMap:
    """z -> (a z + b) / (c z + d), normalized to determinant 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def normalized(cls, a: complex, b: complex, c: complex, d: complex) -> MobiusMap:
        det = a * d - b * c
        if abs(det) == 0:
            raise ValueError("singular matrix")
        s = cmath.sqrt(det)
        return cls(a / s, b / s, c / s, d / s)

    @classmethod
    def identity(cls) -> MobiusMap:
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __call__(self, z: Point) -> Point:
        if z is INF:
            return INF if self.c == 0 else self.a / self.c
        den = self.c * z + self.d
        if den == 0:
            return INF
        return (self.a * z + self.b) / den

    def __matmul__(self, other: MobiusMap) -> MobiusMap:
        m = self.matrix() @ other.matrix()
        return MobiusMap.normalized(*m.ravel())

    def inverse(self) -> MobiusMap:
        return MobiusMap(self.d, -self.b, -self.c, self.a)


def _to_zero_inf_one(z1: Point, z2: Point, z3: Point) -> MobiusMap:
    """The map sending z1, z2, z3 to 0, infinity, 1."""
    if z1 is INF:
        return MobiusMap.normalized(0, z3 - z2, 1, -z2)
    if z2 is INF:
        return MobiusMap.normalized(1, -z1, 0, z3 - z1)
    if z3 is INF:
        return MobiusMap.normalized(1, -z1, 1, -z2)
    return MobiusMap.normalized(z3 - z2, -z1 * (z3 - z2), z3 - z1, -z2 * (z3 - z1))


def _distinct(pts: Sequence[Point]) -> bool:
    for i, p in enumerate(pts):
        for q in pts[i + 1 :]:
            if p is INF and q is INF:
                return False
            if p is not INF and q is not INF and abs(p - q) < 1e-300:
                return False
    return True


def mobius_from_triple(z: Sequence[Point], w: Sequence[Point]) -> MobiusMap:
    """The unique map with z_i -> w_i (None stands for infinity)."""
    if len(z) != 3 or len(w) != 3:
        raise ValueError("need three points on each side")
    if not _distinct(z) or not _distinct(w):
        raise ValueError("coincident points")
    return _to_zero_inf_one(*w).inverse() @ _to_zero_inf_one(*z)


def cross_ratio(p1: Point, p2: Point, p3: Point, p4: Point) -> complex:
    """(p4 - p1)(p2 - p3) / ((p4 - p3)(p2 - p1)).

    With this convention (0, 1, inf, x) -> x and the harmonic quadruple
    (0, 1, inf, -1) -> -1.
    """
    if not _distinct((p1, p2, p3, p4)):
        raise ValueError("coincident points")
    num, den = [], []
    for (x, y), bucket in (((p4, p1), num), ((p2, p3), num), ((p4, p3), den), ((p2, p1), den)):
        if x is INF or y is INF:
            bucket.append(None)  # cancels against the other infinite factor
        else:
            bucket.append(x - y)
    n = [v for v in num if v is not None]
    dd = [v for v in den if v is not None]
    return complex(np.prod(n)) / complex(np.prod(dd))


# -- circles ---------------------------------------------------------------------


@dataclass(frozen=True)
class GeodesicHalfCircle:
    """Geodesic with endpoints x1, x2 in C (x2 = None for a vertical line)."""

    x1: complex
    x2: Point
    forward: bool = True

    @property
    def radius(self) -> float:
        return math.inf if self.x2 is INF else abs(self.x1 - self.x2) / 2

    @property
    def center(self) -> Optional[complex]:
        return None if self.x2 is INF else (self.x1 + self.x2) / 2

    def reversed(self) -> GeodesicHalfCircle:
        return GeodesicHalfCircle(self.x1, self.x2, not self.forward)


@dataclass(frozen=True)
class PlaneSphere:
    center: complex
    radius: Radius

    @property
    def vertical(self) -> bool:
        return self.radius is VERTICAL

    def to_json(self) -> dict:
        r = None if self.vertical else self.radius
        return {"cx": self.center.real, "cy": self.center.imag, "r": r}

    def inclination(self, g_radius: float) -> float:
        """sin of the angle between the plane and the vertical plane of a
        contained geodesic: sqrt(1 - r_G^2 / r_P^2)."""
        if g_radius > self.radius * (1 + 1e-12):
            raise ValueError("geodesic radius exceeds plane radius")
        return math.sqrt(max(0.0, 1.0 - (g_radius / self.radius) ** 2))


def _sin_cos(r_G: float, r_P: float) -> tuple[float, float]:
    if not 0 < r_G <= r_P:
        raise ValueError("need 0 < r_G <= r_P")
    c = r_G / r_P
    return math.sqrt(max(0.0, 1.0 - c * c)), c


# -- radius formulas -------------------------------------------------------------


@dataclass(frozen=True)
class RadiusResult:
    value: float
    bound: float
    bound_holds: bool


def radius_after_crossing(r_G: float, r_P: float, d: float, k: float) -> RadiusResult:
    """Radius of the side reached by a k-crossing ending at distance d from
    the peak of G, with the lower bound r_G / (1 + k e^-d)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    s, _ = _sin_cos(r_G, r_P)
    if k == 0:
        return RadiusResult(r_G, r_G, True)
    u = k * math.exp(-d)
    value = r_G / math.sqrt(1 + 2 * u * s + u * u)
    bound = r_G / (1 + u)
    return RadiusResult(value, bound, value >= bound * (1 - 1e-15))


def radius_after_reverse_crossing(r_G: float, r_P: float, d: float, k: float) -> RadiusResult:
    """Same for the crossing run against the orientation of G. The quadratic
    term is k^2 e^{2d}; the bound r_G / (1 + k e^d) is only promised for
    k < 1 and d large, so ``bound_holds`` is reported, not asserted."""
    if k < 0:
        raise ValueError("k must be >= 0")
    s, _ = _sin_cos(r_G, r_P)
    if k == 0:
        return RadiusResult(r_G, r_G, True)
    u = k * math.exp(d)
    value = r_G / math.sqrt(1 + 2 * u * s + u * u)
    bound = r_G / (1 + u)
    return RadiusResult(value, bound, value >= bound * (1 - 1e-15))


def radius_after_reverse_crossing_literal(r_G: float, r_P: float, d: float, k: float) -> float:
    """The variant with a linear k e^{2d} term, kept for comparison only."""
    s, _ = _sin_cos(r_G, r_P)
    return r_G / math.sqrt(1 + 2 * k * math.exp(d) * s + k * math.exp(2 * d))


def bent_plane_radius(r_P: float, r_G: float, alpha: float) -> Radius:
    """Radius of the plane through G bent by alpha from a plane of radius r_P."""
    if alpha == 0:
        return r_P
    s, c = _sin_cos(r_G, r_P)
    den = math.sin(alpha) * s + math.cos(alpha) * c
    if den <= _DEGENERATE:
        return VERTICAL
    return r_G / den


def bent_plane_radius_radical(r_P: float, r_G: float, alpha: float) -> Radius:
    """The same radius written with sqrt(r_P^2 - r_G^2)."""
    if alpha == 0:
        return r_P
    den = math.sqrt(max(0.0, r_P * r_P - r_G * r_G)) * math.sin(alpha) + r_G * math.cos(alpha)
    if den <= _DEGENERATE * r_P:
        return VERTICAL
    return r_P * r_G / den


def geodesic_at_distance(d: float, r_P: float = 1.0) -> float:
    """Radius of the geodesic on a hemisphere of radius r_P that is
    orthogonal to a meridian at hyperbolic distance d from the top."""
    return r_P / math.cosh(d)


@dataclass
class DecayReport:
    alpha: float
    d: list[float]
    radius: list[float]
    ln_r_plus_d: list[float]
    slope: float  # least-squares slope of ln r against d over the tail


def single_bend_decay(alpha: float, grid: Sequence[float], tail_from: float = 3.0) -> DecayReport:
    if not 0 < alpha <= math.pi / 2:
        raise ValueError("alpha must lie in (0, pi/2]")
    ds = list(grid)
    if any(b <= a for a, b in zip(ds, ds[1:])):
        raise ValueError("grid must increase")
    rs = []
    for d in ds:
        r = bent_plane_radius(1.0, geodesic_at_distance(d), alpha)
        rs.append(math.inf if r is VERTICAL else r)
    tail = [(d, math.log(r)) for d, r in zip(ds, rs) if d >= tail_from and math.isfinite(r)]
    if len(tail) >= 2:
        x = np.array([t[0] for t in tail])
        y = np.array([t[1] for t in tail])
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = math.nan
    return DecayReport(alpha, ds, rs, [math.log(r) + d for d, r in zip(ds, rs)], slope)


# -- oracles ---------------------------------------------------------------------
# These never call the formulas above.


def _plane_chart(r_P: float, s: float, c: float) -> MobiusMap:
    """Chart of the plane of radius r_P: the real line goes to its boundary
    circle, and the imaginary axis to a geodesic G with r(G) = r_P cos(theta)."""
    e = complex(c, s)  # e^{i theta}
    return mobius_from_triple([INF, 0, -1], [-r_P * e, r_P * e.conjugate(), -r_P * 1j])


def _chart_for(r_G: float, r_P: float) -> MobiusMap:
    c = r_G / r_P
    return _plane_chart(r_P, math.sqrt(max(0.0, 1 - c * c)), c)


def oracle_radius_after_crossing(r_G: float, r_P: float, d: float, k: float) -> float:
    """Image of the vertical line over -k e^-d under the plane's chart."""
    f = _chart_for(r_G, r_P)
    return abs(f(-k * math.exp(-d)) - f(INF)) / 2


def oracle_radius_after_reverse_crossing(r_G: float, r_P: float, d: float, k: float) -> float:
    """The mirror configuration: the geodesic from -e^-d / k to 0."""
    f = _chart_for(r_G, r_P)
    return abs(f(-math.exp(-d) / k) - f(0)) / 2


def _rotate(v: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    axis = axis / np.linalg.norm(axis)
    return (v * math.cos(angle) + np.cross(axis, v) * math.sin(angle)
            + axis * np.dot(axis, v) * (1 - math.cos(angle)))


def oracle_bent_radius(r_P: float, r_G: float, alpha: float) -> Radius:
    """Rotate the sphere's normal at the peak of G about G's tangent there,
    then find where the new normal line meets the boundary plane z = 0."""
    h = math.sqrt(max(0.0, r_P * r_P - r_G * r_G))
    # G over the chord {x = h}, peak at (h, 0, r_G); the sphere is centred at 0
    peak = np.array([h, 0.0, r_G])
    normal = peak / np.linalg.norm(peak)  # outward normal of the sphere at the peak
    tangent = np.array([0.0, 1.0, 0.0])
    n2 = _rotate(normal, tangent, -alpha)  # tilt towards the vertical
    if n2[2] <= _DEGENERATE:
        return VERTICAL
    center = peak - (peak[2] / n2[2]) * n2
    return float(np.linalg.norm(peak - center))
