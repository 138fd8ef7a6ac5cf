"""Independent reference implementations used only by the tests.

Nothing here imports the package's word, measure or radius code.
"""

from __future__ import annotations

import cmath
import math
from decimal import Decimal, getcontext
from fractions import Fraction

import numpy as np


def brute_cutting_sequence(theta: Fraction, s: Fraction, x_end: int) -> str:
    """Letters of y = s + theta x for 0 < x <= x_end, by listing every grid
    crossing and sorting. ``a`` at integer x, ``b`` at integer y. Needs a
    start that avoids lattice points."""
    return brute_word_from(theta, Fraction(0), s, Fraction(x_end))


def brute_word_from(theta: Fraction, x0: Fraction, y0: Fraction, x_len: Fraction) -> str:
    """Same, for the line through (x0, y0) over x0 < x <= x0 + x_len."""
    x_end = x0 + x_len
    events = [(Fraction(i), "a") for i in range(math.floor(x0) + 1, math.floor(x_end) + 1)]
    y_end = y0 + theta * x_len
    for m in range(math.floor(y0) + 1, math.floor(y_end) + 1):
        events.append((x0 + (m - y0) / theta, "b"))
    if len({x for x, _ in events}) != len(events):
        raise ValueError("line passes through a lattice point")
    events.sort()
    return "".join(c for _, c in events)


def rational_start(q: int, l1: int) -> Fraction:
    """A generic height in the l1-th start interval from the top."""
    return 1 - Fraction(2 * l1 - 1, 2 * q)


def continued_fraction_digits(x: Fraction) -> list[int]:
    out = []
    n, d = x.numerator, x.denominator
    while d:
        a, r = divmod(n, d)
        out.append(a)
        n, d = d, r
    return out


def ceil_exp_decimal(y: int, guard: int = 40) -> int:
    """ceil(e^y) for a moderate integer y via the decimal module."""
    getcontext().prec = int(y / math.log(10)) + 1 + guard
    v = Decimal(y).exp()
    f = int(v)
    return f if Decimal(f) == v else f + 1


# -- Möbius geometry with plain complex arithmetic and numpy -------------------


def mobius_through(z, w):
    """2x2 complex matrix sending three finite points z to three finite w."""

    def to_std(a, b, c):
        # sends a->0, b->inf, c->1
        return np.array([[1, -a], [1, -b]], dtype=complex) * np.array([[(c - b)], [(c - a)]], dtype=complex)

    A, B = to_std(*z), to_std(*w)
    return np.linalg.inv(B) @ A


def apply(M, x):
    if x is None:
        return None if abs(M[1, 0]) < 1e-300 else M[0, 0] / M[1, 0]
    den = M[1, 0] * x + M[1, 1]
    if abs(den) < 1e-300:
        return None
    return (M[0, 0] * x + M[0, 1]) / den


def circle_through(a, b, c):
    """Centre and radius of the circle through three complex points."""
    ax, ay, bx, by, cx, cy = a.real, a.imag, b.real, b.imag, c.real, c.imag
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / d
    uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / d
    centre = complex(ux, uy)
    return centre, abs(a - centre)


def geodesic_radius(u: float, v: float) -> float:
    """Euclidean radius of the hyperbolic geodesic with real endpoints u, v."""
    return abs(u - v) / 2


def rotate(v, axis, angle):
    axis = axis / np.linalg.norm(axis)
    return (v * math.cos(angle) + np.cross(axis, v) * math.sin(angle)
            + axis * np.dot(axis, v) * (1 - math.cos(angle)))


def bent_radius_by_rotation(r_P: float, r_G: float, alpha: float) -> float:
    """Bend a hemisphere of radius r_P (centred at 0) about its geodesic
    sitting over the chord x = x0 (half-width r_G) by the angle alpha, with
    the rotation taken about the geodesic's top point. Returns the radius
    of the bent hemisphere, or inf when it becomes vertical."""
    x0 = math.sqrt(r_P**2 - r_G**2)
    top = np.array([x0, 0.0, r_G])
    normal = top / np.linalg.norm(top)
    tangent = np.array([0.0, 1.0, 0.0])  # geodesic direction at its top
    n2 = rotate(normal, tangent, -alpha)
    if n2[2] <= 1e-12:
        return math.inf
    # sphere through top with outward normal n2 and centre on z = 0
    t = top[2] / n2[2]
    return t
