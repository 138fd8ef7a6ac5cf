import cmath
import math
import random

import numpy as np
import pytest

from halo import hyperbolic as H
from oracles import apply, bent_radius_by_rotation, circle_through, mobius_through


def rand_point(rng):
    return complex(rng.uniform(-5, 5), rng.uniform(-5, 5))


def test_chart_example():
    r, phi = 1.0, math.pi / 4
    e = cmath.exp(1j * phi)
    f = H.mobius_from_triple([H.INF, 0, -1], [-r * e, r * e.conjugate(), -r * 1j])
    assert abs(f(H.INF) - (-r * e)) < 1e-12
    assert abs(f(0) - r * e.conjugate()) < 1e-12
    assert abs(f(-1) - (-r * 1j)) < 1e-12
    # the real line lands on the circle |z| = r
    for x in (-3.0, -0.2, 0.7, 10.0):
        assert abs(abs(f(x)) - r) < 1e-12


def test_against_numpy_matrix_oracle():
    rng = random.Random(1)
    for _ in range(200):
        z = [rand_point(rng) for _ in range(3)]
        w = [rand_point(rng) for _ in range(3)]
        f = H.mobius_from_triple(z, w)
        M = mobius_through(z, w)
        for _ in range(3):
            x = rand_point(rng)
            assert abs(f(x) - apply(M, x)) <= 1e-8 * (1 + abs(apply(M, x)))


def test_composition_law():
    rng = random.Random(2)
    for _ in range(200):
        t0, t1, t2 = ([rand_point(rng) for _ in range(3)] for _ in range(3))
        lhs = H.mobius_from_triple(t1, t2) @ H.mobius_from_triple(t0, t1)
        rhs = H.mobius_from_triple(t0, t2)
        for z in t0 + [rand_point(rng)]:
            assert abs(lhs(z) - rhs(z)) <= 1e-8 * (1 + abs(rhs(z)))


def test_inverse_and_identity():
    f = H.mobius_from_triple([0, 1, 2], [1j, 3, -2])
    g = f.inverse() @ f
    for z in (0.3, 2 + 1j, -4j):
        assert abs(g(z) - z) < 1e-12
    assert H.MobiusMap.identity()(H.INF) is H.INF


def test_cross_ratio_conventions_and_invariance():
    assert H.cross_ratio(0, 1, H.INF, 0.37) == pytest.approx(0.37)
    assert H.cross_ratio(0, 1, H.INF, -1) == pytest.approx(-1)
    rng = random.Random(3)
    for _ in range(1000):
        pts = [rand_point(rng) for _ in range(4)]
        f = H.mobius_from_triple([rand_point(rng) for _ in range(3)], [rand_point(rng) for _ in range(3)])
        before = H.cross_ratio(*pts)
        after = H.cross_ratio(*[f(p) for p in pts])
        assert abs(after - before) <= 1e-7 * (1 + abs(before))


def test_circle_images():
    # the image of the real line under a real-coefficient-free map is a circle
    f = H.mobius_from_triple([H.INF, 0, -1], [-1.5, 1.5, -1.5j])
    pts = [f(x) for x in (-2.0, 0.5, 3.0)]
    c, r = circle_through(*pts)
    assert r == pytest.approx(1.5, rel=1e-12) and abs(c) < 1e-12


def test_crossing_anchors():
    assert H.radius_after_crossing(0.6, 1.0, 2.0, 0.0).value == 0.6
    v = H.radius_after_crossing(1.0, 1.0, 1.3, 0.7).value
    assert v == pytest.approx(1 / math.sqrt(1 + 0.49 * math.exp(-2.6)), rel=1e-14)
    with pytest.raises(ValueError):
        H.radius_after_crossing(1.2, 1.0, 1.0, 0.5)


def test_crossing_bound_always_holds():
    rng = random.Random(4)
    for _ in range(500):
        rP = rng.uniform(0.1, 10)
        r = H.radius_after_crossing(rng.uniform(0.01, 1) * rP, rP, rng.uniform(0, 8), rng.uniform(0, 5))
        assert r.bound_holds and r.value >= r.bound * (1 - 1e-15)


def test_reverse_crossing_printed_form_differs():
    rG, rP, d, k = 0.5, 1.0, 1.5, 0.3
    oracle = H.oracle_radius_after_reverse_crossing(rG, rP, d, k)
    assert H.radius_after_reverse_crossing(rG, rP, d, k).value == pytest.approx(oracle, rel=1e-12)
    assert abs(H.radius_after_reverse_crossing_literal(rG, rP, d, k) - oracle) > 1e-3 * oracle


def test_bent_anchors():
    assert H.bent_plane_radius(1.7, 0.4, 0.0) == 1.7
    assert H.bent_plane_radius(1.0, 1.0, math.pi / 2) is H.VERTICAL
    for d in (1.0, 3.0, 7.0):
        r = H.bent_plane_radius(1.0, H.geodesic_at_distance(d), math.pi / 2)
        assert r == pytest.approx(1 / math.sinh(d), rel=1e-12)


def test_bent_radius_characterized():
    """The bent sphere contains G and meets the old sphere at angle alpha."""
    rng = random.Random(5)
    for _ in range(300):
        rP = rng.uniform(0.2, 4)
        rG = rng.uniform(0.05, 0.95) * rP
        alpha = rng.uniform(0.01, 1.4)
        R = H.bent_plane_radius(rP, rG, alpha)
        if R is H.VERTICAL:
            continue
        h = math.sqrt(rP * rP - rG * rG)
        # centre on the real axis through the chord's normal: R^2 = (h - c)^2 + rG^2
        c = h - math.sqrt(max(0.0, R * R - rG * rG))
        c_alt = h + math.sqrt(max(0.0, R * R - rG * rG))
        peak = np.array([h, 0.0, rG])
        n_old = peak / rP
        angles = [math.acos(np.clip(np.dot(n_old, (peak - np.array([cc, 0, 0])) / R), -1, 1)) for cc in (c, c_alt)]
        assert min(abs(a - alpha) for a in angles) < 1e-9
        assert R == pytest.approx(bent_radius_by_rotation(rP, rG, alpha), rel=1e-10)


def test_radical_form_agrees():
    rng = random.Random(6)
    for _ in range(300):
        rP = rng.uniform(0.2, 4)
        rG = rng.uniform(0.05, 1.0) * rP
        a = rng.uniform(0.0, 1.5)
        x, y = H.bent_plane_radius(rP, rG, a), H.bent_plane_radius_radical(rP, rG, a)
        assert (x is H.VERTICAL) == (y is H.VERTICAL)
        if x is not H.VERTICAL:
            assert x == pytest.approx(y, rel=1e-12)


def test_single_bend_decay_rejects_bad_input():
    with pytest.raises(ValueError):
        H.single_bend_decay(0.0, [1, 2])
    with pytest.raises(ValueError):
        H.single_bend_decay(0.5, [2, 1])


def test_plane_json():
    p = H.PlaneSphere(1 + 2j, 3.0)
    assert p.to_json() == {"cx": 1.0, "cy": 2.0, "r": 3.0}
    assert H.PlaneSphere(0j, H.VERTICAL).to_json()["r"] is None
