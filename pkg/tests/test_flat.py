import math
from fractions import Fraction

import numpy as np
import pytest

from halo import flat
from halo.numeric import contfrac
from halo.numeric.quadratic import QuadraticNumber, exact_sign
from halo.words import same_tail

SQRT2 = QuadraticNumber.sqrt(2)


def measure_by_rotation(dx, dy, theta, kappa=1.0):
    """Rotate so leaves are horizontal; the measure is kappa |dy'|."""
    a = -math.atan(theta)
    rot = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
    return kappa * abs((rot @ np.array([dx, dy]))[1])


def test_measure_example():
    fol = flat.Foliation(Fraction(1))
    seg = flat.Segment(flat.FlatPoint(0, 0), flat.FlatPoint(1, 0))
    m = flat.transverse_measure(seg, fol)
    assert float(m) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert m.compare(Fraction(7071, 10000)) > 0 and m.compare(Fraction(7072, 10000)) < 0


@pytest.mark.parametrize("seed", range(5))
def test_measure_against_rotation(seed):
    rng = np.random.default_rng(seed)
    theta, kappa = rng.uniform(0.1, 5), rng.uniform(0.5, 2)
    fol = flat.Foliation(theta, kappa)
    for _ in range(50):
        dx, dy = rng.normal(size=2)
        seg = flat.Segment(flat.FlatPoint(0.0, 0.0), flat.FlatPoint(dx, dy))
        assert float(flat.transverse_measure(seg, fol)) == pytest.approx(measure_by_rotation(dx, dy, theta, kappa), rel=1e-12)


def test_leaf_segment_has_zero_measure():
    fol = flat.Foliation(SQRT2)
    seg = flat.Segment(flat.FlatPoint(0, 0), flat.FlatPoint(3, 3 * SQRT2), flat.SegmentKind.LEAF, SQRT2)
    assert flat.transverse_measure(seg, fol).is_zero()
    with pytest.raises(ValueError):
        flat.Segment(flat.FlatPoint(0, 0), flat.FlatPoint(1, 1), flat.SegmentKind.LEAF, SQRT2)


def test_straight_ray_growth_is_linear():
    fol = flat.Foliation(2.0)
    for phi in (0.3, 1.2, 2.5, 4.0):
        ray = flat.straight_ray(phi, 50.0, fol)
        expect = abs(math.sin(phi - math.atan(2.0)))
        for t in (1.0, 17.5, 50.0):
            assert ray.measure_at(t) == pytest.approx(expect * t, rel=1e-12)
        series = flat.growth_series(ray, fol, 50.0, grid=20)
        assert series.certified and series.to_csv().startswith("t,I\n")


def test_sweep_is_seeded_and_near_2_over_pi():
    fol = flat.Foliation(SQRT2)
    a = flat.crossing_rate_sweep(2000, fol, seed=3)
    b = flat.crossing_rate_sweep(2000, fol, seed=3)
    assert np.array_equal(a.rates, b.rates)
    assert a.relative_error < 0.05
    # ray i does not depend on how many rays were drawn
    assert np.array_equal(flat.ray_directions(10, 7)[:5], flat.ray_directions(5, 7))


def test_leaf_approx_example():
    a = flat.build_leaf_approx(SQRT2, 2)
    assert (a.p, a.q, a.q_next, a.run) == (7, 5, 12, 9)
    bound = 2 * 5 * (SQRT2 - Fraction(7, 5))
    assert a.alpha.compare(bound) <= 0
    assert exact_sign(a.alpha_upper - bound) == 0
    assert a.c * 5 <= a.d <= a.C * 5
    assert a.word.verified


def test_leaf_approx_bounds_many_k():
    cf = contfrac.cf_expand(SQRT2)
    for k in range(2, 16):
        a = flat.build_leaf_approx(SQRT2, k, kappa=Fraction(3, 2), with_word=False)
        assert a.alpha.compare(Fraction(3, 2) * 2 / cf.q(k + 1)) < 0


def test_too_coarse_convergent():
    with pytest.raises(ValueError, match="increase k"):
        flat.build_leaf_approx((1 + QuadraticNumber.sqrt(5)) / 2, 0)  # 2 |phi - 1| > 1


def test_cesag_verdicts():
    desk = contfrac.well_approximated_cf("desk")
    seq = [flat.leaf_approx_from_cf(desk, k) for k in range(2, 9)]
    assert flat.classify_cesag(seq, "exp:0.2").verdict == "CESAG"
    sq = [flat.build_leaf_approx(SQRT2, k, with_word=False) for k in range(2, 12)]
    rep = flat.classify_cesag(sq, "exp:0.2")
    assert rep.verdict == "not CESAG" and not rep.fg_to_zero
    assert flat.classify_cesag(seq[:1], "exp:0.2").verdict == "inconclusive"


def test_exotic_ray_small():
    ray = flat.assemble_exotic_ray(SQRT2, [1, 2, 3, 4, 5])
    assert ray.crossings() == 5
    assert ray.total_measure.less_than(ray.measure_bound())
    poly = ray.polygon()
    assert poly.crossings() == 5
    assert float(poly.total_measure()) == pytest.approx(float(ray.total_measure), rel=1e-12)
    assert ray.tail_windows_marked()
    assert len(ray.markers()) == 5


def test_exotic_ray_thinning():
    ray = flat.assemble_exotic_ray(SQRT2, range(1, 15))
    raws = [a.alpha.raw for a in ray.pieces]
    for i, r in enumerate(raws[:-1]):
        rest = sum(raws[i + 1 :], 0)
        assert exact_sign(r - 3 * rest) > 0


def test_exotic_ray_tails():
    evens = flat.assemble_exotic_ray(SQRT2, range(2, 40, 2)).code()
    shifted = flat.assemble_exotic_ray(SQRT2, range(6, 40, 2)).code()
    odds = flat.assemble_exotic_ray(SQRT2, range(1, 40, 2)).code()
    assert same_tail(evens, shifted, 12) == "same"
    assert same_tail(evens, odds, 12) == "different"


def test_exotic_ray_rejects_bad_input():
    with pytest.raises(ValueError):
        flat.assemble_exotic_ray(SQRT2, [3, 2])
    with pytest.raises(ValueError):
        flat.assemble_exotic_ray(Fraction(3, 2), [1])


def test_sublinear_sqrt():
    s = flat.sublinear_ray("sqrt", 1e4)
    assert s.d[:5] == pytest.approx([1, 3, 5, 7, 9])
    for t in (150.0, 999.0, 5000.0):
        assert abs(s.ray.measure_at(t) - math.floor(math.sqrt(t))) <= 1 + 1e-9


def test_sublinear_log():
    s = flat.sublinear_ray("log1p", 1e5)
    for n in range(1, 6):
        assert s.d[n - 1] == pytest.approx(math.e**n - math.e ** (n - 1), rel=1e-9)
    for t in np.geomspace(100, 1e5, 50):
        assert 0.5 <= s.ray.measure_at(t) / math.log(t) <= 2


def test_linear_rejected():
    with pytest.raises(ValueError):
        flat.sublinear_ray("linear", 1e4)
