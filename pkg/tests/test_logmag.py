import math

from hypothesis import given, strategies as st

from halo.numeric.logmag import LogMagnitude, as_logmag, exp_up, log_down

ints = st.integers(min_value=1, max_value=10**400)


@given(ints, ints)
def test_sum_and_product_enclose(a, b):
    s = LogMagnitude.from_int(a) + LogMagnitude.from_int(b)
    p = LogMagnitude.from_int(a) * LogMagnitude.from_int(b)
    for m, exact in ((s, a + b), (p, a * b)):
        e = LogMagnitude.from_int(exact)
        assert m.compare(e) == 0  # never certainly different from the truth
        lo, hi = m.ln_bounds()
        ln = math.log(exact)
        assert lo <= ln * (1 + 1e-12) + 1e-12 and ln <= hi * (1 + 1e-12) + 1e-12


@given(ints, ints)
def test_compare_is_conservative(a, b):
    c = LogMagnitude.from_int(a).compare(LogMagnitude.from_int(b))
    if c > 0:
        assert a > b
    if c < 0:
        assert a < b


def test_deep_tower_comparison():
    x = LogMagnitude.from_log(1e6, 1e6 + 1).exp()  # e^(e^(1e6))
    y = LogMagnitude.from_log(2e6, 2e6 + 1).exp()
    assert x.compare(y) == -1 and y.compare(x) == 1
    assert x.compare(10**300) == 1


def test_outward_rounding_helpers():
    for v in (0.1, 1.0, 37.5, 700.0):
        assert exp_up(v) >= math.exp(v)
        assert log_down(v) <= math.log(v)


def test_json_keys():
    d = as_logmag(10**500).to_json()
    assert d["ln_lower"] <= 500 * math.log(10) <= d["ln_upper"]
    assert LogMagnitude.from_json(d).compare(10**500) == 0
