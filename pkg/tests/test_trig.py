import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overlaplab.trig import TrigSum, TrigTerm, parse_trig_sum


def test_default_is_resonant_cosine():
    f = TrigSum.default()
    assert f.terms == (TrigTerm(1.0, 1, 2, 1, 0.0),)
    assert f.value(0.0, 0.0, 0.0) == pytest.approx(1.0)


def test_parse_reference_forcing():
    f = parse_trig_sum("1.0*cos(x+2y+t)")
    assert f.terms == (TrigTerm(1.0, 1, 2, 1, 0.0),)


def test_parse_sums_signs_and_phases():
    f = parse_trig_sum("-cos(2x-3t+pi/2) + 0.25*sin(y)")
    t1, t2 = f.terms
    assert (t1.c, t1.a, t1.b, t1.m) == (-1.0, 2, 0, -3)
    assert t1.phi == pytest.approx(math.pi / 2)
    assert (t2.c, t2.a, t2.b, t2.m) == (0.25, 0, 1, 0)
    assert t2.phi == pytest.approx(-math.pi / 2)   # sin folded into phase


def test_sin_equals_phase_shifted_cos():
    f = parse_trig_sum("sin(x)")
    xs = np.linspace(-3, 3, 17)
    assert np.allclose(f.value(xs, 0.0, 0.0), np.sin(xs), atol=1e-15)


def test_parse_rejects_garbage():
    for bad in ("cos(x", "tan(x)", "cos(1.5x)", "x+y"):
        with pytest.raises(ValueError):
            parse_trig_sum(bad)


def test_text_round_trip():
    f = parse_trig_sum("0.5*cos(x+2y+t) - 2*sin(3x-y+2t+0.3)")
    again = TrigSum.from_text(f.to_text())
    assert again == f


def test_from_text_rejects_short_lines():
    with pytest.raises(ValueError):
        TrigSum.from_text("1.0 1 2\n")


terms_strategy = st.lists(
    st.tuples(
        st.floats(-3, 3, allow_nan=False).filter(lambda c: abs(c) > 1e-3),
        st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3),
        st.floats(-3, 3, allow_nan=False)),
    min_size=1, max_size=4).map(
        lambda ts: TrigSum(tuple(TrigTerm(*t) for t in ts)))


@given(terms_strategy, st.floats(-3, 3, allow_nan=False),
       st.floats(-3, 3, allow_nan=False), st.floats(-3, 3, allow_nan=False))
@settings(max_examples=60, deadline=None)
def test_derivatives_match_finite_differences(f, x, y, t):
    h = 1e-6
    for name, fd in (
        ("dx", (f.value(x + h, y, t) - f.value(x - h, y, t)) / (2 * h)),
        ("dy", (f.value(x, y + h, t) - f.value(x, y - h, t)) / (2 * h)),
        ("dt", (f.value(x, y, t + h) - f.value(x, y, t - h)) / (2 * h)),
    ):
        assert getattr(f, name)(x, y, t) == pytest.approx(fd, abs=2e-5)


@given(terms_strategy, st.floats(-3, 3, allow_nan=False),
       st.floats(-3, 3, allow_nan=False), st.floats(-3, 3, allow_nan=False))
@settings(max_examples=40, deadline=None)
def test_two_pi_periodicity(f, x, y, t):
    base = f.value(x, y, t)
    assert f.value(x + 2 * math.pi, y, t) == pytest.approx(base, abs=1e-9)
    assert f.value(x, y + 2 * math.pi, t) == pytest.approx(base, abs=1e-9)
    assert f.value(x, y, t + 2 * math.pi) == pytest.approx(base, abs=1e-9)


@given(terms_strategy)
@settings(max_examples=40, deadline=None)
def test_serialization_round_trip(f):
    again = TrigSum.from_text(f.to_text())
    assert len(again.terms) == len(f.terms)
    for a, b in zip(again.terms, f.terms):
        assert a.c == pytest.approx(b.c)
        assert (a.a, a.b, a.m) == (b.a, b.b, b.m)
        assert a.phi == pytest.approx(b.phi)


def test_second_derivatives():
    f = parse_trig_sum("cos(2x+3y-t)")
    x, y, t = 0.4, -0.7, 1.1
    arg = 2 * x + 3 * y - t
    assert f.dxx(x, y, t) == pytest.approx(-4 * math.cos(arg))
    assert f.dxy(x, y, t) == pytest.approx(-6 * math.cos(arg))
    assert f.dyy(x, y, t) == pytest.approx(-9 * math.cos(arg))


def test_scaled_and_plus():
    f = TrigSum.default()
    g = f.scaled(2.0).plus(parse_trig_sum("cos(x)"))
    assert g.value(0, 0, 0) == pytest.approx(3.0)
