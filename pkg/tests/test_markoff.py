from __future__ import annotations

import math

import pytest
from hypothesis import given, settings, strategies as st

from nonorient.markoff import (MarkoffConfig, calibrate_lengths, markoff_bruteforce, markoff_orbit, orbit_lengths,
                               permutations_count, satisfies, tuple_length, vieta_move)

# Markoff numbers up to 1000 (largest coordinates of Markoff triples)
MARKOFF_NUMBERS = [1, 2, 5, 13, 29, 34, 89, 169, 194, 233, 433, 610, 985]


def test_markoff_numbers():
    orbit = markoff_orbit(MarkoffConfig(3), 1000)
    assert sorted({t[-1] for t in orbit}) == MARKOFF_NUMBERS
    assert len(orbit) == 13
    assert (2, 169, 985) in orbit


def test_quadruple_start():
    orbit = markoff_orbit(MarkoffConfig(4), 300)
    assert orbit == [(2, 2, 2, 2), (2, 2, 2, 6), (2, 2, 6, 22), (2, 2, 22, 82), (2, 6, 22, 262)]
    assert all(satisfies(t, 1) for t in orbit)


def test_vieta_moves():
    assert vieta_move((1, 1, 1), 2) == (1, 1, 2)
    assert vieta_move((1, 2, 5), 2) == (1, 1, 2)
    assert vieta_move((1, 2, 5), 0) == (2, 5, 29)
    with pytest.raises(ValueError, match="left positive cone"):
        vieta_move((1, 1, 1), 0, k=1)


def test_config_checks():
    with pytest.raises(ValueError):
        MarkoffConfig(3, seeds=((1, 2, 3),))
    with pytest.raises(ValueError):
        MarkoffConfig(2)
    with pytest.raises(ValueError, match="bound below"):
        markoff_orbit(MarkoffConfig(4), 1)
    with pytest.raises(ValueError, match="too large"):
        markoff_bruteforce(MarkoffConfig(3), 10 ** 6)
    assert MarkoffConfig(3).trace_scale == 3 and MarkoffConfig(4).trace_scale == 1


@pytest.mark.parametrize("arity,bound", [(3, 1), (3, 50), (3, 400), (4, 30), (4, 500)])
def test_orbit_equals_bruteforce(arity, bound):
    conf = MarkoffConfig(arity)
    assert set(markoff_orbit(conf, bound)) == set(markoff_bruteforce(conf, bound))


def test_lengths():
    assert tuple_length((1, 1, 1), 3) == pytest.approx(2 * math.acosh(1.5))
    assert tuple_length((2, 2, 2, 2), 1) == 0.0
    s = orbit_lengths(MarkoffConfig(4), 300)
    # (2,2,2,2) has length zero and is dropped; the rest are counted per ordering
    assert len(s.lengths) == 4 + 12 + 12 + 24
    assert permutations_count((2, 2, 6, 22)) == 12
    assert s.complete_to == pytest.approx(tuple_length((300,)))
    assert len(orbit_lengths(MarkoffConfig(4), 300, ordered=False).lengths) == 4


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 400))
def test_orbit_members_satisfy_equation(bound):
    conf = MarkoffConfig(3)
    orbit = markoff_orbit(conf, bound)
    assert all(satisfies(t, 3) and t == tuple(sorted(t)) and t[-1] <= bound for t in orbit)
    # every move stays in the orbit or leaves the bound
    for t in orbit:
        for i in range(3):
            u = vieta_move(t, i)
            assert u in orbit or u[-1] > bound


def test_calibrate_lengths():
    xs = [1.0, 2.0, 3.5, 4.0, 7.0]
    cal = calibrate_lengths(xs, [2 * x + 0.5 for x in reversed(xs)])
    assert cal.scale == pytest.approx(2.0) and cal.offset == pytest.approx(0.5)
    assert cal.r2 == pytest.approx(1.0) and cal.pairs == 5
    with pytest.raises(ValueError):
        calibrate_lengths([1.0, 2.0], [1.0, 2.0])
