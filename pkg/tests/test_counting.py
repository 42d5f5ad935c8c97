from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonorient.counting import (ball_counts, bx_identity_check_n12, bx_truncated_sum, count_upto,
                                fit_exponent, geometric_grid, nonincreasing_decay, nu_L,
                                simplex_moment, simplex_moment_mc, top_window)
from nonorient.geodesics import CountSeries


def series(lengths, top=None):
    ls = tuple(sorted(lengths))
    return CountSeries(ls, "synthetic", True, top if top is not None else ls[-1])


def planted(c, p, jmax=8):
    """Lengths with N(2^j) = c * 2^(p j) exactly on the dyadic grid."""
    out, prev = [], 0
    for j in range(jmax + 1):
        n = c * 2 ** (p * j)
        out += [float(2 ** j)] * (n - prev)
        prev = n
    return series(out)


def test_count_upto_examples():
    s = series([1.0, 2.0, 3.0])
    assert count_upto(s, 2.5) == 2
    assert count_upto(s, 0.5) == 0
    assert count_upto(series([1.0, 2.0]), 2.0) == 2
    with pytest.raises(ValueError):
        count_upto(s, -1)


def test_nu_examples():
    s = series([float(i) for i in range(1, 1001)])
    assert nu_L(s, 100, 1) == 1.0
    assert nu_L(s, 100, 2) == pytest.approx(0.01)


def test_planted_exponents():
    grid = [2.0 ** j for j in range(9)]
    assert fit_exponent(planted(7, 2), grid).slope == pytest.approx(2.0, abs=1e-6)
    assert fit_exponent(planted(3, 1), grid).slope == pytest.approx(1.0, abs=1e-6)
    f = fit_exponent(planted(7, 2), grid)
    assert f.constant == pytest.approx(7.0, rel=1e-6) and f.points == 9 and f.r2 == pytest.approx(1)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 9), st.integers(1, 2))
def test_fit_recovers_planted_exponent(c, p):
    grid = [2.0 ** j for j in range(9)]
    assert fit_exponent(planted(c, p), grid).slope == pytest.approx(p, abs=1e-6)


def test_fit_window_errors():
    with pytest.raises(ValueError, match="too small"):
        fit_exponent(series([1.0, 2.0]), [1.0, 2.0])


def test_grid_and_window():
    g = geometric_grid(1.0, 16.0)
    assert g[-1] == 16.0 and g[0] == pytest.approx(1.0)
    assert np.allclose(g[1:] / g[:-1], 2 ** 0.25)
    s = series([float(i) for i in range(1, 1001)], top=1000.0)
    assert top_window(s, 1.0) == (100.0, 1000.0)
    assert top_window(s) == (10.0, 1000.0)


def test_ball_counts_decay_for_linear_growth():
    s = series([float(i) for i in range(1, 10001)])
    bc = ball_counts(s, 2)
    assert all(b >= a for a, b in zip(bc.counts, bc.counts[1:]))
    assert nonincreasing_decay(bc.nu)
    assert not nonincreasing_decay([1.0, 2.0, 0.1])
    assert not nonincreasing_decay([1.0, 0.9])


def test_simplex_examples():
    assert simplex_moment([2.0], 1, 1.0) == pytest.approx(0.5)
    assert simplex_moment([1.0, 1.0], 2, 1.0) == pytest.approx(0.5)
    assert simplex_moment([1.3, 0.4], 4, 2.0) == pytest.approx(2 ** 4 * simplex_moment([1.3, 0.4], 4, 1.0))
    with pytest.raises(ValueError, match="overdetermined"):
        simplex_moment([1.0, 1.0, 1.0], 2, 1.0)


def test_simplex_monte_carlo_small():
    val, err = simplex_moment_mc([1.0, 1.0], 2, 1.0, 200_000, seed=3)
    assert abs(val - 0.5) < 4 * err


def test_bx_examples():
    assert bx_identity_check_n12(1, 2, 10) <= 1 / 10
    assert bx_identity_check_n12(1, 2, 10) == 0.0  # 15 / 10 = 1.5 exactly
    assert bx_identity_check_n12(1, 1, 1e4) <= 2e-4
    with pytest.raises(ValueError, match="invalid lengths"):
        bx_identity_check_n12(1, 0, 10)


def test_bx_truncated_sum():
    total, smallest = bx_truncated_sum([((1.0,), 1.0), ((2.0,), 1.0)], 1)
    assert total == pytest.approx(1.5) and smallest == pytest.approx(0.5)
    assert bx_truncated_sum([], 2) == (0.0, math.inf)


@given(st.lists(st.floats(0.01, 100), min_size=1, max_size=50), st.floats(0, 200), st.floats(0, 50))
def test_count_upto_monotone(ls, a, b):
    s = series(ls)
    assert count_upto(s, a) <= count_upto(s, a + b)
