from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonorient.surface import builtin_model, sys_minus
from nonorient.volume import (FNChart, batch_sys_minus, closed_form_volume, default_cap,
                              divergence_order, divergence_profile, divergence_slope,
                              integrate_chart, log_sinh, model_chart, norbury_density,
                              sys_region_volume, sys_region_volumes, _sample_chart)


def one(lo, hi):
    return FNChart((("l", (lo, hi)),))


def test_single_coordinate_unit_interval():
    # log sinh(1) - log sinh(delta) with delta -> 1e-12
    v = integrate_chart(one(1e-12, 1.0)).value
    assert v == pytest.approx(math.log(math.sinh(1.0)) - math.log(math.sinh(1e-12)), rel=1e-10)
    assert integrate_chart(one(0.5, 1.0)).value == pytest.approx(
        math.log(math.sinh(1.0) / math.sinh(0.5)), rel=1e-12)


def test_density():
    c = FNChart((("l", (0.1, 2.0)),), (("m", (0.0, 1.0), None),))
    assert norbury_density(c, {"l": 1.0, "m": 0.5}) == pytest.approx(1.31303528549933, rel=1e-12)
    with pytest.raises(ValueError, match="outside chart"):
        norbury_density(c, {"l": 0.0, "m": 0.5})


def test_log_sinh_large():
    assert float(log_sinh(800.0)) == pytest.approx(800 - math.log(2))
    assert float(log_sinh(0.3)) == pytest.approx(math.log(math.sinh(0.3)))


def test_quadrature_matches_closed_form():
    c = FNChart((("a", (0.05, 3.0)), ("b", (0.2, 1.0))), (("m", (0.5, 2.0), None),))
    q = integrate_chart(c, budget=64)
    assert q.value == pytest.approx(closed_form_volume(c), rel=1e-12)
    assert q.error < 1e-9


def test_monte_carlo_within_three_sigma():
    c = FNChart((("a", (0.05, 3.0)),), (("m", (0.5, 2.0), (0.0, 1.0)),))
    mc = integrate_chart(c, "monte_carlo", 200_000, seed=11)
    assert abs(mc.value - closed_form_volume(c)) < 3 * mc.error
    assert mc.seed == 11 and mc.method == "monte_carlo"


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.01, 2.0), st.floats(0.01, 2.0))
def test_additivity(lo, d1, d2):
    a = integrate_chart(one(lo, lo + d1)).value + integrate_chart(one(lo + d1, lo + d1 + d2)).value
    assert a == pytest.approx(integrate_chart(one(lo, lo + d1 + d2)).value, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.1, 4.0))
def test_twist_range_scales_volume(hi, scale):
    base = FNChart((("a", (0.1, 1.0)),), (("m", (0.0, hi), (0.0, 1.0)),))
    wide = FNChart((("a", (0.1, 1.0)),), (("m", (0.0, hi), (0.0, scale)),))
    assert integrate_chart(wide).value == pytest.approx(scale * integrate_chart(base).value, rel=1e-12)


def test_unbounded_and_bad_charts():
    with pytest.raises(ValueError, match="unbounded"):
        integrate_chart(one(0.0, 1.0))
    with pytest.raises(ValueError, match="unbounded"):
        integrate_chart(one(0.1, math.inf))
    with pytest.raises(ValueError):
        one(1.0, 0.5)
    with pytest.raises(ValueError, match="decreasing"):
        divergence_profile([1e-3, 1e-2], one(0.1, 1.0))


def test_divergence_slope_and_order():
    deltas = [10.0 ** -k for k in range(2, 7)]
    prof = divergence_profile(deltas, one(0.1, 1.0))
    assert divergence_slope(prof) == pytest.approx(1.0, rel=1e-3)
    two = FNChart((("a", (0.1, 4.0)), ("b", (0.1, 4.0))))
    assert divergence_order(divergence_profile(deltas, two), 4.0) == pytest.approx(2.0, rel=1e-9)


def test_default_cap_and_chart():
    assert default_cap("N21") == pytest.approx(12.0)
    c = model_chart("N21", 0.1, 4.0)
    assert [r for _, r in c.one_sided] == [(0.1, 4.0), (0.1, 4.0)]


def test_sampler_weights_match_chart_volume():
    params, weight = _sample_chart("N21", 0.1, 4.0, 10, 0)
    assert weight == pytest.approx(closed_form_volume(model_chart("N21", 0.1, 4.0)))
    assert all(np.all((params[k] >= 0.1 - 1e-12) & (params[k] <= 4.0 + 1e-12)) for k in ("la", "lb"))


@pytest.mark.parametrize("model", ["N21", "N3", "N13"])
def test_batch_sys_minus_matches_pointwise(model):
    params, _ = _sample_chart(model, 0.3, 3.0, 3, 5)
    batch = batch_sys_minus(model, params, 5)
    for i in range(3):
        rep = builtin_model(model, {k: float(v[i]) for k, v in params.items()})
        assert batch[i] == pytest.approx(sys_minus(rep, 5).length, rel=1e-9)


def test_sys_region_monotone_and_certified_on_n21():
    vs = sys_region_volumes("N21", [0.05, 0.1, 0.2], cap=4.0, samples=4000, seed=2)
    values = [v.value for v in vs]
    assert values[0] >= values[1] >= values[2]
    assert all(v.certified for v in vs)
    # N21 with one-sided coordinates in the box: the region is the whole box
    assert values[0] == pytest.approx(closed_form_volume(model_chart("N21", 0.05, 4.0)), rel=1e-12)
    exact = closed_form_volume(model_chart("N21", 0.1, 4.0))
    assert abs(values[1] - exact) < 3 * vs[1].error
    single = sys_region_volume("N21", 0.1, cap=4.0, samples=4000, seed=2)
    assert single.value > 0 and single.extra["eps"] == 0.1
    with pytest.raises(ValueError):
        sys_region_volume("N21", 0.0)
    with pytest.raises(ValueError, match="cap"):
        sys_region_volume("N21", 5.0, cap=4.0)
