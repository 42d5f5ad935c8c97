from __future__ import annotations

import math

import pytest
from hypothesis import given, settings, strategies as st

from nonorient.collar import (Calibration, CollarParams, arc_length, calibrate,
                              self_intersections_closed_form, self_intersections_geometric,
                              self_intersections_klein, verify_collar_inequality)
from nonorient.hypgeo import GeometryError


def test_closed_form_values():
    table = {-6: 2, -5: 2, -4: 1, -3: 1, -2: 0, -1: 0, 0: 0, 1: 1, 2: 1, 3: 2, 4: 2, 5: 3, 6: 3}
    assert {k: self_intersections_closed_form(k) for k in table} == table


def test_collar_geometry():
    p = CollarParams(1.0, 0.5)
    assert p.boundary_length == pytest.approx(2 * math.cosh(0.5))
    assert math.sin(p.ray_angle) == pytest.approx(1 / math.cosh(0.5))
    g = p.glide()
    assert g.det == -1
    with pytest.raises(ValueError):
        CollarParams(0.0, 1.0)


def test_geometric_count_is_half_translates():
    p = CollarParams(1.0, 0.5)
    # the geometric index m gives floor(|m| / 2) double points
    assert [self_intersections_geometric(p, m) for m in range(-4, 5)] == [2, 1, 1, 0, 0, 0, 1, 1, 2]
    with pytest.raises(ValueError):
        self_intersections_geometric(p, 5, j_window=3)


def test_klein_cross_check_on_short_arcs():
    for core, width in ((0.5, 0.3), (1.0, 0.5), (2.0, 1.0)):
        p = CollarParams(core, width)
        for m in range(-5, 6):
            if abs(m) * core > 6:
                continue  # float Klein coordinates cannot resolve longer arcs
            assert self_intersections_klein(p, m) == self_intersections_geometric(p, m)


def test_calibration_and_report():
    p = CollarParams(1.0, 0.5)
    assert calibrate(p) == Calibration(1, 1)
    rep = verify_collar_inequality(p, (-10, 10))
    assert rep.ok and len(rep.rows) == 21
    assert rep.min_margin > 0


def test_degenerate_arc():
    assert arc_length(CollarParams(1.0, 0.5), 0) > 0
    # G maps q to p when q sits one core length further down its ray
    bad = CollarParams(1.0, 0.5, p_offset=0.0, q_offset=-1.0)
    with pytest.raises(GeometryError, match="degenerate"):
        arc_length(bad, 1)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.1, 2.0), st.integers(-25, 25))
def test_inequality_property(core, width, k):
    p = CollarParams(core, width)
    m = k + 1
    i = self_intersections_closed_form(k)
    assert i == self_intersections_geometric(p, m)
    bound = (p.boundary_length + 2 * width) / (2 * core) + 1
    assert abs(i - arc_length(p, m) / (2 * core)) <= bound
