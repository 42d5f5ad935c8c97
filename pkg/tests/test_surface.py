from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonorient.hypgeo import GeometryError, classify, translation_length
from nonorient.surface import (MODELS, SurfaceDescriptor, attach_crosscap, build_pants,
                               builtin_model, curve_length, dim_ml, glide_sqrt_quad,
                               holonomy_of_word, mp_namespace, pants_glides, pants_quads, qmul,
                               qtr, sys_minus)

lengths = st.floats(0.1, 4.0)


def two_sided_ab(la, lb, boundary):
    """|tr(ab)| for glides of lengths la, lb along axes at distance d, by hand.

    With a = diag(e^p, -e^-p), b = T diag(e^-q, -e^q) T^-1 and T the
    translation by d: tr(ab) = (cosh d + 1) cosh(p - q) + (cosh d - 1) cosh(p + q).
    """
    cd = (math.cosh(boundary / 2) + math.cosh(la) * math.cosh(lb)) / (math.sinh(la) * math.sinh(lb))
    tr = (cd + 1) * math.cosh((la - lb) / 2) + (cd - 1) * math.cosh((la + lb) / 2)
    return 2 * math.acosh(tr / 2)


def test_pants_lengths():
    x, y = pants_quads(1.0, 2.0, 3.0)
    for q, ell in ((x, 1.0), (y, 2.0), (qmul(x, y), 3.0)):
        assert 2 * math.acosh(abs(qtr(q)) / 2) == pytest.approx(ell, rel=1e-12)
        assert qtr(q) < 0


def test_glide_roots_agree():
    x, y = pants_quads(1.3, 0.7, 2.2)
    a, b = pants_glides(1.3, 0.7, 2.2)
    for root, direct, base in ((glide_sqrt_quad(x), a, x), (glide_sqrt_quad(y), b, y)):
        assert np.allclose(root, direct) or np.allclose(root, [-v for v in direct])
        sq = qmul(direct, direct)
        assert np.allclose(sq, [-v for v in base])


def test_builtin_defaults():
    r = builtin_model("N21")
    assert curve_length(r, "a") == pytest.approx(1.0, abs=1e-12)
    assert curve_length(r, "b") == pytest.approx(1.0, abs=1e-12)
    assert curve_length(r, "aabb") == pytest.approx(2.0, abs=1e-12)
    assert r.sided("a") == "one_sided" and r.sided("ab") == "two_sided"
    assert r.surface == SurfaceDescriptor(False, 2, 1, (2.0,))
    assert r.surface.euler_characteristic == -1


@pytest.mark.parametrize("la,lb,bd", [(1.0, 1.0, 2.0), (0.6, 1.7, 2.9), (2.5, 0.3, 0.8)])
def test_two_sided_length_matches_hand_formula(la, lb, bd):
    r = builtin_model("N21", la=la, lb=lb, boundary=bd)
    assert curve_length(r, "ab") == pytest.approx(two_sided_ab(la, lb, bd), rel=1e-10)


def test_frozen_two_sided_length():
    # N21 at its default point: independently computed value of the two-sided curve ab
    assert curve_length(builtin_model("N21"), "ab") == pytest.approx(3.752674320642786, rel=1e-12)


@pytest.mark.parametrize("name", sorted(MODELS))
def test_relations_hold(name):
    assert builtin_model(name).relation_residual() < 1e-8


def test_n13_twist_and_boundaries():
    r = builtin_model("N13", twist=0.7, lc=1.3, b1=1.1, b2=2.2, b3=2.6)
    assert r.relation_residual() < 1e-8
    for key, w in r.boundary_words.items():
        assert curve_length(r, w) == pytest.approx(r.params[key], rel=1e-9)
    assert curve_length(r, "z") == pytest.approx(1.3, rel=1e-10)
    other = builtin_model("N13", twist=1.9, lc=1.3, b1=1.1, b2=2.2, b3=2.6)
    assert curve_length(r, "au") != pytest.approx(curve_length(other, "au"))


def test_n12_curves():
    r = builtin_model("N12", la=0.8, b1=1.5, b2=2.5)
    assert curve_length(r, "a") == pytest.approx(0.8, rel=1e-12)
    assert r.sided("d") == "one_sided"
    assert curve_length(r, "Ad") == pytest.approx(1.5, rel=1e-12)
    assert curve_length(r, "ad") == pytest.approx(2.5, rel=1e-12)


def test_builtin_errors():
    with pytest.raises(ValueError, match="parameter mismatch"):
        builtin_model("N21", lc=1.0)
    with pytest.raises(KeyError):
        builtin_model("N7")
    with pytest.raises(GeometryError):
        builtin_model("N21", la=-1.0)
    with pytest.raises(KeyError, match="unknown generator"):
        holonomy_of_word(builtin_model("N21"), "az")


def test_mpmath_rebuild_agrees():
    r = builtin_model("N13", twist=0.4)
    hp = r.quads(mp_namespace(40))
    for k, g in r.generators.items():
        m = np.array([[float(v) for v in hp[k][:2]], [float(v) for v in hp[k][2:]]])
        assert np.allclose(m, g.m, atol=1e-12) or np.allclose(m, -g.m, atol=1e-12)


def test_pants_and_crosscap():
    p = build_pants(1.0, 2.0, 3.0)
    assert p.relation_residual() < 1e-12
    assert p.surface.euler_characteristic == -1
    with pytest.raises(GeometryError, match="invalid pants"):
        build_pants(0.0, 1.0, 1.0)
    n = attach_crosscap(p, "x", 0.5, "a")
    assert classify(n.generators["a"]) == "glide"
    assert translation_length(n.generators["a"]) == pytest.approx(0.5, rel=1e-12)
    assert n.surface.orientable is False and n.surface.genus == 1 and n.surface.r == 2
    assert n.relation_residual() < 1e-10
    with pytest.raises(GeometryError, match="mismatch"):
        attach_crosscap(p, "x", 0.7, "c")


def test_dim_ml():
    assert dim_ml(2, 1) == 2
    assert dim_ml(3, 0) == 3
    assert dim_ml(1, 3) == 3
    assert dim_ml(1, 1, orientable=True) == 2
    with pytest.raises(ValueError):
        dim_ml(1, 1)


def test_sys_minus():
    s = sys_minus(builtin_model("N21", la=0.4, lb=0.9))
    assert s.length == pytest.approx(0.4, rel=1e-12) and s.word == "a" and s.certified
    with pytest.raises(GeometryError, match="orientable"):
        sys_minus(build_pants(1.0, 1.0, 1.0))


@settings(max_examples=60, deadline=None)
@given(lengths, lengths, lengths)
def test_n3_relation_and_lengths_fuzz(la, lb, lc):
    r = builtin_model("N3", la=la, lb=lb, lc=lc)
    assert r.relation_residual() < 1e-8
    for w, ell in (("a", la), ("b", lb), ("c", lc)):
        assert curve_length(r, w) == pytest.approx(ell, rel=1e-9)
