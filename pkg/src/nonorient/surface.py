"""Hyperbolic structures on small nonorientable surfaces.

Surfaces are assembled from pairs of pants (right-angled hexagon
construction) and crosscaps. A crosscap on a boundary with holonomy B is the
glide reflection g along the axis of B with g^2 = B.

The matrix recipes below work on 2x2 matrices stored as 4-tuples
(a, b, c, d) and are written against a small numeric namespace, so the same
code builds float holonomy, mpmath holonomy at any precision, and numpy
batches over many parameter points.

Sign conventions: pants generators have tr X < 0, tr Y < 0 and tr XY < 0.
Twists on a glued two-sided curve are measured from the position where the
two hexagon frames are aligned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import SimpleNamespace
from typing import Callable, Mapping, NamedTuple

import numpy as np

from .hypgeo import GeometryError, Isometry, classify, translation_length
from .words import canonical, invert, letter_count, word_classes

def _select(cond, a, b):
    return a if cond else b


MATH = SimpleNamespace(cosh=math.cosh, sinh=math.sinh, exp=math.exp,
                       sqrt=math.sqrt, acosh=math.acosh, abs=abs, where=_select)
NUMPY = SimpleNamespace(cosh=np.cosh, sinh=np.sinh, exp=np.exp,
                        sqrt=np.sqrt, acosh=np.arccosh, abs=np.abs, where=np.where)


def mp_namespace(dps: int):
    import mpmath
    ctx = mpmath.mp.clone() if hasattr(mpmath.mp, "clone") else mpmath.MPContext()
    ctx.dps = dps
    return SimpleNamespace(cosh=ctx.cosh, sinh=ctx.sinh, exp=ctx.exp,
                           sqrt=ctx.sqrt, acosh=ctx.acosh, abs=abs, ctx=ctx,
                           mpf=ctx.mpf, where=_select)


# ---- 2x2 matrices as 4-tuples -------------------------------------------

def qmul(p, q):
    a, b, c, d = p
    e, f, g, h = q
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def qdet(p):
    return p[0] * p[3] - p[1] * p[2]


def qinv(p):
    a, b, c, d = p
    det = qdet(p)
    return (d / det, -b / det, -c / det, a / det)


def qtr(p):
    return p[0] + p[3]


def qneg(p):
    return tuple(-x for x in p)


def qscale(p, s):
    return tuple(x * s for x in p)


def _pants_frame(l1, l2, l3, F):
    c1, s1 = F.cosh(l1 / 2), F.sinh(l1 / 2)
    c2, s2 = F.cosh(l2 / 2), F.sinh(l2 / 2)
    cd = (F.cosh(l3 / 2) + c1 * c2) / (s1 * s2)  # cosh of the X-Y axis distance
    ch, sh = F.sqrt((cd + 1) / 2), F.sqrt((cd - 1) / 2)
    # T translates along |z| = 1 by the axis distance
    return (ch, sh, sh, ch), (ch, -sh, -sh, ch)


def pants_quads(l1, l2, l3, F=MATH):
    """X, Y with |tr X| = 2cosh(l1/2), |tr Y| = 2cosh(l2/2), |tr XY| = 2cosh(l3/2)."""
    t, tinv = _pants_frame(l1, l2, l3, F)
    e1, e2 = F.exp(l1 / 2), F.exp(l2 / 2)
    zero = 0 * e1
    x = (-e1, zero, zero, -1 / e1)
    y = qneg(qmul(qmul(t, (1 / e2, zero, zero, e2)), tinv))
    return x, y


def pants_glides(l1, l2, l3, F=MATH):
    """Glides a, b with a^2 = -X and b^2 = -Y for the pants_quads pair.

    Built in the diagonal frames of the axes; taking square roots of X and Y
    instead loses the small traces of short glides to cancellation.
    """
    t, tinv = _pants_frame(l1, l2, l3, F)
    h1, h2 = F.exp(l1 / 4), F.exp(l2 / 4)
    zero = 0 * h1
    a = (h1, zero, zero, -1 / h1)
    b = qmul(qmul(t, (1 / h2, zero, zero, -h2)), tinv)
    return a, b


def glide_sqrt_quad(bq, F=MATH):
    """Glide reflection g sharing the axis of B with g^2 = +-B and det g = -1."""
    t = qtr(bq)
    sgn = np.sign(t) if isinstance(t, np.ndarray) else (1 if t > 0 else -1)
    b = qscale(bq, sgn)
    t = t * sgn
    a0, b0, c0, d0 = b
    root = F.sqrt(t + 2)
    s = ((a0 + 1) / root, b0 / root, c0 / root, (d0 + 1) / root)  # S^2 = B
    n = F.sqrt(t * t - 4)
    r = ((a0 - d0) / n, 2 * b0 / n, 2 * c0 / n, (d0 - a0) / n)  # (2B - tI)/sqrt(t^2-4)
    return qmul(s, r)


def _qwhere(cond, p, q, F):
    return tuple(F.where(cond, x, y) for x, y in zip(p, q))


def _fixed_points_quad(p, F):
    a, b, c, d = _qwhere(qtr(p) < 0, qneg(p), p, F)
    t = a + d
    lam = t / 2 + F.sqrt(t * t / 4 - 1)
    return (1 / lam - d) / c, (lam - d) / c  # repelling, attracting


def _normalizer_quad(rep, att, F):
    """Orientation-preserving map sending rep -> 0 and att -> infinity."""
    one = 1 + 0 * rep
    m = _qwhere(rep > att, (one, -rep, one, -att), (-one, rep, one, -att), F)
    s = F.sqrt(abs(rep - att))
    return tuple(x / s for x in m)


# ---- model recipes ------------------------------------------------------

def _recipe_n3(p, F):
    x, y = pants_quads(2 * p["la"], 2 * p["lb"], 2 * p["lc"], F)
    a, b = pants_glides(2 * p["la"], 2 * p["lb"], 2 * p["lc"], F)
    z = qinv(qmul(x, y))
    return {"a": a, "b": b, "c": glide_sqrt_quad(z, F)}


def _recipe_n21(p, F):
    x, y = pants_quads(2 * p["la"], 2 * p["lb"], p["boundary"], F)
    a, b = pants_glides(2 * p["la"], 2 * p["lb"], p["boundary"], F)
    return {"a": a, "b": b, "e": qinv(qmul(x, y))}


def _recipe_n12(p, F):
    x, y = pants_quads(2 * p["la"], p["b1"], p["b2"], F)
    a, _ = pants_glides(2 * p["la"], p["b1"], p["b2"], F)
    # the second one-sided simple geodesic is a*y (found by the geometric
    # intersection count; a*y^-1 has one self-intersection)
    return {"a": a, "y": y, "e": qinv(qmul(x, y)), "d": qmul(a, y)}


def _recipe_n13(p, F):
    x1, y1 = pants_quads(2 * p["la"], p["b1"], p["lc"], F)
    z1 = qinv(qmul(x1, y1))
    x2, y2 = pants_quads(p["lc"], p["b2"], p["b3"], F)
    # P1 normalized so that the axis of z1 is the imaginary axis
    r1, a1 = _fixed_points_quad(z1, F)
    n1 = _normalizer_quad(r1, a1, F)
    side1 = _side(qmul(qmul(n1, y1), qinv(n1)), F)
    # P2: x2 is diagonal, axis already imaginary; flip sides with z -> -1/z if needed
    zero = 0 * p["lc"]
    n2 = _qwhere(_side(y2, F) == side1, (zero, zero - 1, zero + 1, zero),
                 (zero + 1, zero, zero, zero + 1), F)
    half = F.exp(p["twist"] / 2)
    tw = (half, 0 * half, 0 * half, 1 / half)
    m = qmul(qmul(qinv(n1), tw), n2)
    u = qmul(qmul(m, y2), qinv(m))
    e = qinv(qmul(qmul(qmul(m, x2), qinv(m)), u))
    a, _ = pants_glides(2 * p["la"], p["b1"], p["lc"], F)
    return {"a": a, "y": y1, "u": u, "z": z1, "e": e}


def _side(q, F):
    r, a = _fixed_points_quad(q, F)
    return F.where(r + a > 0, 1, -1)


class SurfaceDescriptor(NamedTuple):
    orientable: bool
    genus: int
    r: int
    boundary_lengths: tuple = ()

    @property
    def euler_characteristic(self) -> int:
        return (2 - 2 * self.genus - self.r) if self.orientable else (2 - self.genus - self.r)

    @property
    def dim_ml(self) -> int:
        return dim_ml(self.genus, self.r, self.orientable)


def dim_ml(genus: int, r: int, orientable: bool = False) -> int:
    chi = (2 - 2 * genus - r) if orientable else (2 - genus - r)
    if chi >= 0:
        raise ValueError("Euler characteristic must be negative")
    return (6 * genus - 6 + 2 * r) if orientable else (3 * genus - 6 + 2 * r)


@dataclass(frozen=True)
class ModelSpec:
    name: str
    surface: SurfaceDescriptor
    defaults: Mapping[str, float]
    recipe: Callable
    basis: str
    relations: tuple[str, ...]
    boundary_words: Mapping[str, str]
    one_sided_coords: tuple[str, ...]
    two_sided_coords: tuple[tuple[str, str], ...] = ()


MODELS: dict[str, ModelSpec] = {
    "N3": ModelSpec("N3", SurfaceDescriptor(False, 3, 0), {"la": 1.0, "lb": 1.0, "lc": 1.0},
                    _recipe_n3, "abc", ("aabbcc",), {}, ("la", "lb", "lc")),
    "N21": ModelSpec("N21", SurfaceDescriptor(False, 2, 1), {"la": 1.0, "lb": 1.0, "boundary": 2.0},
                     _recipe_n21, "ab", ("aabbe",), {"boundary": "aabb"}, ("la", "lb")),
    "N12": ModelSpec("N12", SurfaceDescriptor(False, 1, 2), {"la": 1.0, "b1": 2.0, "b2": 2.0},
                     _recipe_n12, "ad", ("aaye", "Day"), {"b1": "Ad", "b2": "ad"}, ("la",)),
    "N13": ModelSpec("N13", SurfaceDescriptor(False, 1, 3),
                     {"la": 1.0, "lc": 2.0, "twist": 0.0, "b1": 2.0, "b2": 2.0, "b3": 2.0},
                     _recipe_n13, "ayu", ("aayz", "zEU"), {"b1": "y", "b2": "u", "b3": "E"},
                     ("la",), (("lc", "twist"),)),
}
BOUNDARY_KEYS = {"N3": (), "N21": ("boundary",), "N12": ("b1", "b2"), "N13": ("b1", "b2", "b3")}


@dataclass(frozen=True, eq=False)
class HolonomyRep:
    generators: Mapping[str, Isometry]
    relations: tuple[str, ...]
    surface: SurfaceDescriptor
    basis: str = ""
    boundary_words: Mapping[str, str] = field(default_factory=dict)
    model: str | None = None
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.basis:
            object.__setattr__(self, "basis", "".join(sorted(self.generators)))

    @property
    def one_sided(self) -> frozenset[str]:
        return frozenset(k for k, g in self.generators.items() if g.det < 0)

    def sided(self, w: str) -> str:
        return "one_sided" if letter_count(w, "".join(self.one_sided)) % 2 else "two_sided"

    def relation_residual(self) -> float:
        worst = 0.0
        for r in self.relations:
            m = holonomy_of_word(self, r).m
            worst = max(worst, min(np.abs(m - np.eye(2)).max(), np.abs(m + np.eye(2)).max()))
        return worst

    def quads(self, F) -> dict:
        """Rebuild generator matrices in another numeric backend (e.g. mpmath)."""
        if self.model is None:
            raise GeometryError("only builtin models can be rebuilt at other precisions")
        entry = MODELS[self.model]
        p = {k: (F.mpf(v) if hasattr(F, "mpf") else v) for k, v in self.params.items()}
        return entry.recipe(p, F)

    def with_basis_order(self, order: str) -> HolonomyRep:
        return HolonomyRep(self.generators, self.relations, self.surface, order,
                           self.boundary_words, self.model, self.params)


def _iso(q) -> Isometry:
    """Recipe matrices already have |det| = 1; keep them as built."""
    m = np.array([[float(q[0]), float(q[1])], [float(q[2]), float(q[3])]])
    return Isometry(m, 1 if m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] > 0 else -1)


def build_pants(l1: float, l2: float, l3: float) -> HolonomyRep:
    if min(l1, l2, l3) <= 0:
        raise GeometryError("invalid pants length")
    x, y = pants_quads(l1, l2, l3)
    gens = {"x": _iso(x), "y": _iso(y), "z": _iso(qinv(qmul(x, y)))}
    return HolonomyRep(gens, ("xyz",), SurfaceDescriptor(True, 0, 3, (l1, l2, l3)), basis="xy",
                       boundary_words={"x": "x", "y": "y", "z": "YX"})


def attach_crosscap(rep: HolonomyRep, boundary_word: str, core_length: float,
                    label: str) -> HolonomyRep:
    """Add a glide generator ``label`` whose square is the boundary holonomy."""
    b = holonomy_of_word(rep, boundary_word)
    if classify(b) != "hyperbolic":
        raise GeometryError("cannot cap non-geodesic boundary")
    if abs(translation_length(b) - 2 * core_length) > 1e-6:
        raise GeometryError("core/boundary length mismatch")
    if label in rep.generators:
        raise GeometryError(f"generator {label!r} already exists")
    g = _iso(glide_sqrt_quad(tuple(b.m.ravel())))
    gens = dict(rep.generators)
    gens[label] = g
    s = rep.surface
    bnd = {k: v for k, v in rep.boundary_words.items() if canonical(v) != canonical(boundary_word)}
    r = max(s.r - 1, 0)
    if s.orientable:
        genus = 2 * s.genus + 1
    else:
        genus = s.genus + 1
    surface = SurfaceDescriptor(False, genus, r, tuple(
        translation_length(holonomy_of_word(rep, w)) for w in bnd.values()))
    return HolonomyRep(gens, rep.relations + (label + label + invert(boundary_word),), surface,
                       rep.basis, bnd)


def holonomy_of_word(rep: HolonomyRep, w: str) -> Isometry:
    m = np.eye(2)
    sign = 1
    gens = rep.generators
    for ch in w:
        g = gens.get(ch.lower())
        if g is None:
            raise KeyError(f"unknown generator {ch.lower()!r}")
        m = m @ (g.m if ch.islower() else g.inverse().m)
        sign *= g.sign
    return Isometry(m, sign)


def curve_length(rep: HolonomyRep, w: str) -> float:
    h = holonomy_of_word(rep, w)
    kind = classify(h)
    if kind not in ("hyperbolic", "glide"):
        raise GeometryError(f"not a closed geodesic class ({kind})")
    return translation_length(h)


def builtin_model(name: str, params: Mapping[str, float] | None = None, **kw) -> HolonomyRep:
    """Holonomy of one of the benchmark surfaces N12, N21, N3, N13.

    Parameters are core lengths of crosscaps (la, lb, lc), boundary lengths and,
    for N13, the length/twist of the glued two-sided curve (lc, twist).
    """
    if name not in MODELS:
        raise KeyError(f"unknown model {name!r}; choose from {sorted(MODELS)}")
    entry = MODELS[name]
    p = dict(entry.defaults)
    given = dict(params or {})
    given.update(kw)
    unknown = set(given) - set(p)
    if unknown:
        raise ValueError(f"parameter mismatch for {name}: unknown {sorted(unknown)}")
    p.update({k: float(v) for k, v in given.items()})
    for k, v in p.items():
        if k != "twist" and v <= 0:
            raise GeometryError(f"parameter {k} must be positive")
    quads = entry.recipe(p, MATH)
    gens = {k: _iso(q) for k, q in quads.items()}
    s = entry.surface
    surface = SurfaceDescriptor(False, s.genus, s.r, tuple(p[k] for k in BOUNDARY_KEYS[name]))
    return HolonomyRep(gens, entry.relations, surface, entry.basis, dict(entry.boundary_words),
                       name, p)


class SysMinus(NamedTuple):
    length: float
    word: str
    certified: bool


def _min_one_sided(rep: HolonomyRep, budget: int) -> tuple[float, str]:
    best, arg = math.inf, ""
    one = "".join(rep.one_sided)
    for w in word_classes(rep.basis, budget):
        if letter_count(w, one) % 2 == 0:
            continue
        try:
            ell = curve_length(rep, w)
        except GeometryError:
            continue
        if ell < best - 1e-12:
            best, arg = ell, w
    return best, arg


def sys_minus(rep: HolonomyRep, word_budget: int = 5) -> SysMinus:
    """Shortest one-sided closed geodesic among words up to the budget.

    Certified when the minimum does not move at budget + 2.
    """
    if word_budget < 1:
        raise ValueError("word_budget must be >= 1")
    if not rep.one_sided:
        raise GeometryError("surface appears orientable")
    best, arg = _min_one_sided(rep, word_budget)
    if not math.isfinite(best):
        raise GeometryError("surface appears orientable")
    more, _ = _min_one_sided(rep, word_budget + 2)
    return SysMinus(best, arg, abs(more - best) <= 1e-12)
