"""Isometries of the hyperbolic plane in the upper half-plane model.

Matrices with det +1 act by Möbius maps, matrices with det -1 act by
z -> (a*conj(z) + b) / (c*conj(z) + d). Everything is normalized so that
|det| = 1, and the matrix is only defined up to sign.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

PARABOLIC_TOL = 1e-9
DET_TOL = 1e-12
ORIENT_TOL = 1e-10


class GeometryError(ValueError):
    pass


def _normalize(m: np.ndarray) -> tuple[np.ndarray, int]:
    d = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if d == 0:
        raise GeometryError("singular matrix")
    return m / math.sqrt(abs(d)), (1 if d > 0 else -1)


@dataclass(frozen=True, eq=False)
class Isometry:
    """2x2 matrix with |det| = 1, acting with conjugation when det = -1.

    The determinant sign is carried along exactly through products: for long
    words the entries get large and a recomputed determinant would lose all
    accuracy to cancellation.
    """
    m: np.ndarray
    sign: int = field(default=0, repr=False)

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float).reshape(2, 2)
        if self.sign == 0:
            m, sign = _normalize(m)
            object.__setattr__(self, "sign", sign)
        object.__setattr__(self, "m", m)

    @classmethod
    def identity(cls) -> Isometry:
        return cls(np.eye(2))

    @property
    def det(self) -> int:
        return self.sign

    @property
    def trace(self) -> float:
        return float(self.m[0, 0] + self.m[1, 1])

    def __matmul__(self, other: Isometry) -> Isometry:
        return compose(self, other)

    def inverse(self) -> Isometry:
        a, b, c, d = self.m.ravel()
        return Isometry(np.array([[d, -b], [-c, a]]) * self.sign, self.sign)

    def __pow__(self, k: int) -> Isometry:
        out = Isometry.identity()
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out @ base
        return out

    def close_to(self, other: Isometry, tol: float = 1e-8) -> bool:
        """Equality in PGL(2, R): matrices agree up to a global sign."""
        return (np.abs(self.m - other.m).max() < tol
                or np.abs(self.m + other.m).max() < tol)

    def __repr__(self) -> str:
        return f"Isometry({self.m.tolist()!r})"


def compose(a: Isometry, b: Isometry) -> Isometry:
    return Isometry(a.m @ b.m, a.sign * b.sign)


def classify(a: Isometry) -> str:
    """One of identity, hyperbolic, parabolic, elliptic, glide, reflection."""
    if a.det < 0:
        sq = a @ a
        if abs(abs(sq.trace) - 2) <= PARABOLIC_TOL:
            return "reflection" if sq.close_to(Isometry.identity(), 1e-9) else "degenerate"
        return "glide"
    t = abs(a.trace)
    if abs(t - 2) <= PARABOLIC_TOL:
        return "identity" if a.close_to(Isometry.identity(), 1e-9) else "parabolic"
    return "hyperbolic" if t > 2 else "elliptic"


def translation_length(a: Isometry) -> float:
    """Translation length of a hyperbolic element or a glide reflection.

    Parabolics (and the identity) return 0.0. A glide's length is half that
    of its square; since tr(g^2) = tr(g)^2 + 2 this is 2 asinh(|tr g| / 2),
    which avoids squaring large matrices.
    """
    if a.det < 0:
        if classify(a) != "glide":
            raise GeometryError("not a glide reflection")
        return 2.0 * math.asinh(abs(a.trace) / 2.0)
    t = abs(a.trace)
    if abs(t - 2) <= PARABOLIC_TOL:
        return 0.0
    if t < 2:
        raise GeometryError("elliptic element has no translation length")
    return 2.0 * math.acosh(t / 2.0)


class HPoint(NamedTuple):
    x: float
    y: float

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> HPoint:
        if z.imag <= 0:
            raise GeometryError("point not in the upper half-plane")
        return cls(z.real, z.imag)


def dist(p: HPoint, q: HPoint) -> float:
    d2 = (p.x - q.x) ** 2 + (p.y - q.y) ** 2
    return math.acosh(1.0 + d2 / (2.0 * p.y * q.y))


def apply(a: Isometry, p: HPoint) -> HPoint:
    z = p.z if a.det > 0 else p.z.conjugate()
    (m00, m01), (m10, m11) = a.m
    w = (m00 * z + m01) / (m10 * z + m11)
    if w.imag <= 0:
        raise GeometryError("degenerate image")
    return HPoint(w.real, w.imag)


def apply_boundary(a: Isometry, x: float) -> float:
    """Action on the boundary R u {inf}; conjugation is trivial there."""
    (m00, m01), (m10, m11) = a.m
    if math.isinf(x):
        return math.inf if m10 == 0 else m00 / m10
    den = m10 * x + m11
    if den == 0:
        return math.inf
    return (m00 * x + m01) / den


def axis_endpoints(a: Isometry) -> tuple[float, float]:
    """Boundary fixed points of a (of a^2 for glides), attracting last."""
    kind = classify(a)
    if kind not in ("glide", "hyperbolic"):
        raise GeometryError(f"no axis: element is {kind}")
    (p, q), (r, s) = a.m
    if r == 0:
        finite = q / (s - p)
        return (finite, math.inf) if abs(p) > abs(s) else (math.inf, finite)
    # fixed points solve r x^2 + (s - p) x - q = 0; the discriminant is
    # tr^2 - 4 det. Stable root pair: x1 = Q / r, x2 = -q / Q.
    root = math.sqrt((p + s) ** 2 - 4 * a.det)
    big = -0.5 * ((s - p) + math.copysign(root, s - p))
    x1, x2 = big / r, -q / big
    # a (x, 1) = (r x + s)(x, 1): attracting where |r x + s| > 1
    if abs(r * x1 + s) > abs(r * x2 + s):
        return x2, x1
    return x1, x2


def to_klein(p: HPoint) -> tuple[float, float]:
    w = (p.z - 1j) / (p.z + 1j)
    s = 2.0 / (1.0 + abs(w) ** 2)
    return (s * w.real, s * w.imag)


def boundary_to_klein(x: float) -> tuple[float, float]:
    if math.isinf(x):
        return (1.0, 0.0)
    w = (x - 1j) / (x + 1j)
    return (w.real, w.imag)


@dataclass(frozen=True)
class GeodesicSegment:
    p: HPoint
    q: HPoint
    kp: tuple[float, float] = field(init=False, repr=False)
    kq: tuple[float, float] = field(init=False, repr=False)

    def __post_init__(self):
        if self.p == self.q:
            raise GeometryError("degenerate segment")
        object.__setattr__(self, "kp", to_klein(self.p))
        object.__setattr__(self, "kq", to_klein(self.q))


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def chords_cross(a1, a2, b1, b2, tol: float = ORIENT_TOL) -> bool:
    """Strict transverse crossing of two Euclidean chords.

    Touching or collinear configurations (within tol) are non-crossings.
    """
    d1 = _orient(a1, a2, b1)
    d2 = _orient(a1, a2, b2)
    d3 = _orient(b1, b2, a1)
    d4 = _orient(b1, b2, a2)
    if min(abs(d1), abs(d2), abs(d3), abs(d4)) <= tol:
        return False
    return (d1 > 0) != (d2 > 0) and (d3 > 0) != (d4 > 0)


def segments_cross(s1: GeodesicSegment, s2: GeodesicSegment) -> bool:
    """Open segments cross transversely; shared endpoints count as no."""
    return chords_cross(s1.kp, s1.kq, s2.kp, s2.kq)


def geodesics_linked(e1: tuple[float, float], e2: tuple[float, float]) -> bool:
    """Complete geodesics given by boundary endpoints cross iff linked."""
    return chords_cross(boundary_to_klein(e1[0]), boundary_to_klein(e1[1]),
                        boundary_to_klein(e2[0]), boundary_to_klein(e2[1]))
