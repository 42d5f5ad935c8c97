"""Arcs in the collar of a one-sided geodesic.

The collar is modelled on the glide G(z) = -e^l conj(z) whose axis is the
imaginary axis, l the core length. Points at distance w from the axis lie on
the two rays arg z = a and arg z = pi - a with sin a = 1/cosh w; G swaps
them, so their quotient is the single boundary curve of a Moebius band of
length 2 l cosh w.

The arc alpha_k joins p on the right ray to G^k(q), q on the left ray. Its
self-intersections are read off from the deck translates G^j(alpha_k) that
cross it: each double point is seen twice.

The lifted collar is the convex strip between the two rays, so two chords
with endpoints on its boundary cross exactly when their endpoints interleave
along that boundary. Endpoints are tracked by ray and log-radius, which keeps
the test exact for arcs far longer than float Klein coordinates can resolve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .hypgeo import GeodesicSegment, GeometryError, HPoint, Isometry, apply, dist, segments_cross

CALIBRATION_K = 20


@dataclass(frozen=True)
class CollarParams:
    core_length: float
    width: float
    p_offset: float = 0.0  # log of the Euclidean radius of p on its ray
    q_offset: float = 0.0

    def __post_init__(self):
        if self.core_length <= 0 or self.width <= 0:
            raise ValueError("core length and width must be positive")

    @property
    def boundary_length(self) -> float:
        return 2.0 * self.core_length * math.cosh(self.width)

    @property
    def ray_angle(self) -> float:
        return math.asin(1.0 / math.cosh(self.width))

    def glide(self) -> Isometry:
        h = self.core_length / 2
        return Isometry(np.array([[-math.exp(h), 0.0], [0.0, math.exp(-h)]]))

    def p(self) -> HPoint:
        return HPoint.from_complex(math.exp(self.p_offset) * complex(math.cos(self.ray_angle),
                                                                    math.sin(self.ray_angle)))

    def q(self) -> HPoint:
        return HPoint.from_complex(math.exp(self.q_offset) * complex(-math.cos(self.ray_angle),
                                                                    math.sin(self.ray_angle)))


def self_intersections_closed_form(k: int) -> int:
    if k >= 0:
        return k // 2 if k % 2 == 0 else (k + 1) // 2
    m = -k
    return m // 2 - 1 if m % 2 == 0 else (m - 1) // 2


def _glide_power(params: CollarParams, k: int) -> Isometry:
    return params.glide() ** k


def _lift(params: CollarParams, k: int) -> tuple[HPoint, HPoint]:
    p = params.p()
    qk = apply(_glide_power(params, k), params.q())
    if abs(p.x - qk.x) <= 1e-14 * max(1.0, abs(p.x)) and abs(p.y - qk.y) <= 1e-14 * p.y:
        raise GeometryError("degenerate arc")
    return p, qk


def arc_length(params: CollarParams, k: int) -> float:
    p, qk = _lift(params, k)
    return dist(p, qk)


def _boundary_key(side: int, log_r: float) -> tuple[int, float]:
    """Position along the strip boundary: up the right ray, then down the left ray."""
    return (0, log_r) if side == 0 else (1, -log_r)


def _endpoint(params: CollarParams, start: str, m: int) -> tuple[int, float]:
    """G^m applied to p (start on the right ray) or q (start on the left ray)."""
    side0, off = (0, params.p_offset) if start == "p" else (1, params.q_offset)
    return _boundary_key((side0 + m) % 2, off + m * params.core_length)


def _interleaved(a, b, c, d) -> bool:
    if len({a, b, c, d}) < 4:
        return False  # shared endpoint
    lo, hi = min(a, b), max(a, b)
    return (lo < c < hi) != (lo < d < hi)


def _translates(params: CollarParams, k: int, j_window: int) -> int:
    a, b = _endpoint(params, "p", 0), _endpoint(params, "q", k)
    return sum(_interleaved(a, b, _endpoint(params, "p", j), _endpoint(params, "q", j + k))
               for j in range(-j_window, j_window + 1) if j)


def self_intersections_geometric(params: CollarParams, k: int, j_window: int | None = None) -> int:
    """Half the number of translates G^j(alpha_k), 0 < |j| <= j_window, crossing alpha_k."""
    if j_window is None:
        j_window = abs(k) + 2
    if j_window < abs(k) + 2:
        raise ValueError("j_window must be at least |k| + 2")
    _lift(params, k)
    return _translates(params, k, j_window) // 2


def self_intersections_klein(params: CollarParams, k: int, j_window: int | None = None) -> int:
    """Same count with float Klein-model chord tests; reliable only for short arcs."""
    j_window = j_window or abs(k) + 2
    p, qk = _lift(params, k)
    base = GeodesicSegment(p, qk)
    hits = 0
    for j in range(-j_window, j_window + 1):
        if j == 0:
            continue
        gj = _glide_power(params, j)
        if segments_cross(base, GeodesicSegment(apply(gj, p), apply(gj, qk))):
            hits += 1
    return hits // 2


class Calibration(NamedTuple):
    sign: int
    offset: int  # geometric index = sign * k + offset


def calibrate(params: CollarParams, kmax: int = CALIBRATION_K) -> Calibration:
    """Integer relabelling k -> sign*k + offset matching geometry to the closed form."""
    geo = {}

    def g(m):
        if m not in geo:
            geo[m] = self_intersections_geometric(params, m)
        return geo[m]

    for sign in (1, -1):
        for offset in sorted(range(-3, 4), key=abs):
            if all(g(sign * k + offset) == self_intersections_closed_form(k)
                   for k in range(-kmax, kmax + 1)):
                return Calibration(sign, offset)
    raise GeometryError("no index calibration matches the closed form")


class CollarRow(NamedTuple):
    k: int
    i_closed: int
    i_geom: int
    length: float
    margin: float


class CollarReport(NamedTuple):
    params: CollarParams
    calibration: Calibration
    rows: tuple[CollarRow, ...]

    @property
    def min_margin(self) -> float:
        return min(r.margin for r in self.rows)

    @property
    def ok(self) -> bool:
        return self.min_margin >= 0 and all(r.i_closed == r.i_geom for r in self.rows)


def verify_collar_inequality(params: CollarParams, k_range: range | tuple[int, int] = (-30, 30),
                             calibration: Calibration | None = None) -> CollarReport:
    """margin(k) = (l(dC) + 2w)/(2l) + 1 - |i(alpha_k) - l(alpha_k)/(2l)| for each k."""
    if isinstance(k_range, tuple):
        k_range = range(k_range[0], k_range[1] + 1)
    cal = calibration or calibrate(params)
    ell = params.core_length
    bound = (params.boundary_length + 2 * params.width) / (2 * ell) + 1
    rows = []
    for k in k_range:
        kg = cal.sign * k + cal.offset
        i_closed = self_intersections_closed_form(k)
        length = arc_length(params, kg)
        margin = bound - abs(i_closed - length / (2 * ell))
        rows.append(CollarRow(k, i_closed, self_intersections_geometric(params, kg), length,
                              margin))
    return CollarReport(params, cal, tuple(rows))
