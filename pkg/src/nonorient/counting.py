"""Counting functions on length series, growth-exponent fits and the b_X(1) identity."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import linregress

from .geodesics import CountSeries

GRID_RATIO = 2 ** 0.25


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r2: float
    window: tuple[float, float]
    points: int

    @property
    def constant(self) -> float:
        return math.exp(self.intercept)


@dataclass(frozen=True)
class BallCount:
    grid: tuple[float, ...]
    counts: tuple[int, ...]
    nu: tuple[float, ...]
    d: int


def count_upto(s: CountSeries, L: float) -> int:
    if L < 0:
        raise ValueError("L must be nonnegative")
    return bisect.bisect_right(s.lengths, L)


def nu_L(s: CountSeries, L: float, d: int) -> float:
    if L <= 0 or d < 1:
        raise ValueError("need L > 0 and d >= 1")
    return count_upto(s, L) / L ** d


def geometric_grid(lo: float, hi: float, ratio: float = GRID_RATIO) -> np.ndarray:
    """Points hi / ratio^j that are >= lo, in increasing order (hi always included)."""
    if not 0 < lo <= hi:
        raise ValueError("need 0 < lo <= hi")
    n = int(math.floor(math.log(hi / lo) / math.log(ratio) + 1e-9))
    return hi / ratio ** np.arange(n, -1, -1)


def top_window(s: CountSeries, decades: float = 2.0) -> tuple[float, float]:
    hi = s.complete_to if s.complete_to is not None else (s.lengths[-1] if s.lengths else 0.0)
    if hi <= 0:
        raise ValueError("fit window too small")
    lo = max(hi / 10 ** decades, s.lengths[0] if s.lengths else hi)
    return lo, hi


def ball_counts(s: CountSeries, d: int, window: tuple[float, float] | None = None,
                ratio: float = GRID_RATIO) -> BallCount:
    lo, hi = window or top_window(s, 1.0)
    grid = geometric_grid(lo, hi, ratio)
    counts = tuple(count_upto(s, L) for L in grid)
    return BallCount(tuple(float(x) for x in grid), counts,
                     tuple(c / L ** d for c, L in zip(counts, grid)), d)


def fit_exponent(s: CountSeries, grid: Sequence[float] | None = None,
                 window: tuple[float, float] | None = None) -> ExponentFit:
    """Least-squares slope of log N(L) against log L.

    Without an explicit grid the fit uses a ratio 2^(1/4) geometric grid over
    the window, which defaults to the top two decades of the complete data.
    """
    if grid is None:
        lo, hi = window or top_window(s)
        grid = geometric_grid(lo, hi)
    grid = [float(L) for L in grid if L > 0]
    pts = [(L, count_upto(s, L)) for L in grid]
    pts = [(L, n) for L, n in pts if n > 0]
    if len(pts) < 5:
        raise ValueError("fit window too small")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    if np.ptp(y) == 0:
        return ExponentFit(0.0, float(y[0]), 1.0, (pts[0][0], pts[-1][0]), len(pts))
    res = linregress(x, y)
    return ExponentFit(float(res.slope), float(res.intercept), float(res.rvalue ** 2),
                       (pts[0][0], pts[-1][0]), len(pts))


def nonincreasing_decay(values: Sequence[float], factor: float = 0.5) -> bool:
    """Sampled sequence never goes up and ends below factor times its start."""
    v = list(values)
    return all(b <= a for a, b in zip(v, v[1:])) and v[-1] < factor * v[0]


def simplex_moment(lengths: Sequence[float], d: int, L: float) -> float:
    """Volume of the integral of (L - sum x_i l_i)^(d - n) over the simplex sum x_i l_i <= L."""
    n = len(lengths)
    if n > d:
        raise ValueError("overdetermined simplex")
    if any(x <= 0 for x in lengths):
        raise ValueError("lengths must be positive")
    return math.factorial(d - n) / math.factorial(d) * L ** d / math.prod(lengths)


def simplex_moment_mc(lengths: Sequence[float], d: int, L: float, samples: int = 10 ** 6,
                      seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate (value, standard error) of the same integral over the box."""
    rng = np.random.default_rng(seed)
    ell = np.asarray(lengths, dtype=float)
    n = len(ell)
    box = L / ell
    x = rng.random((samples, n)) * box
    rest = L - x @ ell
    f = np.where(rest >= 0, np.clip(rest, 0, None) ** (d - n), 0.0)
    vol = float(np.prod(box))
    return vol * float(f.mean()), vol * float(f.std(ddof=1)) / math.sqrt(samples)


def bx_identity_check_n12(l1: float, l2: float, L: float) -> float:
    """Relative error between direct lattice counting and the b_X(1) prediction on N12.

    The integral simple multicurves are the multiples of the two one-sided
    geodesics, so the direct count is floor(L/l1) + floor(L/l2); the identity
    (d = n = 1, pants complement of volume 1) predicts L (1/l1 + 1/l2).
    """
    if min(l1, l2, L) <= 0:
        raise ValueError("invalid lengths")
    direct = (math.floor(L / l1) + math.floor(L / l2)) / L
    predicted = 1.0 / l1 + 1.0 / l2
    return abs(direct - predicted) / predicted


def bx_truncated_sum(families: Sequence[tuple[Sequence[float], float]], d: int):
    """Partial sum of the b_X(1) series over listed maximal one-sided families.

    Each family is (lengths, b) with b the complement's volume. Returns the
    partial sum and the size of the smallest term as a crude truncation
    indicator, since the terms are listed by increasing length.
    """
    terms = [math.factorial(d - len(ls)) / math.factorial(d) * b / math.prod(ls)
             for ls, b in families]
    if not terms:
        return 0.0, math.inf
    return float(sum(terms)), float(min(terms))
