"""Norbury's volume form in Fenchel-Nielsen charts.

On a chart with one-sided core lengths l_i and two-sided (length, twist)
pairs the form is prod coth(l_i) dl_i times prod dtau_j dl_j. Near l_i = 0
coth(l) ~ 1/l, so every one-sided coordinate contributes a logarithmic
divergence; away from 0 the antiderivative is log sinh.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .surface import MODELS, NUMPY, builtin_model, qmul
from .words import letter_count, word_classes

DEFAULT_NODES = 64
DEFAULT_SAMPLES = 20_000
DEFAULT_WORD_BUDGET = 5


@dataclass(frozen=True)
class FNChart:
    """Box in Fenchel-Nielsen coordinates.

    one_sided: (label, (lo, hi)) per crosscap core length.
    two_sided: (label, (lo, hi), twist) per glued curve; twist is a fixed
    range (t0, t1) or None for the default [0, l].
    """
    one_sided: tuple = ()
    two_sided: tuple = ()

    def __post_init__(self):
        one = tuple((lab, tuple(map(float, r))) for lab, r in self.one_sided)
        two = tuple((lab, tuple(map(float, r)), None if tw is None else tuple(map(float, tw)))
                    for lab, r, tw in self.two_sided)
        for _, (lo, hi) in one + tuple((lab, r) for lab, r, _ in two):
            if lo < 0 or hi < lo:
                raise ValueError("ranges must be positive")
        for _, _, tw in two:
            if tw is not None and tw[1] < tw[0]:
                raise ValueError("ranges must be positive")
        object.__setattr__(self, "one_sided", one)
        object.__setattr__(self, "two_sided", two)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.one_sided) + tuple(lab for lab, _, _ in self.two_sided)

    def with_one_sided_lower(self, delta: float) -> FNChart:
        return FNChart(tuple((lab, (delta, hi)) for lab, (_, hi) in self.one_sided),
                       self.two_sided)

    def bounded(self) -> bool:
        ranges = [r for _, r in self.one_sided] + [r for _, r, _ in self.two_sided]
        twists = [tw for _, _, tw in self.two_sided if tw is not None]
        finite = all(math.isfinite(x) for r in ranges + twists for x in r)
        return finite and all(lo > 0 for _, (lo, _) in self.one_sided)


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    error: float
    method: str
    samples: int  # sample count or quadrature order
    seed: int | None = None
    certified: bool = True
    extra: Mapping = field(default_factory=dict)


def norbury_density(chart: FNChart, point: Mapping[str, float]) -> float:
    """prod coth(l) over the one-sided coordinates; twists are not read."""
    out = 1.0
    for lab, _ in chart.one_sided:
        x = point[lab]
        if x <= 0:
            raise ValueError("outside chart")
        out /= math.tanh(x)
    for lab, _, _ in chart.two_sided:
        if point[lab] <= 0:
            raise ValueError("outside chart")
    return out


def log_sinh(x):
    """log sinh x without overflow for large x."""
    x = np.asarray(x, dtype=float)
    return x + np.log1p(-np.exp(-2 * x)) - math.log(2)


def _coth_integral_gl(lo: float, hi: float, nodes: int) -> float:
    """Gauss-Legendre in u = log x, where the integrand x coth x is smooth."""
    u, w = np.polynomial.legendre.leggauss(nodes)
    a, b = math.log(lo), math.log(hi)
    x = np.exp(0.5 * (b - a) * u + 0.5 * (b + a))
    return float(0.5 * (b - a) * np.sum(w * x / np.tanh(x)))


def _two_sided_integral(r, tw) -> float:
    lo, hi = r
    if tw is None:
        return 0.5 * (hi * hi - lo * lo)  # integral of l dl, exact for Gauss-Legendre too
    return (tw[1] - tw[0]) * (hi - lo)


def integrate_chart(chart: FNChart, method: str = "quadrature", budget: int | None = None,
                    seed: int = 0) -> VolumeEstimate:
    """Integral of the Norbury density over the chart.

    Quadrature: the density is a product of one-variable factors, so the
    tensor Gauss-Legendre rule is the product of one-dimensional rules; the
    error is the change when the order is halved. Monte Carlo: log-uniform
    one-sided lengths and uniform two-sided coordinates.
    """
    if not chart.bounded():
        raise ValueError("unbounded chart; use divergence profile")
    if method == "quadrature":
        n = budget or DEFAULT_NODES
        full = half = 1.0
        for _, (lo, hi) in chart.one_sided:
            if hi > lo:
                full *= _coth_integral_gl(lo, hi, n)
                half *= _coth_integral_gl(lo, hi, max(n // 2, 1))
            else:
                full = half = 0.0
        for _, r, tw in chart.two_sided:
            v = _two_sided_integral(r, tw)
            full *= v
            half *= v
        return VolumeEstimate(full, abs(full - half), "quadrature", n)
    if method == "monte_carlo":
        n = budget or 10 ** 5
        rng = np.random.default_rng(seed)
        f = np.ones(n)
        vol = 1.0
        for _, (lo, hi) in chart.one_sided:
            a, b = math.log(lo), math.log(hi)
            x = np.exp(a + (b - a) * rng.random(n))
            f *= x / np.tanh(x)
            vol *= b - a
        for _, (lo, hi), tw in chart.two_sided:
            ell = lo + (hi - lo) * rng.random(n)
            rng.random(n)  # twist coordinate: the density does not read it
            f *= ell if tw is None else (tw[1] - tw[0])
            vol *= hi - lo
        return VolumeEstimate(vol * float(f.mean()), vol * float(f.std(ddof=1)) / math.sqrt(n),
                              "monte_carlo", n, seed)
    raise ValueError(f"unknown method {method!r}")


def closed_form_volume(chart: FNChart) -> float:
    """Exact value: log sinh differences times the two-sided factors."""
    out = 1.0
    for _, (lo, hi) in chart.one_sided:
        out *= float(log_sinh(hi) - log_sinh(lo))
    for _, r, tw in chart.two_sided:
        out *= _two_sided_integral(r, tw)
    return out


def divergence_profile(deltas: Sequence[float], chart: FNChart, method: str = "quadrature",
                       budget: int | None = None) -> list[tuple[float, float]]:
    """Volumes of the chart with every one-sided lower cutoff set to delta."""
    deltas = [float(d) for d in deltas]
    if any(d <= 0 for d in deltas):
        raise ValueError("cutoffs must be positive")
    if any(b > a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("cutoffs must be decreasing")
    return [(d, integrate_chart(chart.with_one_sided_lower(d), method, budget).value)
            for d in deltas]


def divergence_slope(profile: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of volume against log(1/delta)."""
    x = [-math.log(d) for d, _ in profile]
    y = [v for _, v in profile]
    return float(np.polyfit(x, y, 1)[0])


def divergence_order(profile: Sequence[tuple[float, float]], cap: float) -> float:
    """Slope of log volume against log(log sinh cap - log sinh delta).

    With k one-sided coordinates capped at cap the box volume is exactly
    (log sinh cap - log sinh delta)^k, so the slope reads off k.
    """
    x = [math.log(float(log_sinh(cap) - log_sinh(d))) for d, _ in profile]
    y = [math.log(v) for _, v in profile]
    return float(np.polyfit(x, y, 1)[0])


# ---- the region {sys- >= eps} ----------------------------------------------

def default_cap(model: str, params: Mapping[str, float] | None = None) -> float:
    """Stand-in for the Bers constant: 4 (largest boundary length + 1)."""
    rep = builtin_model(model, params)
    return 4.0 * (max(rep.surface.boundary_lengths, default=0.0) + 1.0)


def model_chart(model: str, eps: float, cap: float) -> FNChart:
    entry = MODELS[model]
    return FNChart(tuple((lab, (eps, cap)) for lab in entry.one_sided_coords),
                   tuple((lab, (0.0, cap), None) for lab, _ in entry.two_sided_coords))


def batch_sys_minus(model: str, params: Mapping[str, np.ndarray], word_budget: int) -> np.ndarray:
    """Shortest one-sided word length up to the budget, for a batch of parameter points."""
    entry = MODELS[model]
    quads = entry.recipe(params, NUMPY)
    signs = {k: _det_sign(q) for k, q in quads.items()}
    one = "".join(k for k in entry.basis if signs[k] < 0)
    n = len(next(iter(params.values())))
    best = np.full(n, np.inf)
    # adjugate times the exact determinant sign: a computed determinant loses
    # its accuracy in the thin part, where the entries get large
    inv = {k: (signs[k] * q[3], -signs[k] * q[1], -signs[k] * q[2], signs[k] * q[0])
           for k, q in quads.items()}
    for w in word_classes(entry.basis, word_budget):
        if letter_count(w, one) % 2 == 0:
            continue
        m = None
        for ch in w:
            x = quads[ch] if ch.islower() else inv[ch.lower()]
            m = x if m is None else qmul(m, x)
        ell = 2.0 * np.arcsinh(np.abs(m[0] + m[3]) / 2.0)
        best = np.minimum(best, ell)
    return best


def _det_sign(q) -> int:
    det = np.asarray(q[0] * q[3] - q[1] * q[2])
    return -1 if np.median(det) < 0 else 1


def _sample_chart(model: str, eps: float, cap: float, samples: int, seed: int):
    """Importance sample with density proportional to the Norbury form.

    One-sided: x = asinh(sinh(eps) exp(U D)), D = log sinh cap - log sinh eps,
    has density coth(x) / D on [eps, cap]. Two-sided: length with density
    l / (cap^2 / 2) on [0, cap] and twist uniform on [0, l].
    """
    entry = MODELS[model]
    rng = np.random.default_rng(seed)
    params = {k: np.full(samples, float(v)) for k, v in builtin_model(model).params.items()}
    weight = 1.0
    d = float(log_sinh(cap) - log_sinh(eps))
    for lab in entry.one_sided_coords:
        u = rng.random(samples)
        params[lab] = np.arcsinh(math.sinh(eps) * np.exp(u * d))
        weight *= d
    for lab, tw in entry.two_sided_coords:
        ell = cap * np.sqrt(rng.random(samples))
        params[lab] = np.maximum(ell, 1e-300)
        params[tw] = ell * rng.random(samples)
        weight *= 0.5 * cap * cap
    return params, weight


def sys_region_volumes(model: str, eps_values: Iterable[float], cap: float | None = None,
                       samples: int = DEFAULT_SAMPLES, seed: int = 0,
                       word_budget: int = DEFAULT_WORD_BUDGET) -> list[VolumeEstimate]:
    """Norbury volume of {sys- >= eps} in the model's chart, for several eps at once.

    One sample is drawn on the chart for the smallest eps and shared by all
    eps, so the estimates are exactly nonincreasing in eps. sys- is the
    minimum over one-sided words up to word_budget; a point is uncertified
    when the budget + 2 minimum moves it across an eps threshold.
    """
    eps_values = [float(e) for e in eps_values]
    if any(e <= 0 for e in eps_values):
        raise ValueError("eps must be positive")
    cap = default_cap(model) if cap is None else float(cap)
    if cap < max(eps_values):
        raise ValueError("cap must be at least eps")
    if samples < 2:
        raise ValueError("need at least two samples")
    lo = min(eps_values)
    params, weight = _sample_chart(model, lo, cap, samples, seed)
    s1 = batch_sys_minus(model, params, word_budget)
    s2 = batch_sys_minus(model, params, word_budget + 2)
    coords = MODELS[model].one_sided_coords
    out = []
    for eps in eps_values:
        inside = np.ones(samples, dtype=bool)
        for lab in coords:
            inside &= params[lab] >= eps
        hit = inside & (s1 >= eps)
        hit2 = inside & (s2 >= eps)
        moved = int(np.count_nonzero(hit != hit2))
        f = hit.astype(float) * weight
        out.append(VolumeEstimate(float(f.mean()), float(f.std(ddof=1)) / math.sqrt(samples),
                                  "importance", samples, seed, moved == 0,
                                  {"eps": eps, "cap": cap, "word_budget": word_budget,
                                   "uncertified_points": moved,
                                   "accepted": int(np.count_nonzero(hit))}))
    return out


def sys_region_volume(model: str, eps: float, cap: float | None = None,
                      samples: int = DEFAULT_SAMPLES, seed: int = 0,
                      word_budget: int = DEFAULT_WORD_BUDGET) -> VolumeEstimate:
    return sys_region_volumes(model, [eps], cap, samples, seed, word_budget)[0]
