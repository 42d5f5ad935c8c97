"""Markoff-Hurwitz tuples: x_1^2 + ... + x_n^2 = k * x_1 * ... * x_n.

Triples use k = 3 (classical Markoff numbers, seed (1, 1, 1)); quadruples use
k = 1 (seed (2, 2, 2, 2)). Tuples are kept sorted nondecreasing.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from math import isqrt, prod

from .geodesics import CountSeries

BRUTE_GUARD = 10 ** 4


@dataclass(frozen=True)
class MarkoffConfig:
    arity: int = 3
    k: int | None = None
    seeds: tuple[tuple[int, ...], ...] = ()
    trace_scale: int | None = None  # length of t is 2 arccosh(trace_scale * max(t) / 2)

    def __post_init__(self):
        if self.arity < 3:
            raise ValueError("arity must be at least 3")
        k = self.k if self.k is not None else {3: 3, 4: 1}.get(self.arity)
        if k is None:
            raise ValueError("give the coefficient k for this arity")
        object.__setattr__(self, "k", k)
        seeds = self.seeds
        if not seeds and self.arity in (3, 4):
            seeds = ((1, 1, 1),) if self.arity == 3 else ((2, 2, 2, 2),)
        seeds = tuple(tuple(sorted(int(x) for x in s)) for s in seeds)
        for s in seeds:
            if len(s) != self.arity or not satisfies(s, k):
                raise ValueError(f"seed {s} does not satisfy the equation")
        object.__setattr__(self, "seeds", seeds)
        if self.trace_scale is None:
            object.__setattr__(self, "trace_scale", 3 if (self.arity, k) == (3, 3) else 1)


def satisfies(t, k: int) -> bool:
    return sum(x * x for x in t) == k * prod(t)


def vieta_move(t: tuple[int, ...], i: int, k: int = 3) -> tuple[int, ...]:
    others = prod(t[:i] + t[i + 1:])
    new = k * others - t[i]
    if new <= 0:
        raise ValueError("left positive cone")
    return tuple(sorted(t[:i] + (new,) + t[i + 1:]))


def markoff_orbit(config: MarkoffConfig, bound: int) -> list[tuple[int, ...]]:
    """All tuples reachable from the seeds by Vieta moves with max coordinate <= bound."""
    if not config.seeds:
        raise ValueError("no seeds")
    start = [s for s in config.seeds if s[-1] <= bound]
    if not start:
        raise ValueError("bound below every seed")
    seen = set(start)
    queue = deque(start)
    while queue:
        t = queue.popleft()
        for i in range(config.arity):
            if i and t[i] == t[i - 1]:
                continue  # same move as the previous slot
            try:
                u = vieta_move(t, i, config.k)
            except ValueError:
                continue
            if u[-1] <= bound and u not in seen:
                seen.add(u)
                queue.append(u)
    return sorted(seen)


def markoff_bruteforce(config: MarkoffConfig, bound: int) -> list[tuple[int, ...]]:
    """Exhaustive scan of sorted solutions with coordinates <= bound.

    For a sorted solution the last coordinate x is a root of
    x^2 - k P x + S = 0 (P, S the product and square sum of the others), and
    either root lies between the others' maximum and bound only if
    P <= n * bound / k. Prefixes are scanned under that product cap and the
    last coordinate is solved exactly.
    """
    if bound > BRUTE_GUARD:
        raise ValueError("bound too large for exhaustive scan")
    n, k = config.arity, config.k
    cap = n * bound // k
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], p: int, s: int):
        if len(prefix) == n - 1:
            disc = (k * p) ** 2 - 4 * s
            if disc < 0:
                return
            r = isqrt(disc)
            if r * r != disc:
                return
            for num in {k * p - r, k * p + r}:
                if num % 2 == 0:
                    x = num // 2
                    if prefix[-1] <= x <= bound:
                        out.append(tuple(prefix) + (x,))
            return
        lo = prefix[-1] if prefix else 1
        x = lo
        while x <= bound and p * x <= cap:
            rec(prefix + [x], p * x, s + x * x)
            x += 1

    if bound >= 1:
        rec([], 1, 0)
    return sorted(set(out))


def tuple_length(t, trace_scale: int = 1) -> float:
    """2 arccosh(trace_scale * max(t) / 2), the default tuple-to-length map."""
    return 2.0 * math.acosh(trace_scale * max(t) / 2.0)


def permutations_count(t) -> int:
    """Number of distinct orderings of t."""
    out = math.factorial(len(t))
    for x in set(t):
        out //= math.factorial(t.count(x))
    return out


def orbit_lengths(config: MarkoffConfig, bound: int, ordered: bool = True) -> CountSeries:
    """Length series of the orbit; tuples of length zero (trace 2) are dropped.

    With ordered=True every sorted tuple is counted once per distinct
    ordering, i.e. the series counts solutions of the equation rather than
    their sorted representatives.
    """
    lengths = []
    for t in markoff_orbit(config, bound):
        ell = tuple_length(t, config.trace_scale)
        if ell > 0:
            lengths += [ell] * (permutations_count(t) if ordered else 1)
    return CountSeries(tuple(sorted(lengths)), f"markoff{config.arity}", True,
                       complete_to=tuple_length((bound,), config.trace_scale))


@dataclass(frozen=True)
class LengthCalibration:
    scale: float
    offset: float
    r2: float
    pairs: int


def calibrate_lengths(tuple_lengths, holonomy_lengths, pairs: int | None = None) -> LengthCalibration:
    """Affine map holonomy ~ scale * tuple + offset from the k-th smallest of each list.

    Meant for comparing Markoff quadruple lengths with one-sided holonomy
    lengths on N13; the constants are reported, not assumed.
    """
    from scipy.stats import linregress
    a, b = sorted(tuple_lengths), sorted(holonomy_lengths)
    n = min(len(a), len(b)) if pairs is None else pairs
    if n < 3 or n > min(len(a), len(b)):
        raise ValueError("need at least three pairs from each list")
    res = linregress(a[:n], b[:n])
    return LengthCalibration(float(res.slope), float(res.intercept), float(res.rvalue ** 2), n)
