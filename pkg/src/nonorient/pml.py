"""Symbolic models of projective measured laminations.

The one-holed Klein bottle N21: its one-sided simple curves are gamma_n
(n in Z) and the only two-sided one is gamma_inf. Consecutive gamma_n are
disjoint, so PML is a circle made of the arcs [gamma_n, gamma_{n+1}] with
the marked point gamma_inf where both ends accumulate. The mapping class
group acts through the twist along gamma_inf and a reflection.

Also here: the split of a lamination into weighted one-sided atoms and the
rest, the invariant weight vector w-, intersections of the open balls B(gamma),
the labelled Markoff quadruple tree modelling curves on N13, and the side
predicate of the two-disk picture of PML(N3).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping

GAMMA_INF = "inf"
GENERATORS = ("twist", "reflect")


# ---- the N21 circle ------------------------------------------------------

@dataclass(frozen=True)
class PmlN21Point:
    """gamma_inf, or [t gamma_n + (1 - t) gamma_{n+1}] with t in [0, 1].

    (n, 0) is the same point as (n + 1, 1); points are stored with t in
    (0, 1], so gamma_n is (n, 1).
    """
    n: int | None = None
    t: Fraction = Fraction(1)

    def __post_init__(self):
        if self.n is None:
            object.__setattr__(self, "t", Fraction(0))
            return
        t = Fraction(self.t)
        if not 0 <= t <= 1:
            raise ValueError("t must lie in [0, 1]")
        n = int(self.n)
        if t == 0:
            n, t = n + 1, Fraction(1)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "t", t)

    @classmethod
    def gamma(cls, n: int) -> PmlN21Point:
        return cls(n, Fraction(1))

    @classmethod
    def infinity(cls) -> PmlN21Point:
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.n is None

    @property
    def is_curve(self) -> bool:
        return self.is_infinity or self.t == 1

    def __str__(self) -> str:
        if self.is_infinity:
            return "gamma_inf"
        if self.t == 1:
            return f"gamma_{self.n}"
        return f"[{self.t} gamma_{self.n} + {1 - self.t} gamma_{self.n + 1}]"


def n21_act(g: str, p: PmlN21Point) -> PmlN21Point:
    """twist: (n, t) -> (n + 1, t); reflect: (n, t) -> (-n - 1, 1 - t). Both fix gamma_inf."""
    if g not in GENERATORS:
        raise ValueError(f"unknown generator {g!r}")
    if p.is_infinity:
        return p
    if g == "twist":
        return PmlN21Point(p.n + 1, p.t)
    return PmlN21Point(-p.n - 1, 1 - p.t)


def n21_act_word(word: Iterable[str], p: PmlN21Point) -> PmlN21Point:
    """Apply generators right to left, like composing maps."""
    for g in reversed(list(word)):
        p = n21_act(g, p)
    return p


@dataclass(frozen=True)
class OrbitClosure:
    kind: str  # "finite", "curves" or "arc-orbit"
    points: frozenset  # orbit points reached within the depth
    accumulation: frozenset  # limit points not in the orbit

    @property
    def closure(self) -> frozenset:
        return self.points | self.accumulation


def n21_orbit_closure(p: PmlN21Point, depth: int) -> OrbitClosure:
    """Orbit to the given word depth plus its accumulation points.

    Every infinite orbit accumulates only at gamma_inf, since the points
    (n, t) converge to it as n -> +-inf.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    seen = {p}
    frontier = [p]
    for _ in range(depth):
        nxt = []
        for q in frontier:
            for g in GENERATORS:
                r = n21_act(g, q)
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    if p.is_infinity:
        return OrbitClosure("finite", frozenset(seen), frozenset())
    inf = frozenset({PmlN21Point.infinity()})
    kind = "curves" if p.is_curve else "arc-orbit"
    return OrbitClosure(kind, frozenset(seen), inf)


def n21_intersection(x: Hashable, y: Hashable) -> int:
    """Intersection numbers of simple curves on N21, labels n (gamma_n) or "inf".

    i(gamma_n, gamma_m) = max(|n - m| - 1, 0), i(gamma_n, gamma_inf) = 1.
    """
    if x == GAMMA_INF and y == GAMMA_INF:
        return 0
    if GAMMA_INF in (x, y):
        return 1
    return max(abs(int(x) - int(y)) - 1, 0)


# ---- laminations and their one-sided part --------------------------------

@dataclass(frozen=True)
class Multicurve:
    """Formal positive combination of distinct curves, stored sorted by label."""
    parts: tuple[tuple[Hashable, Fraction | float], ...] = ()

    def __post_init__(self):
        parts = tuple(self.parts.items()) if isinstance(self.parts, Mapping) else tuple(self.parts)
        labels = [lab for lab, _ in parts]
        if len(set(labels)) != len(labels):
            raise ValueError("components must be distinct")
        if any(w <= 0 for _, w in parts):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "parts", tuple(sorted(parts, key=lambda p: repr(p[0]))))

    @property
    def support(self) -> frozenset:
        return frozenset(lab for lab, _ in self.parts)

    def weights(self) -> dict:
        return dict(self.parts)

    def __add__(self, other: Multicurve) -> Multicurve:
        w = self.weights()
        for lab, x in other.parts:
            w[lab] = w.get(lab, 0) + x
        return Multicurve(tuple(w.items()))

    def __len__(self) -> int:
        return len(self.parts)


@dataclass(frozen=True)
class SymbolicLamination:
    """lambda = (weighted one-sided atoms) + plus_part.

    plus_part is an opaque (label, weight) standing for the component without
    one-sided closed leaves, or None.
    """
    atoms: Mapping[Hashable, Fraction | float] = field(default_factory=dict)
    plus_part: tuple[Hashable, Fraction | float] | None = None

    def __post_init__(self):
        atoms = dict(self.atoms)
        if any(w <= 0 for w in atoms.values()):
            raise ValueError("weights must be positive")
        if self.plus_part is not None and self.plus_part[1] <= 0:
            raise ValueError("weights must be positive")
        object.__setattr__(self, "atoms", atoms)

    def __eq__(self, other):
        return (isinstance(other, SymbolicLamination) and self.atoms == other.atoms
                and self.plus_part == other.plus_part)

    def __hash__(self):
        return hash((frozenset(self.atoms.items()), self.plus_part))


def check_disjoint(lam: SymbolicLamination, i_oracle: Callable[[Hashable, Hashable], int]) -> bool:
    labels = list(lam.atoms)
    return all(i_oracle(a, b) == 0 for k, a in enumerate(labels) for b in labels[k + 1:])


def decompose(lam: SymbolicLamination) -> tuple[Multicurve, tuple | None]:
    return Multicurve(tuple(lam.atoms.items())), lam.plus_part


def recombine(minus: Multicurve, plus: tuple | None) -> SymbolicLamination:
    return SymbolicLamination(minus.weights(), plus)


def w_minus(lam: SymbolicLamination, genus: int) -> tuple:
    """Atom weights in decreasing order, padded with zeros to length genus."""
    w = sorted(lam.atoms.values(), reverse=True)
    if len(w) > genus:
        raise ValueError("too many disjoint one-sided curves")
    return tuple(w) + (0,) * (genus - len(w))


def n21_lamination(p: PmlN21Point, scale: Fraction | float = 1) -> SymbolicLamination:
    """Measured lamination representing the PML point p, scaled by scale."""
    if p.is_infinity:
        return SymbolicLamination({}, (GAMMA_INF, scale))
    atoms = {p.n: p.t * scale}
    if p.t != 1:
        atoms[p.n + 1] = (1 - p.t) * scale
    return SymbolicLamination(atoms)


def n21_act_lamination(g: str, lam: SymbolicLamination) -> SymbolicLamination:
    """Action on labels: twist n -> n + 1, reflect n -> -n; gamma_inf is fixed."""
    if g not in GENERATORS:
        raise ValueError(f"unknown generator {g!r}")
    move = (lambda n: n + 1) if g == "twist" else (lambda n: -n)
    return SymbolicLamination({move(n): w for n, w in lam.atoms.items()}, lam.plus_part)


# ---- balls around one-sided multicurves ----------------------------------

@dataclass(frozen=True)
class Ball:
    """B(gamma): laminations having every component of gamma as a leaf."""
    support: frozenset


def ball(gamma: Multicurve | Ball) -> Ball:
    return gamma if isinstance(gamma, Ball) else Ball(gamma.support)


def ball_intersect(gamma: Multicurve | Ball, delta: Multicurve | Ball,
                   i_oracle: Callable[[Hashable, Hashable], int] | Mapping) -> Ball | None:
    """B(gamma) n B(delta): B(gamma + delta) when i(gamma, delta) = 0, else empty (None)."""
    a, b = ball(gamma).support, ball(delta).support
    for x in a:
        for y in b:
            if x == y:
                continue
            try:
                i = i_oracle[(x, y)] if isinstance(i_oracle, Mapping) else i_oracle(x, y)
            except (KeyError, TypeError, ValueError):
                i = None
            if i is None:
                raise ValueError("intersection oracle incomplete")
            if i:
                return None
    return Ball(a | b)


# ---- N13: labelled Markoff quadruple tree ---------------------------------

@dataclass(frozen=True)
class QuadrupleOrbit:
    """Curves are labels; each quadruple lists the labels in its four slots."""
    values: Mapping[int, int]
    quads: tuple[tuple[int, int, int, int], ...]

    def quadruple_values(self, q: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(self.values[x] for x in q)


def n13_orbit(depth: int, seed: tuple[int, int, int, int] = (2, 2, 2, 2)) -> QuadrupleOrbit:
    """Vieta tree of x^2 + y^2 + z^2 + w^2 = xyzw to the given depth.

    A move at slot i creates a new curve label for that slot and keeps the
    other three. Moving back through the slot that created a node is skipped,
    since it returns to the parent.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    values = {i: seed[i] for i in range(4)}
    root = (0, 1, 2, 3)
    quads = [root]
    queue = deque([(root, None, 0)])
    while queue:
        q, came, d = queue.popleft()
        if d == depth:
            continue
        for i in range(4):
            if i == came:
                continue
            others = [values[q[j]] for j in range(4) if j != i]
            new = others[0] * others[1] * others[2] - values[q[i]]
            label = len(values)
            values[label] = new
            child = q[:i] + (label,) + q[i + 1:]
            quads.append(child)
            queue.append((child, i, d + 1))
    return QuadrupleOrbit(values, tuple(quads))


def n13_tangency(x: int, y: int, orbit: QuadrupleOrbit) -> bool:
    """B(x) and B(y) are tangent (i = 1) iff the curves share a quadruple."""
    if x not in orbit.values or y not in orbit.values:
        raise ValueError("unknown curve")
    if x == y:
        return False
    return any(x in q and y in q for q in orbit.quads)


def tangency_graph(orbit: QuadrupleOrbit) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {x: set() for x in orbit.values}
    for q in orbit.quads:
        for x in q:
            adj[x].update(y for y in q if y != x)
    return adj


def is_connected(adj: Mapping[Hashable, set]) -> bool:
    if not adj:
        return True
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(adj)


# ---- N3: two-disk picture --------------------------------------------------

def n3_side(rep, multicurve: Multicurve, gamma: str = "abc", search_budget: int = 2) -> str:
    """Which part of PML(N3) the multicurve lies in, relative to the one-sided curve gamma.

    "ball" when gamma is a component, "positive" when some component crosses
    gamma (the disk cut out by i(gamma, .) > 0), otherwise "equator" (the
    laminations of the one-holed torus complement).
    """
    from .geodesics import intersection_number
    from .words import canonical
    cg = canonical(gamma)
    labels = [canonical(w) for w in multicurve.support]
    if cg in labels:
        return "ball"
    if any(intersection_number(rep, gamma, w, search_budget).count > 0 for w in labels):
        return "positive"
    return "equator"
