"""Closed geodesics as words: intersection counts and simple-curve enumeration.

Intersections are counted on lifts. Let g be the holonomy of a word w with
axis A. Every crossing of the closed geodesic with another one (or with
itself) shows up as a translate of the other axis crossing A, and two such
translates give the same crossing iff they differ by a power of g.

The search stays near the basepoint. With P_j the prefixes of w, the
rotated axes A_j = P_j^-1 A all pass close to the basepoint, and each
candidate translate v A'_i (v in a word ball of radius C, A'_i a rotated
axis of the other curve) is tested against A_j in a frame adapted to A_j.
The crossing position is transported back to A by adding the accumulated
per-letter offsets, then reduced modulo the translation length of g. No long
product of matrices is ever formed, so the counts stay reliable for long
words. A count is certified when it does not change at C + 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .hypgeo import GeometryError, Isometry, axis_endpoints
from .surface import HolonomyRep, curve_length, holonomy_of_word, mp_namespace, qinv, qmul
from .words import canonical, cyclic_reduce, invert, is_proper_power, letter_count, word_classes

SAME_LINE_TOL = 1e-8
POSITION_TOL = 1e-7


@dataclass(frozen=True)
class CurveRecord:
    word: str
    sided: str
    length: float
    self_intersections: int | None = None


@dataclass(frozen=True)
class CountSeries:
    lengths: tuple[float, ...]
    label: str = ""
    certified: bool = True
    complete_to: float | None = None  # every curve up to this length is listed
    records: tuple[CurveRecord, ...] = ()

    def __post_init__(self):
        ls = tuple(sorted(float(x) for x in self.lengths))
        if ls and ls[0] <= 0:
            raise ValueError("lengths must be positive")
        object.__setattr__(self, "lengths", ls)

    def __len__(self) -> int:
        return len(self.lengths)


class SelfIntersection(NamedTuple):
    count: int
    certified: bool


def rep_word_classes(rep: HolonomyRep, budget: int) -> Iterator[str]:
    return word_classes(rep.basis, budget)


def _ball(letters: str, radius: int) -> list[str]:
    alphabet = list(letters) + [c.upper() for c in letters]
    out, frontier = [""], [""]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for ch in alphabet:
                if v and v[-1] == ch.swapcase():
                    continue
                nxt.append(v + ch)
        out.extend(nxt)
        frontier = nxt
    return out


def _normalizer(rep_pt: float, att: float) -> np.ndarray:
    """Orientation-preserving map sending rep_pt -> 0 and att -> infinity."""
    if math.isinf(att):
        n = np.array([[1.0, -rep_pt], [0.0, 1.0]])
    elif math.isinf(rep_pt):
        n = np.array([[0.0, -1.0], [1.0, -att]])
    elif rep_pt < att:
        n = np.array([[1.0, -rep_pt], [1.0, -att]])
    else:
        n = np.array([[-1.0, rep_pt], [1.0, -att]])
    return n / math.sqrt(abs(np.linalg.det(n)))


def _endpoint_vectors(rep_pt: float, att: float) -> np.ndarray:
    """Projective vectors (x, 1) or (1, 0) of the two endpoints, as columns."""
    cols = [(1.0, 0.0) if math.isinf(x) else (x, 1.0) for x in (rep_pt, att)]
    return np.array(cols).T


class _Axes:
    """Rotated axes of a cyclic word, with frames and offsets along the main axis."""

    def __init__(self, rep: HolonomyRep, w: str):
        self.word = w
        g = holonomy_of_word(rep, w)
        self.length = curve_length(rep, w)
        n = len(w)
        self.frames, self.ends = [], []
        for j in range(n):
            rot = w[j:] + w[:j]
            e = axis_endpoints(holonomy_of_word(rep, rot))
            self.frames.append(_normalizer(*e))
            self.ends.append(_endpoint_vectors(*e))
        # offset of A_j's origin, measured along A_0 = A
        self.offsets = [0.0]
        for j in range(n):
            x = rep.generators[w[j].lower()]
            x = x if w[j].islower() else x.inverse()
            nxt = self.frames[(j + 1) % n]
            m = self.frames[j] @ x.m @ np.linalg.inv(nxt)
            z = _apply_to_i(m, x.det)
            self.offsets.append(self.offsets[-1] + math.log(abs(z)))
        if abs(self.offsets[-1] - self.length) > 1e-6 * max(1.0, self.length):
            raise GeometryError("inconsistent axis offsets")
        self.offsets.pop()
        steps = np.diff(self.offsets + [self.length])
        self.window = float(np.abs(steps).max()) + 1.0


def _apply_to_i(m: np.ndarray, det: int) -> complex:
    z = -1j if det < 0 else 1j  # conj(i) for orientation-reversing maps
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def _crossings(rep: HolonomyRep, main: _Axes, other: _Axes, radius: int, same_word: bool):
    """Positions (mod the length of the main curve) and angles of crossing translates."""
    ball = _ball(rep.basis, radius)
    vmats = [holonomy_of_word(rep, v).m for v in ball]
    # endpoints of every candidate line v A'_i, shape (m, 2, 2): columns are endpoints
    cands = np.array([vm @ e for vm in vmats for e in other.ends])
    keys = [(b, i) for b in range(len(ball)) for i in range(len(other.ends))]
    ell = main.length
    found = []
    for j, frame in enumerate(main.frames):
        u = np.einsum("ab,nbc->nac", frame, cands)
        num, den = u[:, 0, :], u[:, 1, :]
        norm = np.hypot(num, den)
        zero = np.abs(num) < SAME_LINE_TOL * norm   # endpoint at 0
        inf = np.abs(den) < SAME_LINE_TOL * norm    # endpoint at infinity
        same = (zero[:, 0] & inf[:, 1]) | (zero[:, 1] & inf[:, 0])
        if same.any():
            if not same_word:
                raise GeometryError("curves share an axis")
            for idx in np.nonzero(same)[0]:
                _check_translation(rep, main, j, ball[keys[idx][0]], keys[idx][1])
        with np.errstate(divide="ignore", invalid="ignore"):
            x = num / den
            prod = x[:, 0] * x[:, 1]
        ok = np.isfinite(prod) & (prod < 0) & ~same & ~zero.any(axis=1) & ~inf.any(axis=1)
        for idx in np.nonzero(ok)[0]:
            x1, x2 = x[idx]
            s = 0.5 * math.log(-x1 * x2)
            if abs(s) > main.window:
                continue  # found again near another rotation
            t = (main.offsets[j] + s) % ell
            found.append((t, abs(x1 + x2) / abs(x1 - x2)))  # |cos| of the crossing angle
    return _dedupe(found, ell)


def _check_translation(rep: HolonomyRep, axes: _Axes, j: int, v: str, i: int) -> None:
    """An element preserving the axis must translate by a multiple of the length."""
    g = holonomy_of_word(rep, v)
    m = axes.frames[j] @ g.m @ np.linalg.inv(axes.frames[i])
    det = g.det  # frames preserve orientation
    shift = axes.offsets[j] + math.log(abs(_apply_to_i(m, det))) - axes.offsets[i]
    ratio = shift / axes.length
    if abs(ratio - round(ratio)) > 1e-6:
        raise GeometryError("non-primitive")


def _dedupe(found, ell: float) -> int:
    found.sort()
    uniq: list[tuple[float, float]] = []
    for t, c in found:
        dup = False
        for t2, c2 in uniq:
            dt = abs(t - t2)
            dt = min(dt, ell - dt)
            if dt <= POSITION_TOL * max(1.0, ell) and abs(c - c2) <= 1e-6:
                dup = True
                break
        if not dup:
            uniq.append((t, c))
    return len(uniq)


def _prepare(rep: HolonomyRep, w: str) -> str:
    w = cyclic_reduce(w)
    if not w:
        raise GeometryError("empty word")
    if is_proper_power(w):
        raise GeometryError("non-primitive")
    curve_length(rep, w)  # raises for elliptic/parabolic classes
    return w


def self_intersection_number(rep: HolonomyRep, w: str, search_budget: int = 2) -> SelfIntersection:
    """Number of transverse self-intersections of the closed geodesic of w."""
    w = _prepare(rep, w)
    axes = _Axes(rep, w)
    c1 = _crossings(rep, axes, axes, search_budget, True)
    c2 = _crossings(rep, axes, axes, search_budget + 2, True)
    return SelfIntersection(c2 // 2, c1 == c2 and c2 % 2 == 0)


def intersection_number(rep: HolonomyRep, w1: str, w2: str, search_budget: int = 2
                        ) -> SelfIntersection:
    """Geometric intersection number of two primitive closed geodesics."""
    w1, w2 = _prepare(rep, w1), _prepare(rep, w2)
    if canonical(w1) == canonical(w2):
        return self_intersection_number(rep, w1, search_budget)
    a1, a2 = _Axes(rep, w1), _Axes(rep, w2)
    c1 = _crossings(rep, a1, a2, search_budget, False)
    c2 = _crossings(rep, a1, a2, search_budget + 2, False)
    return SelfIntersection(c2, c1 == c2)


def is_simple(rep: HolonomyRep, w: str, search_budget: int = 2) -> bool:
    return self_intersection_number(rep, w, search_budget).count == 0


# ---- enumeration of simple closed geodesics -----------------------------

# Structured curve systems per builtin model. On the one-holed Klein bottle
# the one-sided simple curves are gamma_n = (ab)^n a (n in Z) and the only
# two-sided one is ab. On N3 the one-sided curve abc has a one-holed torus
# complement with fundamental group generated by ab and bc; every two-sided
# simple curve lives there and is a Farey word in (ab, bc).
N21_TWO_SIDED = "ab"
N3_SPECIAL = "abc"
N3_TORUS_BASIS = ("ab", "bc")
N12_ONE_SIDED = ("a", "d")


class _HP:
    """Holonomy of a builtin model evaluated in mpmath, for long words."""

    def __init__(self, rep: HolonomyRep, dps: int = 40):
        self.F = mp_namespace(dps)
        self.ctx = self.F.ctx
        self.q = rep.quads(self.F)

    def word(self, w: str):
        one, zero = self.ctx.mpf(1), self.ctx.mpf(0)
        m = (one, zero, zero, one)
        for ch in w:
            x = self.q[ch.lower()]
            m = qmul(m, x if ch.islower() else qinv(x))
        return m

    def length(self, m) -> float:
        det = m[0] * m[3] - m[1] * m[2]
        if det < 0:
            m2 = qmul(m, m)
            return float(self.ctx.acosh(abs(m2[0] + m2[3]) / 2))
        return float(2 * self.ctx.acosh(abs(m[0] + m[3]) / 2))


def n21_gamma_word(n: int) -> str:
    """Word of gamma_n = (ab)^n a, cyclically reduced."""
    if n >= 0:
        return "ab" * n + "a"
    return invert("ba" * (-n - 1) + "b")


def _n21_family(rep: HolonomyRep, l_max: float, budget: int):
    hp = _HP(rep, 30 + int(l_max))
    out = []
    cut = {}
    for direction in (1, -1):
        prev = math.inf
        n = 0 if direction == 1 else -1
        steps = 0
        while True:
            if steps >= budget:
                cut[direction] = True
                break
            w = n21_gamma_word(n)
            ell = hp.length(hp.word(w))
            steps += 1
            if ell > l_max and ell >= prev and steps > 2:
                cut[direction] = False
                break
            if ell <= l_max:
                out.append(CurveRecord(canonical(w), "one_sided", ell, 0))
            prev = ell
            n += direction
    return out, not any(cut.values())


def _farey(rep: HolonomyRep, basis: tuple[str, str], l_max: float, budget: int):
    """Simple closed curves of a one-holed torus with free basis (U, V)."""
    hp = _HP(rep, 30 + int(l_max))
    u, v = basis
    mu, mv = hp.word(u), hp.word(v)
    lu, lv = hp.length(mu), hp.length(mv)
    out = [CurveRecord(canonical(w), "two_sided", ell, 0) for w, ell in ((u, lu), (v, lv))
           if ell <= l_max]
    certified = True
    stack = [((u, mu, lu), (v, mv, lv), 1), ((u, mu, lu), (invert(v), qinv(mv), lv), 1)]
    while stack:
        x, y, depth = stack.pop()
        wz = x[0] + y[0]
        mz = qmul(x[1], y[1])
        lz = hp.length(mz)
        if lz > l_max and lz >= max(x[2], y[2]):
            continue  # every descendant is at least as long
        if depth > budget:
            certified = False
            continue
        if lz <= l_max:
            out.append(CurveRecord(canonical(wz), "two_sided", lz, 0))
        z = (wz, mz, lz)
        stack.append((x, z, depth + 1))
        stack.append((z, y, depth + 1))
    return out, certified


def _is_free(rep: HolonomyRep) -> bool:
    basis = set(rep.basis)
    return not any(set(r.lower()) <= basis for r in rep.relations)


def _peripheral(rep: HolonomyRep) -> set[str]:
    return {canonical(w) for w in rep.boundary_words.values()}


def _twin(rep: HolonomyRep) -> HolonomyRep | None:
    """Same model at a generic nearby point, used to tell apart equal-length classes."""
    if rep.model is None:
        return None
    from .surface import builtin_model
    p = {k: (v * (1 + 0.0731 * (i + 1)) if k != "twist" else v + 0.137)
         for i, (k, v) in enumerate(rep.params.items())}
    return builtin_model(rep.model, p)


def _brute(rep: HolonomyRep, sided: str, l_max: float, budget: int, search_budget: int = 2):
    twin = None if _is_free(rep) else _twin(rep)
    per = _peripheral(rep)
    seen: dict[tuple, CurveRecord] = {}
    for w in word_classes(rep.basis, budget):
        s = rep.sided(w)
        if sided != "any" and s != sided:
            continue
        if w in per:
            continue
        try:
            ell = curve_length(rep, w)
        except GeometryError:
            continue
        if ell > l_max:
            continue
        key = (round(ell, 8), round(curve_length(twin, w), 8)) if twin else (w,)
        if key in seen:
            continue
        try:
            si = self_intersection_number(rep, w, search_budget)
        except GeometryError:
            continue  # proper power in the group
        if si.count == 0:
            seen[key] = CurveRecord(w, s, ell, 0)
    return list(seen.values())


def brute_simple(rep: HolonomyRep, sided: str = "any", l_max: float = 10.0, budget: int = 6,
                 search_budget: int = 2) -> CountSeries:
    """One uncertified pass of the word scan, for cross-checking structured systems."""
    recs = sorted(_brute(rep, sided, l_max, budget, search_budget),
                  key=lambda r: (r.length, r.word))
    return CountSeries(tuple(r.length for r in recs), f"{rep.model or 'rep'}:{sided}", False,
                       l_max, tuple(recs))


def enumerate_simple(rep: HolonomyRep, sided: str = "any", l_max: float = 10.0,
                     budget: int | None = None, mode: str = "auto") -> CountSeries:
    """Simple closed geodesics of length at most l_max.

    ``mode="structured"`` uses the known curve systems of the builtin models
    (budget caps the tree depth / family index), ``mode="brute"`` scans word
    classes up to length ``budget`` and tests simplicity geometrically.
    Either way the result is certified when it is unchanged at budget + 2.
    """
    if sided not in ("any", "one_sided", "two_sided"):
        raise ValueError("sided must be one_sided, two_sided or any")
    if mode == "auto":
        mode = "structured" if _has_structure(rep, sided) else "brute"
    if mode == "structured":
        if not _has_structure(rep, sided):
            raise ValueError(f"no structured curve system for {rep.model} ({sided})")
        budget = budget or 100_000
        recs, ok = _structured(rep, sided, l_max, budget)
        _, ok2 = _structured(rep, sided, l_max, budget + 2)
        certified = ok and ok2
    elif mode == "brute":
        budget = budget or 6
        recs = _brute(rep, sided, l_max, budget)
        more = _brute(rep, sided, l_max, budget + 2)
        certified = sorted(round(r.length, 9) for r in recs) == \
            sorted(round(r.length, 9) for r in more)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    recs.sort(key=lambda r: (r.length, r.word))
    return CountSeries(tuple(r.length for r in recs), f"{rep.model or 'rep'}:{sided}",
                       certified, l_max, tuple(recs))


def _has_structure(rep: HolonomyRep, sided: str) -> bool:
    if rep.model == "N21" or rep.model == "N12":
        return True
    return rep.model == "N3" and sided == "two_sided"


def _structured(rep: HolonomyRep, sided: str, l_max: float, budget: int):
    recs: list[CurveRecord] = []
    ok = True
    if rep.model == "N21":
        if sided in ("one_sided", "any"):
            fam, ok = _n21_family(rep, l_max, budget)
            recs += fam
        if sided in ("two_sided", "any"):
            ell = curve_length(rep, N21_TWO_SIDED)
            if ell <= l_max:
                recs.append(CurveRecord(N21_TWO_SIDED, "two_sided", ell, 0))
    elif rep.model == "N12":
        if sided in ("one_sided", "any"):
            for w in N12_ONE_SIDED:
                ell = curve_length(rep, w)
                if ell <= l_max:
                    recs.append(CurveRecord(w, "one_sided", ell, 0))
    elif rep.model == "N3":
        recs, ok = _farey(rep, N3_TORUS_BASIS, l_max, budget)
    return recs, ok
