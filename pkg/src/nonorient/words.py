"""Words in free groups, written as strings.

Generators are single lowercase letters; the uppercase letter is the inverse.
So "aB" is a * b^-1.
"""
from __future__ import annotations

from typing import Iterator, Sequence


def invert(w: str) -> str:
    return w[::-1].swapcase()


def free_reduce(w: str) -> str:
    out: list[str] = []
    for ch in w:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def cyclic_reduce(w: str) -> str:
    w = free_reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == w[j].swapcase():
        i += 1
        j -= 1
    return w[i:j + 1]


def _order(w: str) -> str:
    # compare with lowercase letters first: a < b < ... < A < B
    return w.swapcase()


def _least_rotation(w: str) -> str:
    if not w:
        return w
    return min((w[i:] + w[:i] for i in range(len(w))), key=_order)


def canonical(w: str) -> str:
    """Least rotation among the cyclic reductions of w and of its inverse.

    Lowercase letters sort before uppercase ones, so "ab" beats "AB".
    """
    w = cyclic_reduce(w)
    return min(_least_rotation(w), _least_rotation(invert(w)), key=_order)


def is_proper_power(w: str) -> bool:
    n = len(w)
    for d in range(1, n // 2 + 1):
        if n % d == 0 and w[:d] * (n // d) == w:
            return True
    return False


def letter_count(w: str, letters: str) -> int:
    letters = letters.lower()
    return sum(1 for ch in w if ch.lower() in letters)


def word_classes(basis: Sequence[str], budget: int) -> Iterator[str]:
    """Primitive cyclic words up to length ``budget``, one per class up to inversion.

    Output order is by length, then lexicographic within a length.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    alphabet = sorted(list(basis) + [g.upper() for g in basis], key=_order)
    for n in range(1, budget + 1):
        found: list[str] = []
        stack = [(ch,) for ch in reversed(alphabet)]
        while stack:
            prefix = stack.pop()
            if len(prefix) == n:
                w = "".join(prefix)
                if n > 1 and w[0] == w[-1].swapcase():
                    continue
                if canonical(w) == w and not is_proper_power(w):
                    found.append(w)
                continue
            last = prefix[-1]
            for ch in reversed(alphabet):
                if ch != last.swapcase():
                    stack.append(prefix + (ch,))
        yield from sorted(found, key=_order)
