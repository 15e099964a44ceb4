"""Permutations on the points ``0..n-1`` stored as image tuples.

Products are read left to right: ``a * b`` applies ``a`` first, then ``b``,
so ``(a * b)[i] == b[a[i]]``.  Conjugation follows the same convention,
``y ** x == ~x * y * x``.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence


class PermutationError(ValueError):
    pass


class Permutation(tuple):
    """A bijection of ``range(degree)`` given by its image array."""

    __slots__ = ()

    def __new__(cls, images: Iterable[int] = ()):
        self = tuple.__new__(cls, images)
        n = len(self)
        if n == 0:
            raise PermutationError("a permutation needs positive degree")
        seen = bytearray(n)
        for x in self:
            if not (0 <= x < n) or seen[x]:
                raise PermutationError(f"not a bijection of range({n}): {tuple(self)}")
            seen[x] = 1
        return self

    @classmethod
    def _trusted(cls, images: Iterable[int]) -> "Permutation":
        # skips validation; only for images produced by composing permutations
        return tuple.__new__(cls, images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        if degree <= 0:
            raise PermutationError("a permutation needs positive degree")
        return cls._trusted(range(degree))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int) -> "Permutation":
        """Build from 0-based disjoint cycles."""
        images = list(range(degree))
        seen = set()
        for cyc in cycles:
            for x in cyc:
                if not 0 <= x < degree:
                    raise PermutationError(f"point {x} out of range for degree {degree}")
                if x in seen:
                    raise PermutationError(f"point {x} repeated")
                seen.add(x)
            for i, x in enumerate(cyc):
                images[x] = cyc[(i + 1) % len(cyc)]
        return cls._trusted(images)

    @property
    def degree(self) -> int:
        return len(self)

    @property
    def images(self) -> tuple[int, ...]:
        return tuple(self)

    def __mul__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        return compose(self, other)

    def __invert__(self) -> "Permutation":
        return inverse(self)

    def __pow__(self, e):
        if isinstance(e, tuple):
            return conjugate(self, e)
        return power(self, e)

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self))

    def cycles(self) -> list[tuple[int, ...]]:
        return cycles(self)

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in cycles(self)), reverse=True))

    def order(self) -> int:
        return perm_order(self)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self, base=0)}, degree={len(self)})"

    def __str__(self) -> str:
        return format_cycles(self, base=0)


def compose(a: Sequence[int], b: Sequence[int]) -> Permutation:
    """Apply ``a`` then ``b``."""
    if len(a) != len(b):
        raise PermutationError(f"degree mismatch: {len(a)} vs {len(b)}")
    return Permutation._trusted(map(b.__getitem__, a))


def inverse(a: Sequence[int]) -> Permutation:
    inv = [0] * len(a)
    for i, x in enumerate(a):
        inv[x] = i
    return Permutation._trusted(inv)


def conjugate(y: Sequence[int], x: Sequence[int]) -> Permutation:
    """``y ** x == x^-1 y x``."""
    if len(x) != len(y):
        raise PermutationError(f"degree mismatch: {len(y)} vs {len(x)}")
    out = [0] * len(y)
    for i, yi in enumerate(y):
        out[x[i]] = x[yi]
    return Permutation._trusted(out)


def power(a: Sequence[int], e: int) -> Permutation:
    n = len(a)
    if e < 0:
        a, e = inverse(a), -e
    result = list(range(n))
    base = list(a)
    while e:
        if e & 1:
            result = [base[i] for i in result]
        base = [base[i] for i in base]
        e >>= 1
    return Permutation._trusted(result)


def cycles(a: Sequence[int]) -> list[tuple[int, ...]]:
    seen = bytearray(len(a))
    out = []
    for i in range(len(a)):
        if seen[i] or a[i] == i:
            continue
        cyc = [i]
        seen[i] = 1
        j = a[i]
        while j != i:
            cyc.append(j)
            seen[j] = 1
            j = a[j]
        out.append(tuple(cyc))
    return out


def perm_order(a: Sequence[int]) -> int:
    o = 1
    for c in cycles(a):
        o = o * len(c) // gcd(o, len(c))
    return o


def is_identity(a: Sequence[int]) -> bool:
    return all(i == x for i, x in enumerate(a))


def format_cycles(a: Sequence[int], base: int = 1) -> str:
    """Disjoint-cycle notation, ``base``-indexed; the identity prints as ``()``."""
    cyc = cycles(a)
    if not cyc:
        return "()"
    return "".join("(" + ",".join(str(x + base) for x in c) + ")" for c in cyc)
