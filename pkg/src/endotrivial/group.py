"""Permutation groups with a stabilizer-chain index.

The chain uses the full ordered base ``0, 1, ..., n-1`` while it is being
built.  Levels whose basic orbit is trivial are dropped once the chain is
complete, so every stored base point is the smallest point moved by the
stabilizer of the previous points.  A side effect is that the sifted
transversal indices give canonical coset representatives.

Construction is a deterministic incremental Schreier-Sims: every Schreier
generator of every level is sifted, in a fixed order, before the chain is
declared complete.  No randomisation is involved, so the same generator
list always produces the same chain.
"""

from __future__ import annotations

import logging
from array import array
from random import Random
from typing import Iterable, Iterator, Sequence

from .caps import DEFAULT_CAPS, CapExceeded, Caps
from .perm import Permutation, PermutationError, inverse

log = logging.getLogger(__name__)

_IDENT256 = bytes(range(256))


class _Level:
    __slots__ = ("point", "gens", "orbit", "index", "trans", "tinv", "done")

    def __init__(self, point: int, ident: Permutation):
        self.point = point
        self.gens: list[Permutation] = []
        self.orbit = [point]
        self.index = {point: 0}
        self.trans = {point: ident}
        self.tinv = {point: ident}
        # (orbit position, generator position) pairs already sifted
        self.done: set[tuple[int, int]] = set()

    def _add_point(self, q: int, u: Permutation) -> None:
        self.index[q] = len(self.orbit)
        self.orbit.append(q)
        self.trans[q] = u
        self.tinv[q] = inverse(u)

    def add_generator(self, s: Permutation) -> None:
        self.gens.append(s)
        trans = self.trans
        # the new generator applied to old points, then closure with all gens
        queue = []
        for pt in self.orbit:
            q = s[pt]
            if q not in trans:
                self._add_point(q, Permutation._trusted(map(s.__getitem__, trans[pt])))
                queue.append(q)
        gens = self.gens
        while queue:
            pt = queue.pop()
            u = trans[pt]
            for g in gens:
                q = g[pt]
                if q not in trans:
                    self._add_point(q, Permutation._trusted(map(g.__getitem__, u)))
                    queue.append(q)


class _Chain:
    """Mutable chain used during construction."""

    def __init__(self, degree: int):
        self.degree = degree
        self.ident = Permutation.identity(degree)
        self.levels = [_Level(i, self.ident) for i in range(degree)]

    def order(self) -> int:
        o = 1
        for lev in self.levels:
            o *= len(lev.orbit)
        return o

    def strip(self, g: Sequence[int], start: int = 0) -> tuple[Sequence[int], int]:
        levels = self.levels
        for j in range(start, self.degree):
            pt = g[j]
            if pt == j:
                continue
            ui = levels[j].tinv.get(pt)
            if ui is None:
                return g, j
            g = tuple(map(ui.__getitem__, g))
        return g, self.degree

    def add(self, g: Sequence[int]) -> bool:
        """Extend the group by ``g``; returns False when ``g`` was already in it."""
        h, j = self.strip(g)
        if j == self.degree:
            return False
        self._insert(Permutation._trusted(h), 0, j)
        self._complete(j)
        return True

    def _insert(self, h: Permutation, lo: int, hi: int) -> None:
        for lev in self.levels[lo : hi + 1]:
            lev.add_generator(h)

    def _complete(self, i: int) -> None:
        # levels above i are complete; walk down, sifting Schreier generators
        levels = self.levels
        while i >= 0:
            lev = levels[i]
            found = None
            for a, pt in enumerate(lev.orbit):
                u = lev.trans[pt]
                for b, s in enumerate(lev.gens):
                    if (a, b) in lev.done:
                        continue
                    lev.done.add((a, b))
                    q = s[pt]
                    vinv = lev.tinv[q]
                    # u * s * v^-1
                    sg = tuple(vinv[s[x]] for x in u)
                    h, j = self.strip(sg, i + 1)
                    if j < self.degree:
                        found = (Permutation._trusted(h), j)
                        break
                if found:
                    break
            if found is None:
                i -= 1
                continue
            h, j = found
            self._insert(h, i + 1, j)
            i = j


class GroupHandle:
    """An immutable permutation group with a complete stabilizer chain."""

    __slots__ = (
        "degree",
        "generators",
        "_levels",
        "_order",
        "_keys",
        "_strong",
        "__weakref__",
    )

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = (), *, _chain: _Chain | None = None):
        if degree <= 0:
            raise PermutationError("empty degree")
        gens = []
        for g in generators:
            if len(g) != degree:
                raise PermutationError(f"generator of degree {len(g)} in a group of degree {degree}")
            gens.append(g if isinstance(g, Permutation) else Permutation(g))
        self.degree = degree
        if _chain is None:
            _chain = _Chain(degree)
            for g in gens:
                _chain.add(g)
        # drop identities from the stored generator list, keep order otherwise
        self.generators = tuple(g for g in gens if not g.is_identity())
        self._levels = tuple(
            (lev.point, tuple(lev.orbit), dict(lev.index), lev.trans, lev.tinv)
            for lev in _chain.levels
            if len(lev.orbit) > 1
        )
        self._order = _chain.order()
        self._keys = None
        self._strong = None

    # -- basic queries -------------------------------------------------------
    def order(self) -> int:
        return self._order

    def __len__(self) -> int:
        return self._order

    @property
    def cached_order(self) -> int:
        return self._order

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(lev[0] for lev in self._levels)

    @property
    def basic_orbits(self) -> tuple[tuple[int, ...], ...]:
        return tuple(lev[1] for lev in self._levels)

    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def is_trivial(self) -> bool:
        return self._order == 1

    def sift(self, g: Sequence[int]) -> tuple[Sequence[int], int]:
        """Residue of ``g`` and the number of levels it passed."""
        for k, (b, _, _, _, tinv) in enumerate(self._levels):
            ui = tinv.get(g[b])
            if ui is None:
                return g, k
            g = tuple(map(ui.__getitem__, g))
        return g, len(self._levels)

    def contains(self, g: Sequence[int]) -> bool:
        if len(g) != self.degree:
            raise PermutationError(f"degree mismatch: {len(g)} vs {self.degree}")
        h, k = self.sift(g)
        return k == len(self._levels) and all(i == x for i, x in enumerate(h))

    __contains__ = contains

    def is_subgroup_of(self, other: "GroupHandle") -> bool:
        return self.degree == other.degree and all(other.contains(g) for g in self.generators)

    def equals(self, other: "GroupHandle") -> bool:
        return self._order == other._order and self.is_subgroup_of(other)

    def is_normal_in(self, other: "GroupHandle") -> bool:
        return self.is_subgroup_of(other) and all(
            self.contains(h ** g) for g in other.generators for h in self.generators
        )

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(a * b == b * a for i, a in enumerate(gens) for b in gens[i + 1 :])

    # -- enumeration ---------------------------------------------------------
    def elements(self, cap: int | None = None) -> Iterator[Permutation]:
        """All elements, lexicographic in transversal indices (first level most significant)."""
        cap = DEFAULT_CAPS.enum if cap is None else cap
        if self._order > cap:
            raise CapExceeded("enum", cap, self._order)
        return self._iter(0)

    def _iter(self, k: int) -> Iterator[Permutation]:
        if k == len(self._levels):
            yield self.identity()
            return
        _, orbit, _, trans, _ = self._levels[k]
        tail = list(self._iter(k + 1)) if self._order <= 1 << 16 else None
        for pt in orbit:
            u = trans[pt]
            for h in tail if tail is not None else self._iter(k + 1):
                yield Permutation._trusted(map(u.__getitem__, h))

    def element_list(self, cap: int | None = None) -> list[Permutation]:
        return list(self.elements(cap))

    def element_keys(self) -> frozenset:
        """Set of element encodings (see :func:`perm_key`), cached."""
        if self._keys is None:
            self._keys = frozenset(perm_key(g) for g in self.elements())
        return self._keys

    def rank(self, g: Sequence[int]) -> int:
        """Position of ``g`` in :meth:`elements` order."""
        r = 0
        for b, orbit, index, _, tinv in self._levels:
            pt = g[b]
            j = index.get(pt)
            if j is None:
                raise ValueError("element not in group")
            r = r * len(orbit) + j
            ui = tinv[pt]
            g = tuple(map(ui.__getitem__, g))
        if any(i != x for i, x in enumerate(g)):
            raise ValueError("element not in group")
        return r

    def unrank(self, r: int) -> Permutation:
        if not 0 <= r < self._order:
            raise IndexError(r)
        digits = []
        for _, orbit, _, _, _ in reversed(self._levels):
            r, d = divmod(r, len(orbit))
            digits.append(d)
        g = list(range(self.degree))
        # g = u_{k-1} ... u_0, so apply from the deepest level outwards
        for (_, orbit, _, trans, _), d in zip(reversed(self._levels), digits):
            u = trans[orbit[d]]
            g = [u[x] for x in g]
        return Permutation._trusted(g)

    def transversal_tables(self) -> list[tuple[int, list[int], list[Permutation]]]:
        """Per level: base point, orbit and transversal elements in orbit order."""
        return [(b, list(orbit), [trans[pt] for pt in orbit]) for b, orbit, _, trans, _ in self._levels]

    def random_element(self, rng: Random) -> Permutation:
        g = list(range(self.degree))
        for _, orbit, _, trans, _ in reversed(self._levels):
            u = trans[orbit[rng.randrange(len(orbit))]]
            g = [u[x] for x in g]
        return Permutation._trusted(g)

    def strong_generators(self) -> tuple[Permutation, ...]:
        if self._strong is None:
            seen = {}
            for _, orbit, _, trans, _ in self._levels:
                for pt in orbit[1:]:
                    seen.setdefault(trans[pt], None)
            self._strong = tuple(seen)
        return self._strong

    # -- construction helpers ------------------------------------------------
    def closure(self, extra: Iterable[Sequence[int]]) -> "GroupHandle":
        """The group generated by this group and ``extra``."""
        return group_from_generators(self.degree, list(self.generators) + list(extra))

    def orbits(self) -> list[list[int]]:
        seen = [-1] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start] >= 0:
                continue
            orb = [start]
            seen[start] = len(out)
            for pt in orb:
                for g in self.generators:
                    q = g[pt]
                    if seen[q] < 0:
                        seen[q] = len(out)
                        orb.append(q)
            out.append(sorted(orb))
        return out

    def __repr__(self) -> str:
        return f"GroupHandle(degree={self.degree}, order={self._order}, ngens={len(self.generators)})"


PermGroup = GroupHandle


def perm_key(g: Sequence[int]) -> bytes:
    """Compact hashable encoding of a permutation."""
    if len(g) <= 256:
        return bytes(g)
    return array("H", g).tobytes()


def group_from_generators(degree: int, gens: Iterable[Sequence[int]]) -> GroupHandle:
    gens = list(gens)
    for g in gens:
        if len(g) != degree:
            raise PermutationError(f"generator of degree {len(g)} in a group of degree {degree}")
    return GroupHandle(degree, gens)


def trivial_group(degree: int) -> GroupHandle:
    return GroupHandle(degree, ())


def group_with_order(
    degree: int, base: Iterable[Sequence[int]], candidates: Iterable[Sequence[int]], target: int
) -> GroupHandle:
    """Grow ``<base>`` by candidates until its order reaches ``target``.

    Used when the order of the wanted group is known in advance (stabilizers
    from orbit-stabilizer), so most candidates are never looked at.
    """
    chain = _Chain(degree)
    used = []
    for g in base:
        chain.add(g)
        used.append(g)
    order = chain.order()
    if order < target:
        for c in candidates:
            if chain.add(c):
                used.append(c)
                order = chain.order()
                if order >= target:
                    break
    if order != target:
        raise RuntimeError(f"generated order {order}, expected {target}")
    return GroupHandle(degree, used, _chain=chain)


# -- conjugation orbits ------------------------------------------------------


def _conj_bytes(n: int, ginv: bytes, g: bytes, pad: bytes):
    gt = g + pad

    def conj(h: bytes) -> bytes:
        return ginv.translate(h + pad).translate(gt)

    return conj


def element_orbit(G: GroupHandle, x: Sequence[int], caps: Caps = DEFAULT_CAPS):
    """Conjugation orbit of ``x`` under ``G``: (orbit keys, transversal, edges)."""
    gens = G.generators
    start = perm_key(x)
    pos = {start: 0}
    reps: list[Permutation] = [G.identity()]
    elems = [Permutation._trusted(x) if not isinstance(x, Permutation) else x]
    edges = []
    i = 0
    while i < len(elems):
        e = elems[i]
        u = reps[i]
        row = []
        for s in gens:
            c = e ** s
            k = perm_key(c)
            j = pos.get(k)
            if j is None:
                j = len(elems)
                if j >= caps.orbit:
                    raise CapExceeded("orbit", caps.orbit)
                pos[k] = j
                elems.append(c)
                reps.append(u * s)
            row.append(j)
        edges.append(row)
        i += 1
    return elems, reps, edges


class OrbitStabilizerError(RuntimeError):
    """|orbit| * |stabilizer| != |G|; signals a bug, never a user error."""


def _stabilizer(G: GroupHandle, reps, edges, base, orbit_size: int, seed: int = 0) -> GroupHandle:
    if G.order() % orbit_size:
        raise OrbitStabilizerError(f"orbit of size {orbit_size} in a group of order {G.order()}")
    target = G.order() // orbit_size
    gens = G.generators
    inv_reps = {}

    def schreier():
        pairs = [(i, b) for i in range(len(reps)) for b in range(len(gens))]
        Random(seed).shuffle(pairs)
        for i, b in pairs:
            j = edges[i][b]
            v = inv_reps.get(j)
            if v is None:
                v = inv_reps[j] = inverse(reps[j])
            yield reps[i] * gens[b] * v

    stab = group_with_order(G.degree, base, schreier(), target)
    if orbit_size * stab.order() != G.order():
        raise OrbitStabilizerError(f"{orbit_size} * {stab.order()} != {G.order()}")
    return stab


def centralizer_orbit(G: GroupHandle, x: Sequence[int], caps: Caps = DEFAULT_CAPS) -> tuple[int, GroupHandle]:
    """(size of the conjugacy class of x in G, C_G(x))."""
    elems, reps, edges = element_orbit(G, x, caps)
    base = [x] if G.contains(x) and not Permutation._trusted(x).is_identity() else []
    return len(elems), _stabilizer(G, reps, edges, base, len(elems))


def _subgroup_signature(H: GroupHandle):
    """Key function for conjugates ``H**u`` of ``H``; returns f(u) -> hashable."""
    n = H.degree
    if H.order() <= 512 and n <= 256:
        elems = [bytes(h) for h in H.elements()]
        pad = _IDENT256[n:]

        def key(u: Permutation):
            conj = _conj_bytes(n, bytes(inverse(u)), bytes(u), pad)
            return hash(frozenset(map(conj, elems)))

        return key
    if H.order() <= 512:
        elems = list(H.elements())

        def key(u: Permutation):
            return hash(frozenset(perm_key(h ** u) for h in elems))

        return key
    # larger subgroups: bucket by the image of the orbit partition of H
    label = [0] * n
    for k, orb in enumerate(H.orbits()):
        for pt in orb:
            label[pt] = k
    order = H.order()

    def key(u: Permutation):
        lab = [0] * n
        for pt in range(n):
            lab[u[pt]] = label[pt]
        # canonical relabelling by first occurrence
        seen = {}
        return (order, tuple(seen.setdefault(x, len(seen)) for x in lab))

    return key


def conjugation_orbit(
    G: GroupHandle, H: GroupHandle, caps: Caps = DEFAULT_CAPS, *, keep_reps: bool = False
):
    """Orbit of the subgroup ``H`` under conjugation by ``G``.

    Returns ``(orbit_size, N_G(H))``, or ``(orbit_size, N_G(H), reps)`` with
    ``keep_reps`` where ``H ** reps[i]`` runs over the orbit.  Keys are hashes
    or coarse invariants; every key collision is settled exactly by testing
    whether ``u * v^-1`` normalizes ``H``.
    """
    if H.degree != G.degree:
        raise PermutationError("degree mismatch")
    key = _subgroup_signature(H)
    hgens = H.generators

    n = H.degree
    if H.order() <= 512 and n <= 256:
        # exact membership by set lookup on byte-translated conjugates
        hset = frozenset(bytes(h) for h in H.elements())
        hbytes = [bytes(h) for h in hgens]
        pad = _IDENT256[n:]

        def same(u: Permutation, v: Permutation) -> bool:
            w = u * inverse(v)
            conj = _conj_bytes(n, bytes(v * inverse(u)), bytes(w), pad)
            return all(conj(h) in hset for h in hbytes)

    else:

        def same(u: Permutation, v: Permutation) -> bool:
            w = u * inverse(v)
            return all(H.contains(h**w) for h in hgens)

    ident = G.identity()
    reps = [ident]
    buckets: dict = {key(ident): [0]}
    edges = []
    gens = G.generators
    i = 0
    while i < len(reps):
        u = reps[i]
        row = []
        for s in gens:
            v = u * s
            k = key(v)
            bucket = buckets.get(k)
            j = None
            if bucket is not None:
                for c in bucket:
                    if same(v, reps[c]):
                        j = c
                        break
            if j is None:
                j = len(reps)
                if j >= caps.orbit:
                    raise CapExceeded("orbit", caps.orbit)
                reps.append(v)
                if bucket is None:
                    buckets[k] = [j]
                else:
                    bucket.append(j)
            row.append(j)
        edges.append(row)
        i += 1
    size = len(reps)
    stab = _stabilizer(G, reps, edges, list(hgens), size)
    if keep_reps:
        return size, stab, reps
    return size, stab
