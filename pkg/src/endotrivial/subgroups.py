"""Subgroup-level algorithms: Sylow, normalizers, closures, O^{p'} and the
subgroup lattice of a Sylow subgroup."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from random import Random
from typing import Sequence

from .caps import DEFAULT_CAPS, CapExceeded, Caps
from .group import (
    GroupHandle,
    _Chain,
    centralizer_orbit,
    conjugation_orbit,
    group_from_generators,
    perm_key,
    trivial_group,
)
from .perm import Permutation, inverse, perm_order

log = logging.getLogger(__name__)


def p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def prime_divisors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_p_element(g: Sequence[int], p: int) -> bool:
    o = perm_order(g)
    return p_part(o, p) == o


def _closure_under(G_gens, start_gens, degree: int, limit: int | None = None) -> GroupHandle:
    chain = _Chain(degree)
    gens = []
    queue = list(start_gens)
    while queue:
        x = queue.pop()
        if chain.add(x):
            gens.append(x)
            if limit is not None and chain.order() >= limit:
                break
            queue.extend(x ** g for g in G_gens)
    return GroupHandle(degree, gens, _chain=chain)


def normal_closure(G: GroupHandle, H: GroupHandle | Sequence[Sequence[int]]) -> GroupHandle:
    """Smallest normal subgroup of G containing H (or the given elements)."""
    gens = H.generators if isinstance(H, GroupHandle) else [Permutation._trusted(h) for h in H]
    return _closure_under(G.generators, gens, G.degree, G.order())


def derived_subgroup(G: GroupHandle) -> GroupHandle:
    gens = G.generators
    comms = []
    for i, a in enumerate(gens):
        ai = inverse(a)
        for b in gens[i + 1 :]:
            c = ai * inverse(b) * a * b
            if not c.is_identity():
                comms.append(c)
    return normal_closure(G, comms)


def normalizer(G: GroupHandle, H: GroupHandle, caps: Caps = DEFAULT_CAPS) -> GroupHandle:
    if H.order() == 1 or H.order() == G.order():
        return G
    return conjugation_orbit(G, H, caps)[1]


def centralizer(G: GroupHandle, x: Sequence[int], caps: Caps = DEFAULT_CAPS) -> GroupHandle:
    if all(i == v for i, v in enumerate(x)):
        return G
    return centralizer_orbit(G, x, caps)[1]


def sylow(G: GroupHandle, p: int, seed: int = 0, caps: Caps = DEFAULT_CAPS) -> GroupHandle:
    """A Sylow p-subgroup of G.

    Keeps a p-subgroup P normal in a subgroup H that contains a full Sylow
    p-subgroup of G, and extends P by one p-element of H at a time.
    """
    target = p_part(G.order(), p)
    if target == 1:
        return trivial_group(G.degree)
    if target == G.order():
        return G
    rng = Random(seed)
    H, P = G, trivial_group(G.degree)
    while P.order() < target:
        if H.order() == target:
            return H
        y = _p_step(H, P, p, rng)
        Q = P.closure([y])
        NQ = normalizer(H, Q, caps)
        if p_part(NQ.order(), p) == target:
            H, P = NQ, Q
    return P


def _p_step(H: GroupHandle, P: GroupHandle, p: int, rng: Random) -> Permutation:
    # a p-element outside P whose p-th power lies in P
    while True:
        h = H.random_element(rng)
        o = perm_order(h)
        q = p_part(o, p)
        if q == 1:
            continue
        y = h ** (o // q)
        if P.contains(y):
            continue
        while True:
            z = y**p
            if P.contains(z):
                return y
            y = z


def o_p_prime_residual(H: GroupHandle, p: int, caps: Caps = DEFAULT_CAPS) -> GroupHandle:
    """O^{p'}(H): the normal closure of a Sylow p-subgroup."""
    if p_part(H.order(), p) == H.order():
        return H
    return normal_closure(H, sylow(H, p, caps=caps))


def intersection(A: GroupHandle, B: GroupHandle, caps: Caps = DEFAULT_CAPS) -> GroupHandle:
    if A.degree != B.degree:
        raise ValueError("degree mismatch")
    small, big = (A, B) if A.order() <= B.order() else (B, A)
    if small.is_subgroup_of(big):
        return small
    if small.order() > caps.scan:
        raise CapExceeded("scan", caps.scan, small.order())
    chain = _Chain(A.degree)
    gens = []
    for g in small.elements(caps.scan):
        if big.contains(g) and chain.add(g):
            gens.append(g)
    return GroupHandle(A.degree, gens, _chain=chain)


def is_ti_sylow(G: GroupHandle, S: GroupHandle, caps: Caps = DEFAULT_CAPS) -> bool:
    """True iff distinct conjugates of S meet trivially."""
    if S.order() in (1, G.order()):
        return True
    p = _prime_of(S.order())
    size, _, reps = conjugation_orbit(G, S, caps, keep_reps=True)
    # an intersection is nontrivial iff it holds an element of order p
    order_p = [x for x in S.elements(caps.enum) if perm_order(x) == p]
    for u in reps[1:]:
        for x in order_p:
            if S.contains(x**u):
                return False
    return True


def _prime_of(q: int) -> int:
    ps = prime_divisors(q)
    if len(ps) != 1:
        raise ValueError(f"{q} is not a prime power")
    return ps[0]


# -- the subgroup lattice of a p-group --------------------------------------


@dataclass
class SylowLattice:
    """All nontrivial subgroups of S as bitmasks over an element list of S."""

    S: GroupHandle
    p: int
    elements: list[Permutation]
    index: dict
    masks: list[int] = field(default_factory=list)
    gens: list[tuple[int, ...]] = field(default_factory=list)

    def members(self, mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    def order_of(self, k: int) -> int:
        return bin(self.masks[k]).count("1")

    def handle(self, k: int) -> GroupHandle:
        return group_from_generators(self.S.degree, [self.elements[i] for i in self.gens[k]])


def _mul_index(elements, index):
    def mul(i: int, j: int) -> int:
        return index[perm_key(elements[i] * elements[j])]

    return mul


def sylow_lattice(S: GroupHandle, p: int, caps: Caps = DEFAULT_CAPS) -> SylowLattice:
    """Every nontrivial subgroup of the p-group S, built layer by layer.

    A subgroup J of order p^(k+1) has a normal subgroup H of index p, and
    J = H<c> for any c in J outside H.  So layer k+1 is the set of H<c> with
    H in layer k, c normalizing H and c^p in H.
    """
    if S.order() > caps.sylow_order:
        raise CapExceeded("sylow_order", caps.sylow_order, S.order())
    elements = list(S.elements())
    index = {perm_key(g): i for i, g in enumerate(elements)}
    mul = _mul_index(elements, index)
    ident = index[perm_key(S.identity())]
    n = len(elements)
    powp = [index[perm_key(g**p)] for g in elements]
    conj_cache: dict = {}

    def conj(i: int, c: int) -> int:
        key = (i, c)
        r = conj_cache.get(key)
        if r is None:
            r = conj_cache[key] = index[perm_key(elements[i] ** elements[c])]
        return r

    lat = SylowLattice(S, p, elements, index)
    seen = set()

    def cyclic_mask(c: int, base_mask: int, base_elems: list[int]) -> tuple[int, list[int]]:
        # H<c> = union of the cosets H c^k
        mask, elems = base_mask, list(base_elems)
        ck = c
        while not (base_mask >> ck) & 1:
            for h in base_elems:
                x = mul(h, ck)
                mask |= 1 << x
                elems.append(x)
            ck = mul(ck, c)
        return mask, elems

    layer = []
    for c in range(n):
        if c != ident and powp[c] == ident:
            mask, elems = cyclic_mask(c, 1 << ident, [ident])
            if mask not in seen:
                seen.add(mask)
                layer.append((mask, elems, (c,)))
    while layer:
        for mask, _, gens in layer:
            lat.masks.append(mask)
            lat.gens.append(gens)
            if len(lat.masks) > caps.lattice:
                raise CapExceeded("lattice", caps.lattice, len(lat.masks))
        nxt = []
        for mask, elems, gens in layer:
            covered = mask
            for c in range(n):
                if (covered >> c) & 1 or not (mask >> powp[c]) & 1:
                    continue
                if not all((mask >> conj(g, c)) & 1 for g in gens):
                    continue
                jmask, jelems = cyclic_mask(c, mask, elems)
                covered |= jmask
                if jmask not in seen:
                    seen.add(jmask)
                    nxt.append((jmask, jelems, gens + (c,)))
        layer = nxt
    return lat


@dataclass
class SubgroupClassList:
    ambient: GroupHandle
    normalizer: GroupHandle
    reps: list[GroupHandle]
    class_sizes: list[int]
    lattice: SylowLattice
    # lattice position of each class representative, then of every member
    rep_index: list[int]
    class_of: list[int]
    # conj[k] in N with lattice[k] == reps[class_of[k]] ** conj[k]
    conj: list[Permutation]

    def __len__(self) -> int:
        return len(self.reps)


def subgroup_classes_in_sylow(
    G: GroupHandle, S: GroupHandle, N: GroupHandle | None = None, p: int | None = None, caps: Caps = DEFAULT_CAPS
) -> SubgroupClassList:
    """Nontrivial subgroups of S grouped into N_G(S)-conjugacy classes."""
    if N is None:
        N = normalizer(G, S, caps)
    if p is None:
        p = _prime_of(S.order()) if S.order() > 1 else 2
    if S.order() == 1:
        lat = SylowLattice(S, p, [S.identity()], {perm_key(S.identity()): 0})
        return SubgroupClassList(S, N, [], [], lat, [], [], [])
    lat = sylow_lattice(S, p, caps)
    elements, index = lat.elements, lat.index
    acts = [[index[perm_key(x**g)] for x in elements] for g in N.generators]
    pos = {m: k for k, m in enumerate(lat.masks)}
    m = len(lat.masks)
    class_of = [-1] * m
    conj: list = [None] * m
    reps, sizes, rep_index = [], [], []
    for k in range(m):
        if class_of[k] >= 0:
            continue
        cls = len(reps)
        class_of[k] = cls
        conj[k] = N.identity()
        orbit = [k]
        for j in orbit:
            members = lat.members(lat.masks[j])
            for a, g in zip(acts, N.generators):
                img = 0
                for x in members:
                    img |= 1 << a[x]
                t = pos[img]
                if class_of[t] < 0:
                    class_of[t] = cls
                    conj[t] = conj[j] * g
                    orbit.append(t)
        reps.append(lat.handle(k))
        sizes.append(len(orbit))
        rep_index.append(k)
    return SubgroupClassList(S, N, reps, sizes, lat, rep_index, class_of, conj)
