"""Quotients by coset action and abelian invariants by maximal-order peeling."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .caps import DEFAULT_CAPS, CapExceeded, Caps
from .group import GroupHandle, group_from_generators, perm_key
from .perm import Permutation, inverse
from .subgroups import derived_subgroup, normal_closure, p_part, prime_divisors


class NotNormal(ValueError):
    pass


class CosetSpace:
    """Right cosets N g of a normal subgroup N in G, with canonical representatives.

    The canonical representative of N g is the element of the coset whose
    images of the base points of N are lexicographically smallest; the
    stabilizer chain's ordered base makes that element unique.
    """

    def __init__(self, G: GroupHandle, N: GroupHandle, caps: Caps = DEFAULT_CAPS, check_normal: bool = True):
        if check_normal and not N.is_normal_in(G):
            raise NotNormal("subgroup is not normal")
        index = G.order() // N.order()
        if index > caps.quotient:
            raise CapExceeded("quotient", caps.quotient, index)
        self.G, self.N = G, N
        self._levels = [(b, list(orbit), [trans[q] for q in orbit]) for b, orbit, trans in
                        ((lv[0], lv[1], lv[3]) for lv in N._levels)]
        ident = G.identity()
        self.reps: list[Permutation] = [self.canonical(ident)]
        self.pos = {perm_key(self.reps[0]): 0}
        self.action: list[list[int]] = []
        i = 0
        while i < len(self.reps):
            r = self.reps[i]
            row = []
            for s in G.generators:
                row.append(self._locate(r * s))
            self.action.append(row)
            i += 1
        assert len(self.reps) == index
        self._mul: dict = {}

    def canonical(self, g: Sequence[int]) -> Permutation:
        # elements of N g are n*g; (n*g)[b] = g[n[b]]
        for b, orbit, trans in self._levels:
            best = min(range(len(orbit)), key=lambda k: g[orbit[k]])
            u = trans[best]
            g = tuple(g[x] for x in u)
        return Permutation._trusted(g)

    def _locate(self, g: Sequence[int]) -> int:
        c = self.canonical(g)
        k = perm_key(c)
        j = self.pos.get(k)
        if j is None:
            j = self.pos[k] = len(self.reps)
            self.reps.append(c)
        return j

    def index_of(self, g: Sequence[int]) -> int:
        return self.pos[perm_key(self.canonical(g))]

    def __len__(self) -> int:
        return len(self.reps)

    def mul(self, i: int, j: int) -> int:
        key = (i, j)
        r = self._mul.get(key)
        if r is None:
            r = self._mul[key] = self.index_of(self.reps[i] * self.reps[j])
        return r

    def power(self, i: int, k: int) -> int:
        result, base = 0, i
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def inv(self, i: int) -> int:
        return self.index_of(inverse(self.reps[i]))

    def quotient_handle(self) -> GroupHandle:
        n = len(self.reps)
        gens = [Permutation._trusted([self.action[i][s] for i in range(n)]) for s in range(len(self.G.generators))]
        return group_from_generators(n, gens)

    def image(self, g: Sequence[int]) -> Permutation:
        """The permutation of the cosets induced by right multiplication with g."""
        return Permutation._trusted([self.index_of(r * g) for r in self.reps])


def quotient_group(G: GroupHandle, N: GroupHandle, caps: Caps = DEFAULT_CAPS) -> GroupHandle:
    """G/N as the permutation group of G acting on the right cosets of N."""
    return CosetSpace(G, N, caps).quotient_handle()


@dataclass(frozen=True)
class AbelianInvariants:
    factors: tuple[int, ...]

    def __post_init__(self):
        for f in self.factors:
            if f < 2 or len(prime_divisors(f)) != 1:
                raise ValueError(f"{f} is not a prime power > 1")
        object.__setattr__(self, "factors", tuple(sorted(self.factors)))

    @property
    def order(self) -> int:
        o = 1
        for f in self.factors:
            o *= f
        return o

    def as_list(self) -> list[int]:
        return list(self.factors)

    def __str__(self) -> str:
        return "1" if not self.factors else " x ".join(f"C{f}" for f in self.factors)


def elementary_divisors(invariant_factors: Sequence[int]) -> list[int]:
    out = []
    for e in invariant_factors:
        for q in prime_divisors(e):
            out.append(p_part(e, q))
    return sorted(out)


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


@dataclass
class AbelianDecomposition:
    """An abelian group given as a coset space, split into cyclic factors.

    ``basis[i]`` is a coset index of order ``orders[i]`` and
    ``coords[j]`` gives the exponents of coset ``j`` in that basis.
    """

    space: CosetSpace
    basis: list[int]
    orders: list[int]
    coords: list[tuple[int, ...]]

    @property
    def invariant_factors(self) -> list[int]:
        return list(self.orders)

    @property
    def invariants(self) -> AbelianInvariants:
        return AbelianInvariants(tuple(elementary_divisors(self.orders)))

    @property
    def exponent(self) -> int:
        return self.orders[0] if self.orders else 1

    def coordinates(self, g: Sequence[int]) -> tuple[int, ...]:
        return self.coords[self.space.index_of(g)]


def decompose_abelian(space: CosetSpace) -> AbelianDecomposition:
    """Peel off cyclic direct factors of maximal order.

    An element of maximal order generates a direct factor, so the invariant
    factors of A are the maximal orders in A, A/<x1>, A/<x1,x2>, ...  Each
    new generator is corrected by earlier ones so that its true order equals
    its order modulo them.
    """
    a = len(space)
    coord = {0: ()}
    basis: list[int] = []
    orders: list[int] = []
    while len(coord) < a:
        rest = a // len(coord)
        divs = _divisors(rest)
        best, best_e = None, 1
        for x in range(a):
            if x in coord:
                continue
            for d in divs[1:]:
                if space.power(x, d) in coord:
                    if d > best_e:
                        best, best_e = x, d
                    break
            if best_e == rest:
                break
        x, e = best, best_e
        c = coord[space.power(x, e)]
        fix = 0
        for bj, cj in zip(basis, c):
            if cj % e:
                raise AssertionError("peeling invariant violated")
            fix = space.mul(fix, space.power(space.inv(bj), cj // e))
        x = space.mul(x, fix)
        new = {}
        for h, ch in coord.items():
            y = h
            for k in range(e):
                new[y] = ch + (k,)
                y = space.mul(y, x)
        # earlier coordinates gain a trailing zero
        coord = new
        basis.append(x)
        orders.append(e)
    coords = [coord[i] for i in range(a)]
    return AbelianDecomposition(space, basis, orders, coords)


def abelianization(G: GroupHandle, K: GroupHandle | None = None, caps: Caps = DEFAULT_CAPS) -> AbelianDecomposition:
    """(G/K)^ab = G/(G'K), decomposed."""
    D = derived_subgroup(G)
    if K is not None and not K.is_subgroup_of(D):
        D = normal_closure(G, list(D.generators) + list(K.generators))
    return decompose_abelian(CosetSpace(G, D, caps, check_normal=False))


def abelian_invariants(G: GroupHandle, caps: Caps = DEFAULT_CAPS) -> AbelianInvariants:
    return abelianization(G, None, caps).invariants


# -- isomorphism of small groups --------------------------------------------


def direct_product_element(a: Sequence[int], b: Sequence[int]) -> Permutation:
    n = len(a)
    return Permutation._trusted(list(a) + [n + x for x in b])


def find_isomorphism(A: GroupHandle, B: GroupHandle, cap: int = 10**6) -> dict | None:
    """Images in B of the generators of A defining an isomorphism, or None.

    Brute force over generator images with matching element orders; a
    candidate defines a homomorphism iff the diagonal subgroup it generates in
    A x B has order |A|, and an isomorphism iff the images also generate B.
    """
    if A.order() != B.order():
        return None
    gens = A.generators
    if not gens:
        return {}
    belems = list(B.elements())
    by_order: dict = {}
    for b in belems:
        by_order.setdefault(b.order(), []).append(b)
    pools = [by_order.get(g.order(), []) for g in gens]
    tried = 0
    for imgs in product(*pools):
        tried += 1
        if tried > cap:
            raise CapExceeded("isomorphism", cap)
        if group_from_generators(B.degree, imgs).order() != B.order():
            continue
        diag = group_from_generators(A.degree + B.degree, [direct_product_element(g, h) for g, h in zip(gens, imgs)])
        if diag.order() == A.order():
            return dict(zip(gens, imgs))
    return None


def are_isomorphic(A: GroupHandle, B: GroupHandle) -> bool:
    return find_isomorphism(A, B) is not None
