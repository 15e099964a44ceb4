"""Weak homomorphisms at n = 1, Alperin decompositions and the weak extension.

Values live in Z/m: the p'-roots of unity of an algebraically closed field
of characteristic p form cyclic groups of order prime to p, so a residue
mod m stands for a root of unity and multiplication becomes addition.

Elements of G are interned by their stabilizer-chain rank.  Subgroups of S
are bitmasks over a fixed element list of S (see :class:`SylowLattice`).

A weak homomorphism rho : G -> Z/m satisfies

1. rho(x) = 0 when S meets S^x trivially,
2. rho(x) = 0 when x is a p-element normalizing some 1 < Q <= S,
3. rho(x) + rho(y) = rho(xy) whenever S, S^y and S^{xy} share a
   non-identity element.

An Alperin decomposition of g with respect to a seed A <= S meet S^{g^-1}
is g = x_1 ... x_r z with z in N_G(S), each x_i a p-element of N_G(Q_i)
for some 1 < Q_i <= S, and A^{x_1 ... x_{i-1}} <= Q_i at every step.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from . import kernels
from .caps import DEFAULT_CAPS, CapExceeded, Caps
from .fileio import parse_cycles, print_cycles
from .group import GroupHandle, perm_key
from .perm import Permutation, inverse, is_identity
from .structure import abelianization
from .subgroups import is_p_element, normalizer, sylow, sylow_lattice

# normalizers up to this order have their p-elements listed outright
ENUMERATE_P_ELEMENTS = 10**5


class DecompositionNotFound(RuntimeError):
    """No chain within the explored states; says the cap was too small, not that none exists."""


# -- shared per-(G, p) data ----------------------------------------------------


class WeakContext:
    """Sylow data, subgroup lattice and element tables for one (G, p)."""

    def __init__(
        self,
        G: GroupHandle,
        p: int,
        S: GroupHandle | None = None,
        N: GroupHandle | None = None,
        caps: Caps = DEFAULT_CAPS,
    ):
        self.G, self.p, self.caps = G, p, caps
        self.S = S if S is not None else sylow(G, p, caps=caps)
        self.N = N if N is not None else normalizer(G, self.S, caps)
        self.lattice = sylow_lattice(self.S, p, caps)
        self.s_elems = self.lattice.elements
        self.s_index = self.lattice.index
        self.ident_bit = self.s_index[perm_key(self.S.identity())]
        self.n_elems = self.N.element_list(caps.enum)
        self.n_ranks = [G.rank(z) for z in self.n_elems]
        self._elements: list[Permutation] | None = None
        self._masks: list[int] | None = None
        self._moves: dict[int, list[tuple[Permutation, int]]] = {}
        self._pel: dict[int, list[Permutation]] = {}
        self._reach: dict[int, dict] = {}
        self._tails: dict[int, tuple[int, Permutation] | None] | None = None
        self._q_handles: dict[int, GroupHandle] = {}

    # elements and intersection masks -------------------------------------
    @property
    def elements(self) -> list[Permutation]:
        """Elements of G indexed by rank."""
        if self._elements is None:
            order = self.G.order()
            if order > self.caps.enum:
                raise CapExceeded("enum", self.caps.enum, order)
            self._elements = [self.G.unrank(r) for r in range(order)]
        return self._elements

    def meet_mask(self, g: Sequence[int]) -> int:
        """S ∩ S^g as a bitmask over the elements of S."""
        ginv = inverse(g)
        mask = 0
        for i, s in enumerate(self.s_elems):
            if perm_key(s**ginv) in self.s_index:
                mask |= 1 << i
        return mask

    def seed_mask(self, g: Sequence[int]) -> int:
        """S ∩ S^{g^-1}, the default seed for decomposing g."""
        return self.meet_mask(inverse(g))

    @property
    def masks(self) -> list[int]:
        """S ∩ S^g for every g, by rank."""
        if self._masks is None:
            self._masks = [self.meet_mask(g) for g in self.elements]
        return self._masks

    def nontrivial(self, mask: int) -> bool:
        return bool(mask & ~(1 << self.ident_bit))

    def q_handle(self, q: int) -> GroupHandle:
        if q not in self._q_handles:
            self._q_handles[q] = self.lattice.handle(q)
        return self._q_handles[q]

    def mask_members(self, mask: int) -> list[Permutation]:
        return [self.s_elems[i] for i in self.lattice.members(mask)]

    def conj_mask(self, mask: int, x: Permutation) -> int | None:
        """mask^x, or None when it leaves S."""
        out = 0
        for i in self.lattice.members(mask):
            j = self.s_index.get(perm_key(self.s_elems[i] ** x))
            if j is None:
                return None
            out |= 1 << j
        return out

    def normalizes(self, x: Permutation, mask: int) -> bool:
        return self.conj_mask(mask, x) == mask

    # p-elements of N_G(Q) --------------------------------------------------
    def p_elements(self, q: int) -> list[Permutation]:
        """p-elements of N_G(Q) for the lattice subgroup Q, or a generating set of them."""
        got = self._pel.get(q)
        if got is None:
            Q = self.q_handle(q)
            NQ = self.N if Q.order() == self.S.order() else normalizer(self.G, Q, self.caps)
            if NQ.order() <= ENUMERATE_P_ELEMENTS:
                got = [x for x in NQ.elements() if is_p_element(x, self.p) and not is_identity(x)]
            else:
                got = _p_generators(NQ, self.p, self.caps)
            self._pel[q] = got
        return got

    def moves(self, B: int) -> list[tuple[Permutation, int]]:
        """(x, Q) with B <= Q <= S and x a p-element of N_G(Q), one entry per x."""
        got = self._moves.get(B)
        if got is None:
            seen = set()
            got = []
            for q, mask in enumerate(self.lattice.masks):
                if B & ~mask:
                    continue
                for x in self.p_elements(q):
                    k = perm_key(x)
                    if k not in seen:
                        seen.add(k)
                        got.append((x, q))
            self._moves[B] = got
        return got

    # reachable chain prefixes ------------------------------------------------
    def reach(self, seed: int) -> dict:
        """Breadth-first closure of chain prefixes w = x_1 ... x_i from a seed.

        Returns key(w) -> (w, parent key, x, Q index, depth).  The transported
        seed A^w is a function of w, so w alone is the state.
        """
        got = self._reach.get(seed)
        if got is not None:
            return got
        e = self.G.identity()
        start = perm_key(e)
        table = {start: (e, None, None, None, 0)}
        frontier = deque([(e, seed, 0)])
        cap = self.caps.bfs_states
        while frontier:
            w, B, d = frontier.popleft()
            kw = perm_key(w)
            for x, q in self.moves(B):
                w2 = w * x
                k2 = perm_key(w2)
                if k2 in table:
                    continue
                B2 = self.conj_mask(B, x)
                table[k2] = (w2, kw, x, q, d + 1)
                if len(table) > cap:
                    raise CapExceeded("bfs_states", cap, len(table))
                frontier.append((w2, B2, d + 1))
        self._reach[seed] = table
        return table

    def chain_from(self, seed: int, key: bytes, g: Permutation, z: Permutation) -> "AlperinChain":
        table = self._reach[seed]
        steps = []
        while True:
            w, parent, x, q, _ = table[key]
            if parent is None:
                break
            steps.append((x, self.q_handle(q)))
            key = parent
        steps.reverse()
        A = _mask_group(self, seed)
        return AlperinChain(steps, z, g, A)

    def tails(self) -> dict[int, tuple[int, Permutation] | None]:
        """For every g with S ∩ S^g nontrivial: (rank of g, tail z) of a shortest chain."""
        if self._tails is None:
            out: dict[int, tuple[int, Permutation] | None] = {}
            for r, g in enumerate(self.elements):
                if not self.nontrivial(self.masks[r]):
                    continue
                found = self._decompose(g, self.seed_mask(g))
                out[r] = None if found is None else (found[2], found[1])
            self._tails = out
        return self._tails

    def _decompose(self, g: Permutation, seed: int):
        """(key of w, z, depth) with g = w z, z in N and w a chain prefix, or None."""
        table = self.reach(seed)
        best = None
        for z in self.n_elems:
            w = g * ~z
            entry = table.get(perm_key(w))
            if entry is not None and (best is None or entry[4] < best[2]):
                best = (perm_key(w), z, entry[4])
                if best[2] == 0:
                    break
        return best


def _mask_group(ctx: WeakContext, mask: int) -> GroupHandle:
    from .group import group_from_generators

    return group_from_generators(ctx.G.degree, ctx.mask_members(mask))


def _p_generators(H: GroupHandle, p: int, caps: Caps) -> list[Permutation]:
    """Sylow generators of H plus H-conjugates until they generate O^{p'}(H)."""
    P = sylow(H, p, caps=caps)
    gens = [g for g in P.generators]
    closure = GroupHandle(H.degree, gens)
    changed = True
    while changed:
        changed = False
        for g in list(gens):
            for h in H.generators:
                c = g**h
                if not closure.contains(c):
                    gens.append(c)
                    closure = closure.closure([c])
                    changed = True
    return gens


# -- domain types --------------------------------------------------------------


@dataclass
class AlperinChain:
    """g = x_1 ... x_r z with x_i a p-element of N_G(Q_i) and z in N_G(S)."""

    steps: list[tuple[Permutation, GroupHandle]]
    tail: Permutation
    target: Permutation
    seed: GroupHandle

    def __len__(self) -> int:
        return len(self.steps)

    def product(self) -> Permutation:
        w = Permutation.identity(len(self.target))
        for x, _ in self.steps:
            w = w * x
        return w * self.tail

    def validate(self, S: GroupHandle, N: GroupHandle, p: int) -> list[str]:
        """Problems found by recomputing every invariant; empty when valid."""
        problems = []
        if self.seed.is_trivial():
            problems.append("trivial seed")
        if self.product() != tuple(self.target):
            problems.append("product differs from target")
        if not N.contains(self.tail):
            problems.append("tail outside N_G(S)")
        B = list(self.seed.generators)
        for i, (x, Q) in enumerate(self.steps):
            if Q.is_trivial() or not Q.is_subgroup_of(S):
                problems.append(f"step {i}: Q is not a nontrivial subgroup of S")
            if not is_p_element(x, p):
                problems.append(f"step {i}: x is not a p-element")
            if not all(Q.contains(q**x) for q in Q.generators):
                problems.append(f"step {i}: x does not normalize Q")
            if not all(Q.contains(b) for b in B):
                problems.append(f"step {i}: transported seed not inside Q")
            B = [b**x for b in B]
        return problems


@dataclass
class WeakCharacter:
    """A table G -> Z/m by element rank, with its source character on N_G(S)."""

    group: GroupHandle
    modulus: int
    values: np.ndarray
    source: dict[int, int] = field(default_factory=dict)  # rank in G -> residue, over N

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        self.values = np.asarray(self.values, dtype=np.int64) % self.modulus

    def value(self, g: Sequence[int]) -> int:
        return int(self.values[self.group.rank(g)])

    def restriction(self, ranks: Sequence[int]) -> dict[int, int]:
        return {r: int(self.values[r]) for r in ranks}

    def __mul__(self, other: "WeakCharacter") -> "WeakCharacter":
        """Pointwise product, i.e. sum of residues in the common modulus."""
        m = math.lcm(self.modulus, other.modulus)
        a, b = m // self.modulus, m // other.modulus
        vals = self.values * a + other.values * b
        src = {r: (v * a + other.source.get(r, 0) * b) % m for r, v in self.source.items()}
        return WeakCharacter(self.group, m, vals, src)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeakCharacter):
            return NotImplemented
        return self.modulus == other.modulus and np.array_equal(self.values, other.values)

    def is_trivial(self) -> bool:
        return not self.values.any()

    def to_dict(self) -> dict:
        G = self.group
        return {
            "modulus": self.modulus,
            "values": [[print_cycles(G.unrank(r)), int(v)] for r, v in enumerate(self.values)],
        }

    @classmethod
    def from_dict(cls, d: Mapping, G: GroupHandle) -> "WeakCharacter":
        m = int(d["modulus"])
        vals = np.zeros(G.order(), dtype=np.int64)
        for word, v in d["values"]:
            vals[G.rank(parse_cycles(word, G.degree))] = int(v) % m
        return cls(G, m, vals)


# -- operations ------------------------------------------------------------------


@dataclass
class WeakCheck:
    ok: bool
    axiom: int | None = None  # first failing axiom
    witness: tuple = ()
    constrained_pairs: int = 0


def check_weak_homomorphism(
    G: GroupHandle,
    S: GroupHandle,
    p: int,
    rho: WeakCharacter,
    ctx: WeakContext | None = None,
    caps: Caps = DEFAULT_CAPS,
    backend: str | None = None,
) -> WeakCheck:
    """All three axioms, exhaustively; the pair axiom runs in the kernel."""
    if G.order() > caps.pairs:
        raise CapExceeded("pairs", caps.pairs, G.order())
    if ctx is None:
        ctx = WeakContext(G, p, S=S, caps=caps)
    vals = rho.values
    masks = ctx.masks
    for r, mask in enumerate(masks):
        if not ctx.nontrivial(mask) and vals[r]:
            return WeakCheck(False, 1, (r,))
    qmasks = ctx.lattice.masks
    for r, x in enumerate(ctx.elements):
        if vals[r] and is_p_element(x, p):
            if any(ctx.normalizes(x, qm) for qm in qmasks if qm & masks[r] == qm):
                return WeakCheck(False, 2, (r,))
    n_s = len(ctx.s_elems)
    words = (n_s + 63) // 64
    arr = np.zeros((len(masks), words), dtype=np.uint64)
    for r, mask in enumerate(masks):
        for w in range(words):
            arr[r, w] = (mask >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    elems = np.array(ctx.elements, dtype=np.int32)
    tables = kernels.RankTables.from_group(G)
    x, y, count = kernels.pair_check(
        tables, elems, arr, ctx.ident_bit // 64, ctx.ident_bit % 64, vals, rho.modulus, backend=backend
    )
    if x >= 0:
        return WeakCheck(False, 3, (x, y), count)
    return WeakCheck(True, None, (), count)


def is_weak_homomorphism(
    G: GroupHandle,
    S: GroupHandle,
    p: int,
    rho: WeakCharacter,
    ctx: WeakContext | None = None,
    caps: Caps = DEFAULT_CAPS,
    backend: str | None = None,
) -> bool:
    return check_weak_homomorphism(G, S, p, rho, ctx, caps, backend).ok


def alperin_decompose(
    G: GroupHandle,
    S: GroupHandle,
    p: int,
    g: Sequence[int],
    A: GroupHandle,
    ctx: WeakContext | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> AlperinChain:
    """A shortest Alperin decomposition of g with respect to the seed A."""
    if ctx is None:
        ctx = WeakContext(G, p, S=S, caps=caps)
    g = Permutation(g)
    if A.is_trivial():
        raise ValueError("seed must be nontrivial")
    seed = 0
    for a in A.elements():
        i = ctx.s_index.get(perm_key(a))
        if i is None:
            raise ValueError("seed is not inside S")
        seed |= 1 << i
    if seed & ~ctx.seed_mask(g):
        raise ValueError("seed is not inside S ∩ S^{g^-1}")
    found = ctx._decompose(g, seed)
    if found is None:
        raise DecompositionNotFound(f"no chain for {print_cycles(g)} within {len(ctx.reach(seed))} states")
    return ctx.chain_from(seed, found[0], g, found[1])


CharacterTable = Mapping[bytes, int] | Callable[[Permutation], int]


def _source_table(ctx: WeakContext, chi: CharacterTable, m: int) -> dict[int, int]:
    get = chi if callable(chi) else (lambda z: chi[perm_key(z)])
    return {r: int(get(z)) % m for r, z in zip(ctx.n_ranks, ctx.n_elems)}


def _check_character(ctx: WeakContext, src: dict[int, int], m: int, K: GroupHandle | None) -> None:
    G = ctx.G
    for z, r in zip(ctx.n_elems, ctx.n_ranks):
        for s in ctx.N.generators:
            if (src[r] + src[G.rank(s)]) % m != src[G.rank(z * s)]:
                raise ValueError("character table is not a homomorphism on N_G(S)")
    if K is not None and any(src[G.rank(k)] for k in K.generators):
        raise ValueError("K is not in the kernel of the character")


def weak_extension(
    G: GroupHandle,
    S: GroupHandle,
    p: int,
    chi: CharacterTable,
    m: int,
    ctx: WeakContext | None = None,
    K: GroupHandle | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> WeakCharacter:
    """Extend a character of N_G(S) killing K: 0 off the Sylow-meeting locus, chi(z) elsewhere."""
    if math.gcd(m, p) != 1:
        raise ValueError(f"modulus {m} is not prime to {p}")
    if ctx is None:
        ctx = WeakContext(G, p, S=S, caps=caps)
    src = _source_table(ctx, chi, m)
    _check_character(ctx, src, m, K)
    vals = np.zeros(G.order(), dtype=np.int64)
    for r, tail in ctx.tails().items():
        if tail is None:
            raise DecompositionNotFound(f"no Alperin decomposition for element of rank {r}")
        _, z = tail
        vals[r] = src[G.rank(z)]
    return WeakCharacter(G, m, vals, src)


@dataclass
class Characters:
    """Hom((N/K)^ab, Z/m) with m the exponent, as tables over the ranks of N's elements."""

    modulus: int
    orders: list[int]
    tables: list[dict[int, int]]  # rank in G -> residue


def quotient_characters(ctx: WeakContext, K: GroupHandle) -> Characters:
    dec = abelianization(ctx.N, K, ctx.caps)
    orders = dec.invariant_factors
    m = dec.exponent
    coords = [dec.coordinates(z) for z in ctx.n_elems]
    tables = []
    for choice in itertools.product(*[range(d) for d in orders]):
        weights = [j * (m // d) for j, d in zip(choice, orders)]
        tables.append({r: sum(c * w for c, w in zip(cz, weights)) % m for r, cz in zip(ctx.n_ranks, coords)})
    return Characters(m, orders, tables)


@dataclass
class RoundTrip:
    ok: bool
    modulus: int
    characters: int
    extensions: list[WeakCharacter]
    failures: list[str]


def restriction_roundtrip(
    G: GroupHandle,
    p: int,
    K: GroupHandle | None = None,
    caps: Caps = DEFAULT_CAPS,
    backend: str | None = None,
    ctx: WeakContext | None = None,
) -> RoundTrip:
    """Extend every character of (N/K)^ab and check the extensions."""
    if K is None:
        from .kgroup import resolve_k

        res = resolve_k(G, p, mode="bfs", caps=caps)
        if res.K is None:
            raise RuntimeError("K could not be determined exactly")
        K = res.K
    if ctx is None:
        ctx = WeakContext(G, p, caps=caps)
    chars = quotient_characters(ctx, K)
    m = chars.modulus
    failures: list[str] = []
    exts: list[WeakCharacter] = []
    for i, table in enumerate(chars.tables):
        rho = weak_extension(G, ctx.S, p, lambda z, t=table: t[G.rank(z)], m, ctx=ctx, K=K, caps=caps)
        check = check_weak_homomorphism(G, ctx.S, p, rho, ctx, caps, backend)
        if not check.ok:
            failures.append(f"character {i}: axiom {check.axiom} fails at {check.witness}")
        if rho.restriction(ctx.n_ranks) != table:
            failures.append(f"character {i}: restriction differs")
        exts.append(rho)
    distinct = {rho.values.tobytes() for rho in exts}
    if len(distinct) != len(exts):
        failures.append("two characters share an extension")
    return RoundTrip(not failures, m, len(chars.tables), exts, failures)


def restriction_roundtrip_check(G: GroupHandle, p: int, caps: Caps = DEFAULT_CAPS, backend: str | None = None) -> bool:
    return restriction_roundtrip(G, p, caps=caps, backend=backend).ok


def iter_seeds(ctx: WeakContext, g: Sequence[int]) -> Iterator[int]:
    """Nontrivial subgroups of S ∩ S^{g^-1}, as lattice masks."""
    bound = ctx.seed_mask(g)
    for mask in ctx.lattice.masks:
        if mask & ~bound == 0:
            yield mask
