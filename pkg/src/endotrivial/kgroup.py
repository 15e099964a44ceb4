"""The subgroups K° ≤ K of the Sylow normalizer and the group T(G,S).

``K°`` is the normal closure in N = N_G(S) of the groups N ∩ O^{p'}(N_G(Q)),
one Q per N-class of nontrivial subgroups of S.  ``K`` is the set of
elements of N reachable by chains x_1 ... x_n with x_i ∈ O^{p'}(N_G(Q_i))
and a witness y whose successive conjugates y^{x_1...x_i} lie in both Q_i
and Q_{i+1}.  T(G,S) ≅ (N/K)^ab.

The proof ladder tries cheap criteria before the exact chain closure:
SN, KCIRC, TI, R2, NNC (and AUTOCENT when the subgroup lattice of S is
too large), then the exact closure, else UNDETERMINED with the bracket
[K°, N].
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .caps import DEFAULT_CAPS, CapExceeded, Caps
from .group import GroupHandle, _Chain, centralizer_orbit, element_orbit, perm_key
from .perm import Permutation, inverse, perm_order
from .structure import AbelianInvariants, abelianization
from .subgroups import (
    SubgroupClassList,
    intersection,
    is_prime,
    is_ti_sylow,
    normal_closure,
    normalizer,
    o_p_prime_residual,
    p_part,
    prime_divisors,
    subgroup_classes_in_sylow,
    sylow,
)

log = logging.getLogger(__name__)

TAGS = ("SN", "KCIRC", "CYCLIC", "TI", "R2", "NNC", "AUTOCENT", "BFS_EXACT", "UNDETERMINED")
MODES = ("auto", "criteria_only", "bfs")


class SubgroupCheckFailed(RuntimeError):
    """The chain closure produced a set that is not a subgroup."""


def _is_cyclic_p_group(S: GroupHandle) -> bool:
    return any(perm_order(g) == S.order() for g in S.generators) or S.order() == 1


class KComputation:
    """Shared state for one (G, p): Sylow data, subgroup classes and O^{p'} groups."""

    def __init__(self, G: GroupHandle, p: int, caps: Caps = DEFAULT_CAPS):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.G, self.p, self.caps = G, p, caps
        self.S = sylow(G, p, caps=caps)
        self.N = normalizer(G, self.S, caps)
        self._classes: SubgroupClassList | None = None
        self._classes_error: CapExceeded | None = None
        self._o_groups: list[GroupHandle] | None = None
        self._kcirc: GroupHandle | None = None
        self.notes: list[str] = []

    # -- lazily computed pieces ---------------------------------------------
    @property
    def classes(self) -> SubgroupClassList:
        if self._classes is None:
            if self._classes_error is not None:
                raise self._classes_error
            try:
                self._classes = subgroup_classes_in_sylow(self.G, self.S, self.N, self.p, self.caps)
            except CapExceeded as exc:
                self._classes_error = exc
                raise
        return self._classes

    def lattice_available(self) -> bool:
        try:
            self.classes
        except CapExceeded:
            return False
        return True

    @property
    def o_groups(self) -> list[GroupHandle]:
        """O^{p'}(N_G(Q)) for each class representative Q."""
        if self._o_groups is None:
            out = []
            for Q in self.classes.reps:
                NQ = self.N if Q.order() == self.S.order() else normalizer(self.G, Q, self.caps)
                out.append(o_p_prime_residual(NQ, self.p, self.caps))
            self._o_groups = out
        return self._o_groups

    def k_circle(self) -> GroupHandle:
        if self._kcirc is None:
            gens = list(self.S.generators)
            for O in self.o_groups:
                gens.extend(intersection(self.N, O, self.caps).generators)
            self._kcirc = normal_closure(self.N, gens)
        return self._kcirc

    # -- criteria -------------------------------------------------------------
    def nnc_holds(self) -> bool:
        """O^{p'}(N_G(Q)) ≤ S for every class rep Q with p < |Q| < |S|."""
        s = self.S.order()
        for Q, O in zip(self.classes.reps, self.o_groups):
            if self.p < Q.order() < s and not O.is_subgroup_of(self.S):
                return False
        return True

    def autocent_lower_bound(self) -> GroupHandle:
        """Normal closure in N of S and all elements certified by the centralizer lemma."""
        witnesses = autocent_witnesses(self.G, self.S, self.N, self.p, self.caps)
        if not witnesses:
            return normal_closure(self.N, self.S.generators)
        cache: dict = {}
        certified = []
        chain = _Chain(self.N.degree)
        for g in self.S.generators:
            chain.add(g)
        for g in self.N.elements(self.caps.enum):
            if chain.strip(g)[1] == self.N.degree:
                continue
            if autocent_filter(self.G, self.S, g, witnesses, self.caps, _cache=cache, _verified=True):
                certified.append(g)
                chain.add(g)
        return normal_closure(self.N, list(self.S.generators) + certified)

    # -- exact chain closure --------------------------------------------------
    def chain_elements(self, backend: str | None = None, restart: bool = True) -> tuple[list[Permutation], int]:
        """Elements of N reached by chains, and the number of states visited.

        With ``restart`` chains may be concatenated, which yields the group
        they generate.  Without it the result is the bare set of chain
        products; that set is closed under inverses and N-conjugation but
        need not be closed under products.
        """
        G, S = self.G, self.S
        if S.order() == 1:
            return [G.identity()], 0
        if G.order() * S.order() > self.caps.bfs_states:
            raise CapExceeded("bfs_states", self.caps.bfs_states, G.order() * S.order())
        inputs = bfs_inputs(self)
        tables = kernels.RankTables.from_group(G)
        in_n = np.zeros(G.order(), dtype=np.uint8)
        for g in self.N.elements(self.caps.enum):
            in_n[G.rank(g)] = 1
        accepted, states = kernels.chain_bfs(
            tables,
            inputs.offsets,
            inputs.moves,
            inputs.xperm,
            inputs.xconj,
            in_n,
            inputs.starts,
            self.caps.bfs_states,
            backend=backend,
            restart=restart,
        )
        return [G.unrank(int(r)) for r in np.flatnonzero(accepted)], states

    def chain_closure(self, backend: str | None = None) -> tuple[GroupHandle, int]:
        """K by closure over chain states; returns (K, states visited)."""
        if self.S.order() == 1:
            return self.S, 0
        elems, states = self.chain_elements(backend, restart=True)
        K = verified_subgroup(self.G, elems)
        if not K.is_subgroup_of(self.N):
            raise SubgroupCheckFailed("accepted set leaves N_G(S)")
        return K, states


@dataclass
class BFSInputs:
    offsets: np.ndarray
    moves: np.ndarray
    xperm: np.ndarray
    xconj: np.ndarray
    starts: np.ndarray
    move_elements: list[Permutation] = field(default_factory=list)
    groups_per_point: list[int] = field(default_factory=list)


def bfs_inputs(comp: KComputation) -> BFSInputs:
    """Transition data: for each t in S, generators of the maximal groups
    O^{p'}(N_G(Q)) over all Q ≤ S containing t.

    Products of generators of one such group are themselves chains with a
    repeated Q, and a group contained in another one that is also available
    at t adds nothing, so only maximal groups are kept.
    """
    classes = comp.classes
    lat = classes.lattice
    elements, index = lat.elements, lat.index
    n_s = len(elements)
    o_reps = comp.o_groups
    L = len(lat.masks)
    # O_k = O_rep ** conj[k]
    conj = classes.conj
    conj_inv = [inverse(c) for c in conj]
    o_order = [o_reps[classes.class_of[k]].order() for k in range(L)]
    gens_cache: dict = {}

    def o_gens(k: int) -> list[Permutation]:
        g = gens_cache.get(k)
        if g is None:
            c = conj[k]
            g = gens_cache[k] = [h**c for h in o_reps[classes.class_of[k]].generators]
        return g

    def contained(a: int, b: int) -> bool:
        if o_order[b] % o_order[a]:
            return False
        rep_b, ci = o_reps[classes.class_of[b]], conj_inv[b]
        return all(rep_b.contains(x**ci) for x in o_gens(a))

    # distinct groups: canon[k] is the first lattice index with the same group
    canon = list(range(L))
    for a in range(L):
        for b in range(a):
            if canon[b] == b and o_order[a] == o_order[b] and contained(a, b):
                canon[a] = b
                break
    distinct = sorted(set(canon))
    above: dict = {a: set() for a in distinct}
    for a in distinct:
        for b in distinct:
            if a != b and o_order[b] > o_order[a] and contained(a, b):
                above[a].add(b)
    # move list
    xindex: dict = {}
    xlist: list[Permutation] = []
    moves_per_t: list[list[int]] = []
    groups_per_point: list[int] = []
    ident = index[perm_key(lat.S.identity())]
    for t in range(n_s):
        if t == ident:
            moves_per_t.append([])
            groups_per_point.append(0)
            continue
        here = sorted({canon[k] for k in range(L) if (lat.masks[k] >> t) & 1})
        here_set = set(here)
        maximal = [a for a in here if not (above[a] & here_set)]
        groups_per_point.append(len(maximal))
        mv = []
        for a in maximal:
            for x in o_gens(a):
                key = perm_key(x)
                j = xindex.get(key)
                if j is None:
                    j = xindex[key] = len(xlist)
                    xlist.append(x)
                if j not in mv:
                    mv.append(j)
        moves_per_t.append(sorted(mv))
    n = comp.G.degree
    xperm = np.array([list(x) for x in xlist], dtype=np.int32).reshape(len(xlist), n)
    xconj = np.zeros((len(xlist), n_s), dtype=np.int32)
    for t, mv in enumerate(moves_per_t):
        for j in mv:
            xconj[j, t] = index[perm_key(elements[t] ** xlist[j])]
    offsets = np.zeros(n_s + 1, dtype=np.int64)
    for t, mv in enumerate(moves_per_t):
        offsets[t + 1] = offsets[t] + len(mv)
    moves = np.array([j for mv in moves_per_t for j in mv], dtype=np.int32)
    starts = np.array([t for t in range(n_s) if t != ident], dtype=np.int32)
    return BFSInputs(offsets, moves, xperm, xconj, starts, xlist, groups_per_point)


def verified_subgroup(G: GroupHandle, elems: Sequence[Permutation]) -> GroupHandle:
    """The subgroup generated by ``elems``, checked to consist of exactly them."""
    chain = _Chain(G.degree)
    gens = []
    for g in elems:
        if chain.add(g):
            gens.append(g)
    H = GroupHandle(G.degree, gens, _chain=chain)
    if H.order() != len({perm_key(g) for g in elems}):
        raise SubgroupCheckFailed(f"accepted set of size {len(elems)} generates a group of order {H.order()}")
    return H


# -- the centralizer lemma ---------------------------------------------------


def _check_witness(G: GroupHandle, z: Sequence[int], p: int, caps: Caps) -> bool:
    if perm_order(z) != p:
        return False
    C = centralizer_orbit(G, z, caps)[1]
    return o_p_prime_residual(C, p, caps).order() == C.order()


def autocent_witnesses(G: GroupHandle, S: GroupHandle, N: GroupHandle, p: int, caps: Caps = DEFAULT_CAPS) -> list[Permutation]:
    """Elements z of order p in S, one per N-class, with O^{p'}(C_G(z)) = C_G(z)."""
    seen: set = set()
    out = []
    for z in S.elements(caps.enum):
        if perm_order(z) != p or perm_key(z) in seen:
            continue
        elems, _, _ = element_orbit(N, z, caps)
        seen.update(perm_key(e) for e in elems)
        if _check_witness(G, z, p, caps):
            out.append(z)
    return out


def autocent_filter(
    G: GroupHandle,
    S: GroupHandle,
    g: Sequence[int],
    witnesses: Sequence[Sequence[int]],
    caps: Caps = DEFAULT_CAPS,
    *,
    _cache: dict | None = None,
    _verified: bool = False,
) -> bool:
    """True certifies g ∈ K°: C_S(g) contains a G-conjugate of some witness z.

    Every witness must have order p and satisfy O^{p'}(C_G(z)) = C_G(z);
    a witness failing this raises ValueError.
    """
    primes = prime_divisors(S.order())
    if not primes:
        return False
    p = primes[0]
    if not _verified:
        for z in witnesses:
            if not _check_witness(G, z, p, caps):
                raise ValueError("witness does not satisfy O^{p'}(C_G(z)) = C_G(z)")
    cache = {} if _cache is None else _cache
    classes = []
    for z in witnesses:
        key = perm_key(z)
        cls = cache.get(key)
        if cls is None:
            elems, _, _ = element_orbit(G, z, caps)
            cls = cache[key] = {perm_key(e) for e in elems}
        classes.append(cls)
    g = Permutation._trusted(g)
    for s in S.elements(caps.enum):
        if perm_order(s) != p or s * g != g * s:
            continue
        k = perm_key(s)
        if any(k in cls for cls in classes):
            return True
    return False


# -- resolution and report ---------------------------------------------------


@dataclass
class Resolution:
    tag: str
    K: GroupHandle | None
    lower: GroupHandle | None  # bracket when undetermined
    upper: GroupHandle
    failed: list[str] = field(default_factory=list)
    states: int | None = None

    @property
    def determined(self) -> bool:
        return self.K is not None


def resolve_k(
    G: GroupHandle,
    p: int,
    mode: str = "auto",
    caps: Caps = DEFAULT_CAPS,
    comp: KComputation | None = None,
    backend: str | None = None,
) -> Resolution:
    mode = mode.replace("-", "_")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    comp = comp or KComputation(G, p, caps)
    S, N = comp.S, comp.N
    failed: list[str] = []
    if mode == "bfs":
        try:
            K, states = comp.chain_closure(backend)
            return Resolution("BFS_EXACT", K, K, N, failed, states)
        except CapExceeded as exc:
            failed.append(f"BFS: {exc}")
            comp.notes.append("exact closure over caps; falling back to criteria")
    if S.order() == N.order():
        return Resolution("SN", N, N, N, failed)
    failed.append("SN: N_G(S) != S")
    if _is_cyclic_p_group(S):
        # O^{p'}(N_G(S)) = S and every nontrivial Q <= S is characteristic in S
        return Resolution("CYCLIC", S, S, N, failed)
    kc = None
    if comp.lattice_available():
        kc = comp.k_circle()
        if kc.order() == N.order():
            return Resolution("KCIRC", N, N, N, failed)
        failed.append(f"KCIRC: |N:K°| = {N.order() // kc.order()}")
    else:
        failed.append(f"KCIRC: {comp._classes_error}")
        try:
            lower = comp.autocent_lower_bound()
            if lower.order() == N.order():
                return Resolution("AUTOCENT", N, N, N, failed)
            failed.append(f"AUTOCENT: certified subgroup has index {N.order() // lower.order()}")
        except CapExceeded as exc:
            failed.append(f"AUTOCENT: {exc}")
    try:
        if is_ti_sylow(G, S, caps):
            return Resolution("TI", S, S, N, failed)
        failed.append("TI: Sylow subgroups meet nontrivially")
    except CapExceeded as exc:
        failed.append(f"TI: {exc}")
    if kc is not None:
        if S.order() == p * p:
            return Resolution("R2", kc, kc, N, failed)
        failed.append("R2: |S| != p^2")
        if comp.nnc_holds():
            return Resolution("NNC", kc, kc, N, failed)
        failed.append("NNC: some Q with p < |Q| < |S| has O^{p'}(N_G(Q)) not in S")
    if mode == "auto" and kc is not None:
        try:
            K, states = comp.chain_closure(backend)
            return Resolution("BFS_EXACT", K, K, N, failed, states)
        except CapExceeded as exc:
            failed.append(f"BFS: {exc}")
    lower = kc if kc is not None else S
    return Resolution("UNDETERMINED", None, lower, N, failed)


def k_circle(G: GroupHandle, p: int, caps: Caps = DEFAULT_CAPS) -> GroupHandle:
    return KComputation(G, p, caps).k_circle()


def chain_closure_k(G: GroupHandle, p: int, caps: Caps = DEFAULT_CAPS, backend: str | None = None) -> GroupHandle:
    return KComputation(G, p, caps).chain_closure(backend)[0]


@dataclass
class KReport:
    group_name: str
    prime: int
    sylow_order: int
    normalizer_order: int
    k_circle_order: int | None
    k_order: int | list[int]
    tag: str
    t_group: list[int] | str
    timing_ms: float
    n_over_k_order: int | None = None
    failed_criteria: list[str] = field(default_factory=list)
    bfs_states: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def determined(self) -> bool:
        return self.tag != "UNDETERMINED"

    def to_dict(self) -> dict:
        return {
            "group_name": self.group_name,
            "prime": self.prime,
            "sylow_order": self.sylow_order,
            "normalizer_order": self.normalizer_order,
            "k_circle_order": self.k_circle_order,
            "k_order": self.k_order,
            "n_over_k_order": self.n_over_k_order,
            "tag": self.tag,
            "t_group": self.t_group,
            "failed_criteria": list(self.failed_criteria),
            "bfs_states": self.bfs_states,
            "notes": list(self.notes),
            "timing_ms": self.timing_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KReport":
        return cls(**{k: d.get(k) for k in cls.__dataclass_fields__ if k in d})


@dataclass
class KResult:
    """Report plus the subgroups it describes."""

    report: KReport
    S: GroupHandle
    N: GroupHandle
    k_circle: GroupHandle | None
    K: GroupHandle | None
    invariants: AbelianInvariants | None
    computation: KComputation


def t_group_report(
    G: GroupHandle,
    p: int,
    mode: str = "auto",
    caps: Caps = DEFAULT_CAPS,
    name: str = "G",
    backend: str | None = None,
) -> KResult:
    """Full pipeline: Sylow, normalizer, K°, K and T(G,S) = (N/K)^ab."""
    t0 = time.perf_counter()
    comp = KComputation(G, p, caps)
    res = resolve_k(G, p, mode, caps, comp, backend)
    S, N = comp.S, comp.N
    if res.tag in ("SN", "KCIRC", "AUTOCENT"):
        kc = N
    elif comp.lattice_available():
        kc = comp.k_circle()
    elif res.tag in ("CYCLIC", "TI"):
        kc = S  # pinned: S <= K° <= K = S
    else:
        kc = None
    inv = None
    if res.K is not None:
        inv = abelianization(N, res.K, caps).invariants
        if inv.order % p == 0:
            raise AssertionError("p divides |T(G,S)|")
        k_order: int | list[int] = res.K.order()
    else:
        k_order = [res.lower.order(), N.order()]
    ms = (time.perf_counter() - t0) * 1000.0
    report = KReport(
        group_name=name,
        prime=p,
        sylow_order=S.order(),
        normalizer_order=N.order(),
        k_circle_order=kc.order() if kc is not None else None,
        k_order=k_order,
        tag=res.tag,
        t_group=inv.as_list() if inv is not None else "undetermined",
        timing_ms=round(ms, 3),
        n_over_k_order=N.order() // res.K.order() if res.K is not None else None,
        failed_criteria=res.failed,
        bfs_states=res.states,
        notes=list(comp.notes),
    )
    return KResult(report, S, N, kc, res.K, inv, comp)
