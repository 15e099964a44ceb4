"""Brute-force oracles over explicit element sets.

Nothing here touches stabilizer chains or the package's subgroup
algorithms: groups are Python sets of image tuples closed by breadth-first
multiplication.  Only usable for small groups (a few thousand elements).
"""

from __future__ import annotations

from collections import Counter, deque
from math import gcd
from typing import Iterable


def mul(a, b):
    """Apply a then b."""
    return tuple(b[i] for i in a)


def inv(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def conj(y, x):
    return mul(mul(inv(x), y), x)


def ident(n):
    return tuple(range(n))


def elem_order(a):
    e, k, x = ident(len(a)), 1, a
    while x != e:
        x, k = mul(x, a), k + 1
    return k


def closure(gens: Iterable, n: int) -> frozenset:
    gens = [tuple(g) for g in gens]
    seen = {ident(n)}
    todo = deque(seen)
    while todo:
        x = todo.popleft()
        for g in gens:
            y = mul(x, g)
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return frozenset(seen)


def is_p_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


def p_part(n, p):
    q = 1
    while n % p == 0:
        n, q = n // p, q * p
    return q


def is_p_elt(a, p):
    return is_p_power(elem_order(a), p)


def normalizer(G, H):
    return frozenset(g for g in G if all(conj(h, g) in H for h in H))


def centralizer(G, x):
    return frozenset(g for g in G if mul(g, x) == mul(x, g))


def normal_closure(G, X, n):
    gens = set(X)
    while True:
        H = closure(gens, n)
        extra = {conj(h, g) for h in gens for g in G} - H
        if not extra:
            return H
        gens |= extra


def derived(G, n):
    return normal_closure(G, {mul(mul(inv(a), inv(b)), mul(a, b)) for a in G for b in G}, n)


def sylow(G, p, n):
    """Grow a p-subgroup one normalizing p-element at a time."""
    target = p_part(len(G), p)
    P = frozenset([ident(n)])
    while len(P) < target:
        NP = normalizer(G, P)
        for x in sorted(NP):
            if x in P or not is_p_elt(x, p):
                continue
            J = closure(list(P) + [x], n)
            if is_p_power(len(J), p):
                P = J
                break
        else:  # pragma: no cover - would contradict Sylow's theorem
            raise AssertionError("no p-element extends P")
    return P


def subgroups(H, n):
    """All subgroups of the small group H, by joining cyclic subgroups."""
    cyc = {closure([h], n) for h in H}
    found = set(cyc)
    layer = set(cyc)
    while layer:
        nxt = set()
        for A in layer:
            for C in cyc:
                if C <= A:
                    continue
                J = closure(list(A) + list(C), n)
                if J not in found:
                    found.add(J)
                    nxt.add(J)
        layer = nxt
    return found


def op_prime(H, p, n):
    """O^{p'}(H): generated by all p-elements of H."""
    return closure([h for h in H if is_p_elt(h, p)], n)


def k_groups(G, p, n, S=None):
    """(S, N, K°, K, bare chain set) straight from the definitions.

    K is reached by chains x_1 ... x_r with x_i anywhere in O^{p'}(N_G(Q_i))
    and a non-identity witness tracked through every step; chains may be
    concatenated, so K is the group generated by the chain elements.
    """
    S = S if S is not None else sylow(G, p, n)
    N = normalizer(G, S)
    e = ident(n)
    qs = [Q for Q in subgroups(S, n) if len(Q) > 1]
    O = {Q: op_prime(normalizer(G, Q), p, n) for Q in qs}
    kc = normal_closure(N, set(S) | {x for Q in qs for x in O[Q] if x in N}, n)

    def run(restart):
        starts = [t for t in S if t != e]
        seen = set()
        todo = deque()
        for t in starts:
            seen.add((t, e))
            todo.append((t, e))
        acc = {e}
        while todo:
            t, w = todo.popleft()
            for Q in qs:
                if t not in Q:
                    continue
                for x in O[Q]:
                    st = (conj(t, x), mul(w, x))
                    if st in seen:
                        continue
                    seen.add(st)
                    todo.append(st)
                    w2 = st[1]
                    if w2 in N and w2 not in acc:
                        acc.add(w2)
                        if restart:
                            for t0 in starts:
                                if (t0, w2) not in seen:
                                    seen.add((t0, w2))
                                    todo.append((t0, w2))
        return frozenset(acc)

    return S, N, kc, run(True), run(False)


# -- abelian groups ------------------------------------------------------------


def order_census(G) -> Counter:
    return Counter(elem_order(g) for g in G)


def census_of_invariants(factors, total) -> Counter:
    """Element-order census of the product of cyclic groups of the given orders."""

    def divisors(m):
        return [d for d in range(1, m + 1) if m % d == 0]

    at_most = {d: 1 for d in divisors(total)}
    for d in at_most:
        c = 1
        for f in factors:
            c *= gcd(d, f)
        at_most[d] = c
    exact = Counter()
    for d in sorted(at_most):
        exact[d] = at_most[d] - sum(exact[e] for e in exact if d % e == 0 and e != d)
    return +exact


def cyclic_product(orders):
    """Product of cyclic groups on disjoint blocks; returns (generators, degree)."""
    n = sum(orders) or 1
    gens, start = [], 0
    for k in orders:
        g = list(range(n))
        for i in range(k):
            g[start + i] = start + (i + 1) % k
        gens.append(tuple(g))
        start += k
    return gens, n
