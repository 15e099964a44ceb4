from __future__ import annotations

import pytest

from endotrivial.caps import DEFAULT_CAPS
from endotrivial.catalog import all_catalog_groups, load_catalog
from endotrivial.group import group_from_generators
from endotrivial.kgroup import (
    KComputation,
    KReport,
    SubgroupCheckFailed,
    autocent_filter,
    autocent_witnesses,
    chain_closure_k,
    k_circle,
    resolve_k,
    t_group_report,
    verified_subgroup,
)
from endotrivial.perm import Permutation
from endotrivial.structure import direct_product_element, quotient_group
from endotrivial.subgroups import is_ti_sylow, prime_divisors, sylow

import oracles as O


def elems(H):
    return frozenset(tuple(h) for h in H.elements())


def product_group(a, b):
    A, B = load_catalog(a), load_catalog(b)
    gens = [direct_product_element(g, B.identity()) for g in A.generators]
    gens += [direct_product_element(A.identity(), h) for h in B.generators]
    return group_from_generators(A.degree + B.degree, gens)


def small_pairs(max_order=1000):
    for name, G in all_catalog_groups(max_order):
        for p in prime_divisors(G.order()):
            yield pytest.param(name, p, id=f"{name}-p{p}")


# -- oracle agreement ---------------------------------------------------------


def check_against_oracle(G, p):
    comp = KComputation(G, p)
    S_lib = elems(comp.S)
    Gs = O.closure(G.generators, G.degree)
    S, N, kc, K, bare = O.k_groups(Gs, p, G.degree, S=S_lib)
    assert elems(comp.N) == N
    if comp.S.order() > 1:
        assert elems(comp.k_circle()) == kc
    K_lib, _ = comp.chain_closure()
    assert elems(K_lib) == K
    if comp.S.order() > 1:
        got, _ = comp.chain_elements(restart=False)
        assert {tuple(g) for g in got} == bare
    return comp, K_lib


@pytest.mark.parametrize("name, p", list(small_pairs()))
def test_catalog_against_oracle(name, p):
    check_against_oracle(load_catalog(name), p)


# |N| and |K| in these products, frozen from the oracle
PRODUCTS = [
    ("A5", "S3", 3, 36, 18, "R2"),
    ("A5", "S3", 2, 24, 24, "KCIRC"),
    ("C3", "A5", 3, 18, 18, "KCIRC"),
    ("A4", "S3", 2, 24, 8, "BFS_EXACT"),
    ("S3", "S3", 2, 4, 4, "SN"),
    ("S3", "S3", 3, 36, 9, "TI"),
    pytest.param("A5", "C5", 5, 50, 50, "KCIRC", marks=pytest.mark.slow),
    pytest.param("A5", "A4", 2, 144, 48, "BFS_EXACT", marks=pytest.mark.slow),
]


@pytest.mark.parametrize("a, b, p, n_order, k_order, tag", PRODUCTS)
def test_products_against_oracle(a, b, p, n_order, k_order, tag):
    G = product_group(a, b)
    comp, K = check_against_oracle(G, p)
    assert comp.N.order() == n_order
    assert K.order() == k_order
    res = resolve_k(G, p)
    assert res.tag == tag
    assert res.K.equals(K)


# -- examples -----------------------------------------------------------------


@pytest.mark.parametrize(
    "name, p, tag, t",
    [
        ("S4", 2, "SN", []),
        ("S4", 3, "CYCLIC", [2]),
        ("A5", 2, "TI", [3]),
        ("A5", 5, "CYCLIC", [2]),
        ("PSL27", 7, "CYCLIC", [3]),
        ("PSL27", 2, "SN", []),
        ("S3", 3, "CYCLIC", [2]),
        ("Q8", 2, "SN", []),
        ("C9", 3, "SN", []),
        ("SL23", 2, "TI", [3]),
        ("GL23", 3, "CYCLIC", [2, 2]),
        ("M11", 2, "SN", []),
        ("M11", 3, "TI", [2, 2]),
        ("M12", 3, "KCIRC", []),
    ],
)
def test_report_examples(name, p, tag, t):
    r = t_group_report(load_catalog(name), p, name=name).report
    assert (r.tag, r.t_group) == (tag, t)
    assert r.determined


def test_k_circle_examples():
    # p-group: K° is everything
    D8 = load_catalog("D8")
    assert k_circle(D8, 2).equals(D8)
    A5 = load_catalog("A5")
    kc = k_circle(A5, 2)
    assert kc.equals(sylow(A5, 2))
    comp = KComputation(A5, 2)
    assert quotient_group(comp.N, kc).order() == 3
    M11 = load_catalog("M11")
    comp = KComputation(M11, 3)
    assert comp.k_circle().equals(comp.S)
    assert comp.N.order() // comp.k_circle().order() == 16


def test_m12_p3_k_circle_is_n():
    comp = KComputation(load_catalog("M12"), 3)
    assert comp.k_circle().equals(comp.N)


@pytest.mark.parametrize("name, p", [("S3", 3), ("M11", 3), ("A5", 2), ("D8", 2)])
def test_chain_closure_examples(name, p):
    G = load_catalog(name)
    K = chain_closure_k(G, p)
    expected = G if G.order() == 8 else sylow(G, p)
    assert K.equals(expected)


def test_criteria_only_can_be_undetermined():
    G = load_catalog("5x2S4")
    res = resolve_k(G, 2, mode="criteria_only")
    assert res.tag == "UNDETERMINED"
    assert res.K is None
    assert res.lower.is_subgroup_of(res.upper)
    assert any(f.startswith("NNC") for f in res.failed)
    exact = resolve_k(G, 2, mode="auto")
    assert exact.tag == "BFS_EXACT"
    assert res.lower.is_subgroup_of(exact.K)
    r = t_group_report(G, 2, mode="criteria_only").report
    assert r.t_group == "undetermined"
    assert r.k_order == [res.lower.order(), res.upper.order()]


def test_bfs_cap_degrades_to_undetermined():
    G = load_catalog("5x2S4")
    caps = DEFAULT_CAPS.with_(bfs_states=10)
    res = resolve_k(G, 2, mode="bfs", caps=caps)
    assert res.tag == "UNDETERMINED"
    assert any(f.startswith("BFS") for f in res.failed)


def test_bad_mode_and_prime():
    with pytest.raises(ValueError):
        resolve_k(load_catalog("S3"), 3, mode="fast")
    with pytest.raises(ValueError):
        KComputation(load_catalog("S3"), 4)


def test_report_roundtrip():
    r = t_group_report(load_catalog("A5"), 2, name="A5").report
    d = r.to_dict()
    assert KReport.from_dict(d) == r
    assert d["tag"] == "TI" and d["t_group"] == [3] and d["n_over_k_order"] == 3


# -- properties ---------------------------------------------------------------


@pytest.mark.parametrize("name, p", list(small_pairs(10**5)))
def test_tower_and_criteria_agree_with_bfs(name, p):
    G = load_catalog(name)
    comp = KComputation(G, p)
    S, N = comp.S, comp.N
    K, _ = comp.chain_closure()
    kc = comp.k_circle() if S.order() > 1 else S
    assert S.is_subgroup_of(kc) and kc.is_subgroup_of(K) and K.is_subgroup_of(N)
    assert kc.is_normal_in(N) and K.is_normal_in(N)
    assert kc.order() % S.order() == 0
    assert (N.order() // kc.order()) % p != 0
    res = resolve_k(G, p, mode="criteria_only")
    if res.determined:
        assert res.K.equals(K), res.tag


@pytest.mark.parametrize("name, p", list(small_pairs(10**5)))
def test_cyclic_and_ti_laws(name, p):
    G = load_catalog(name)
    comp = KComputation(G, p)
    S = comp.S
    cyclic = any(O.elem_order(g) == S.order() for g in S.elements()) or S.order() == 1
    if not (cyclic or is_ti_sylow(G, S)):
        pytest.skip("neither cyclic nor TI")
    K, _ = comp.chain_closure()
    assert K.equals(S)


def test_bare_chain_set_j2_p5():
    # bare chain products: 100 elements, generating the full K of order 150
    comp = KComputation(load_catalog("J2"), 5)
    bare, _ = comp.chain_elements(restart=False)
    assert len(bare) == 100
    keys = {tuple(g) for g in bare}
    assert all(tuple(~g) in keys for g in bare)
    assert all(tuple(g**x) in keys for g in bare for x in comp.N.generators)
    with pytest.raises(SubgroupCheckFailed):
        verified_subgroup(comp.G, bare)
    K, _ = comp.chain_closure()
    assert K.order() == 150
    assert K.equals(comp.k_circle())


@pytest.mark.parametrize("name, p", [("A4", 2), ("S4", 2), ("5x2S4", 2), ("SL23", 2), ("GL23", 2), ("M11", 2)])
def test_bare_chain_set_invariant(name, p):
    comp = KComputation(load_catalog(name), p)
    bare, _ = comp.chain_elements(restart=False)
    keys = {tuple(g) for g in bare}
    assert tuple(comp.G.identity()) in keys
    assert all(tuple(~g) in keys for g in bare)
    assert all(tuple(g**x) in keys for g in bare for x in comp.N.generators)


def test_verified_subgroup():
    G = load_catalog("S3")
    e = G.identity()
    t = Permutation.from_cycles([(0, 1)], 3)
    assert verified_subgroup(G, [e, t]).order() == 2
    with pytest.raises(SubgroupCheckFailed):
        verified_subgroup(G, [e, Permutation.from_cycles([(0, 1, 2)], 3)])


# -- the centralizer lemma ----------------------------------------------------


def test_autocent_examples():
    A5 = load_catalog("A5")
    comp = KComputation(A5, 2)
    S, N = comp.S, comp.N
    z = next(g for g in S.elements() if not g.is_identity())
    assert autocent_filter(A5, S, A5.identity(), [z])
    g = next(g for g in N.elements() if O.elem_order(g) == 3)
    assert not autocent_filter(A5, S, g, [z])


def test_autocent_rejects_bad_witness():
    A5 = load_catalog("A5")
    S = sylow(A5, 2)
    with pytest.raises(ValueError):
        autocent_filter(A5, S, A5.identity(), [Permutation.from_cycles([(0, 1, 2)], 5)])
    GL = load_catalog("GL23")
    S3 = sylow(GL, 3)
    z = next(g for g in S3.elements() if not g.is_identity())
    # C_G(z) = C6 has a 3'-quotient
    with pytest.raises(ValueError):
        autocent_filter(GL, S3, GL.identity(), [z])


@pytest.mark.parametrize("name, p", [("A5", 2), ("S4", 2), ("A4", 2), ("SL23", 2), ("M11", 3), ("PSL27", 2), ("GL23", 2)])
def test_autocent_monotone_soundness(name, p):
    G = load_catalog(name)
    comp = KComputation(G, p)
    ws = autocent_witnesses(G, comp.S, comp.N, p)
    Gs = O.closure(G.generators, G.degree)
    _, _, kc, _, _ = O.k_groups(Gs, p, G.degree, S=elems(comp.S))
    for g in comp.N.elements():
        if autocent_filter(G, comp.S, g, ws):
            assert tuple(g) in kc
    lower = comp.autocent_lower_bound()
    assert elems(lower) <= kc


def test_autocent_fallback_when_lattice_capped():
    G = load_catalog("M12")
    caps = DEFAULT_CAPS.with_(sylow_order=2)
    res = resolve_k(G, 3, mode="criteria_only", caps=caps)
    assert res.tag in ("AUTOCENT", "TI", "UNDETERMINED")
    assert any(f.startswith("KCIRC") for f in res.failed)
    if res.tag == "AUTOCENT":
        assert res.K.equals(KComputation(G, 3).N)
