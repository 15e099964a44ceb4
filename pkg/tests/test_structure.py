from __future__ import annotations

from math import prod

import pytest
from hypothesis import given
from hypothesis import strategies as st

from endotrivial.caps import DEFAULT_CAPS, CapExceeded
from endotrivial.catalog import load_catalog
from endotrivial.group import group_from_generators
from endotrivial.perm import Permutation
from endotrivial.structure import (
    AbelianInvariants,
    CosetSpace,
    NotNormal,
    abelian_invariants,
    abelianization,
    are_isomorphic,
    direct_product_element,
    elementary_divisors,
    find_isomorphism,
    quotient_group,
)
from endotrivial.subgroups import derived_subgroup, normalizer, sylow

import oracles as O


def cyc(n, *cs):
    return Permutation.from_cycles(cs, n)


def abelian(orders):
    gens, n = O.cyclic_product(orders)
    return group_from_generators(n, [Permutation(g) for g in gens])


# -- quotients ----------------------------------------------------------------


def test_quotient_by_whole_group_is_trivial():
    G = load_catalog("S4")
    assert quotient_group(G, G).order() == 1


def test_s4_mod_a4():
    G = load_catalog("S4")
    Q = quotient_group(G, derived_subgroup(G))
    assert Q.order() == 2


def test_sd16_mod_derived_is_klein_four():
    G = load_catalog("SD16")
    D = derived_subgroup(G)
    assert D.order() == 4 and D.is_abelian()
    assert any(O.elem_order(x) == 4 for x in D.elements())
    Q = quotient_group(G, D)
    assert Q.order() == 4
    assert Q.is_abelian()
    assert all(O.elem_order(x) <= 2 for x in Q.elements())


def test_quotient_requires_normal():
    G = load_catalog("S4")
    with pytest.raises(NotNormal):
        quotient_group(G, group_from_generators(4, [cyc(4, (0, 1))]))


def test_quotient_cap():
    G = load_catalog("A5")
    with pytest.raises(CapExceeded):
        quotient_group(G, group_from_generators(5, []), DEFAULT_CAPS.with_(quotient=10))


@pytest.mark.parametrize("name", ["S4", "SL23", "GL23", "SD16", "5x2S4", "3:8"])
def test_quotient_by_derived_is_abelian(name):
    G = load_catalog(name)
    D = derived_subgroup(G)
    Q = quotient_group(G, D)
    assert Q.order() == G.order() // D.order()
    assert all(a * b == b * a for a in Q.generators for b in Q.generators)


def test_coset_space_multiplication_matches_group():
    G = load_catalog("S4")
    V = group_from_generators(4, [cyc(4, (0, 1), (2, 3)), cyc(4, (0, 2), (1, 3))])
    cs = CosetSpace(G, V)
    assert len(cs) == 6
    for g in G.elements():
        for h in list(G.elements())[:8]:
            assert cs.mul(cs.index_of(g), cs.index_of(h)) == cs.index_of(g * h)
        assert cs.inv(cs.index_of(g)) == cs.index_of(~g)


# -- abelian invariants -------------------------------------------------------


@pytest.mark.parametrize(
    "name, factors",
    [
        ("SD16", [2, 2]),
        ("Q8", [2, 2]),
        ("5x2S4", [2, 5]),
        ("3:8", [8]),
        ("A5", []),
        ("S4", [2]),
        ("SL23", [3]),
        ("GL23", [2]),
        ("C12", [3, 4]),
        ("D8", [2, 2]),
    ],
)
def test_abelian_invariant_examples(name, factors):
    G = load_catalog(name)
    inv = abelian_invariants(G)
    assert inv.as_list() == factors
    assert inv.order == G.order() // derived_subgroup(G).order()


def test_invariants_value_type():
    assert str(AbelianInvariants((5, 2))) == "C2 x C5"
    assert AbelianInvariants(()).order == 1
    with pytest.raises(ValueError):
        AbelianInvariants((6,))
    assert elementary_divisors([12, 2]) == [2, 3, 4]


orders = st.lists(st.integers(2, 32), min_size=0, max_size=4).filter(lambda xs: prod(xs) <= 512)


@given(orders)
def test_invariants_against_census(xs):
    A = abelian(xs) if xs else group_from_generators(1, [])
    dec = abelianization(A)
    inv = dec.invariants
    assert inv.order == A.order() == prod(xs)
    census = O.order_census(O.closure(A.generators, A.degree))
    assert O.census_of_invariants(inv.factors, A.order()) == census
    # invariant factors form a divisor chain
    fs = dec.invariant_factors
    assert all(fs[i] % fs[i + 1] == 0 for i in range(len(fs) - 1))


@given(orders)
def test_coordinates_are_a_basis(xs):
    A = abelian(xs) if xs else group_from_generators(1, [])
    dec = abelianization(A)
    seen = set()
    for g in A.elements():
        c = dec.coordinates(g)
        assert all(0 <= ci < oi for ci, oi in zip(c, dec.orders))
        seen.add(c)
    assert len(seen) == A.order()


def test_abelianization_modulo_k():
    # M11, p=3: N/S is SD16 with abelianization C2 x C2
    G = load_catalog("M11")
    S = sylow(G, 3)
    N = normalizer(G, S)
    dec = abelianization(N, S)
    assert dec.invariants.as_list() == [2, 2]
    assert dec.exponent == 2


# -- isomorphism --------------------------------------------------------------


def test_direct_product_element():
    assert tuple(direct_product_element((1, 0), (0, 2, 1))) == (1, 0, 2, 4, 3)


@pytest.mark.parametrize(
    "a, b, expected",
    [("D8", "Q8", False), ("Q8", "Q8", True), ("S3", "C6", False), ("C6", "C6", True), ("S4", "SL23", False)],
)
def test_are_isomorphic(a, b, expected):
    assert are_isomorphic(load_catalog(a), load_catalog(b)) is expected


def test_isomorphism_across_representations():
    # C2 x C4 on disjoint blocks vs other groups of order 8
    A = abelian([2, 4])
    assert find_isomorphism(A, abelian([8])) is None
    B = load_catalog("D8")
    assert find_isomorphism(A, B) is None
    C = group_from_generators(6, [cyc(6, (0, 1, 2, 3), (4, 5)), cyc(6, (4, 5))])
    iso = find_isomorphism(A, C)
    assert iso is not None and len(iso) == len(A.generators)


def test_m11_sylow3_quotient_is_sd16():
    G = load_catalog("M11")
    S = sylow(G, 3)
    N = normalizer(G, S)
    assert are_isomorphic(load_catalog("SD16"), quotient_group(N, S))
