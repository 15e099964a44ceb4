from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from endotrivial.perm import (
    Permutation,
    PermutationError,
    compose,
    conjugate,
    cycles,
    format_cycles,
    inverse,
    perm_order,
    power,
)

import oracles as O


def perms(min_n=1, max_n=9):
    return st.integers(min_n, max_n).flatmap(lambda n: st.permutations(range(n)).map(Permutation))


def perm_pairs(max_n=9):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(st.permutations(range(n)).map(Permutation), st.permutations(range(n)).map(Permutation))
    )


def cyc(n, *cs):
    return Permutation.from_cycles(cs, n)


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (cyc(3, (0, 1, 2)), cyc(3, (0, 2, 1)), cyc(3)),
        (cyc(2, (0, 1)), cyc(2, (0, 1)), cyc(2)),
        # left to right: 0 -> 1 -> 2, 1 -> 0 -> 0, 2 -> 2 -> 1
        (cyc(3, (0, 1)), cyc(3, (1, 2)), cyc(3, (0, 2, 1))),
    ],
)
def test_compose_examples(a, b, expected):
    assert compose(a, b) == expected
    assert a * b == expected


def test_compose_hand_images():
    assert tuple(cyc(3, (0, 1)) * cyc(3, (1, 2))) == (2, 0, 1)


def test_degree_mismatch():
    with pytest.raises(PermutationError):
        compose(cyc(3, (0, 1)), cyc(4, (0, 1)))
    with pytest.raises(PermutationError):
        conjugate(cyc(3, (0, 1)), cyc(4))


@pytest.mark.parametrize("images", [(), (0, 0), (1, 2), (0, 3, 1), (-1, 0)])
def test_rejects_non_bijections(images):
    with pytest.raises(PermutationError):
        Permutation(images)


@pytest.mark.parametrize("cs", [[(0, 1), (1, 2)], [(0, 5)]])
def test_from_cycles_rejects(cs):
    with pytest.raises(PermutationError):
        Permutation.from_cycles(cs, 4)


@given(perms())
def test_inverse_is_two_sided(a):
    e = Permutation.identity(len(a))
    assert a * inverse(a) == e
    assert inverse(a) * a == e
    assert ~a == inverse(a)


@given(perm_pairs())
def test_matches_oracle_product(ab):
    a, b = ab
    assert tuple(a * b) == O.mul(a, b)
    assert tuple(a**b) == O.conj(a, b)


@given(perm_pairs())
def test_conjugation_is_right_action(ab):
    y, x = ab
    assert y**x == inverse(x) * y * x
    assert (y ** x) ** inverse(x) == y


@given(perms(), st.integers(-12, 12))
def test_power_matches_repeated_product(a, e):
    expected = Permutation.identity(len(a))
    step = a if e >= 0 else inverse(a)
    for _ in range(abs(e)):
        expected = expected * step
    assert power(a, e) == expected
    assert a**e == expected


@given(perms())
def test_order_and_cycles(a):
    assert perm_order(a) == O.elem_order(a)
    assert power(a, perm_order(a)).is_identity()
    pts = sorted(x for c in cycles(a) for x in c)
    assert pts == sorted(set(pts))
    assert Permutation.from_cycles(cycles(a), len(a)) == a


@pytest.mark.parametrize(
    "perm, text",
    [
        (cyc(4), "()"),
        (cyc(3, (0, 1, 2)), "(1,2,3)"),
        (cyc(5, (0, 1), (2, 3)), "(1,2)(3,4)"),
    ],
)
def test_format_cycles(perm, text):
    assert format_cycles(perm, base=1) == text


def test_cycle_type():
    # fixed points are not listed
    assert cyc(6, (0, 1, 2), (3, 4)).cycle_type() == (3, 2)
    assert cyc(4).cycle_type() == ()
