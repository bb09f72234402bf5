import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hofa.groups import FiniteAbelianGroup
from hofa.polymaps import (INTEGER_OPS, BinomialPolyMap, abelian_ops, binom, binomial_span,
                           degree_check, grid_degree_survivors, leibman_derivative, polynomial_degree)

Z = lambda *m: FiniteAbelianGroup(tuple(m))


@given(st.integers(-30, 30), st.integers(0, 6))
def test_extended_binomial(x, j):
    if x >= 0:
        assert binom(x, j) == comb(x, j)
    # Pascal's rule holds for every integer x
    if j >= 1:
        assert binom(x + 1, j) == binom(x, j) + binom(x, j - 1)


def test_eval_examples():
    assert BinomialPolyMap(Z(5), 1, (((2,), (1,)),))(3) == (1,)
    assert BinomialPolyMap(Z(7), 1, (((1,), (2,)),))(4) == (6,)
    assert BinomialPolyMap(Z(3), 2, (((1,), (1, 1)),))((2, 2)) == (1,)


def test_eval_wide_integers():
    phi = BinomialPolyMap(Z(97), 1, (((1,), (5,)),))
    x = 10 ** 6
    assert phi(x) == (comb(x, 5) % 97,)


def test_leibman_examples():
    hom = lambda x: 3 * x
    d = leibman_derivative(hom, 4)
    assert {d(x) for x in range(-5, 6)} == {12}
    pascal = leibman_derivative(lambda x: binom(x, 2), 1)
    assert all(pascal(x) == x for x in range(-10, 10))


def test_degree_of_binomial_square():
    ops = abelian_ops(Z(7))
    phi = BinomialPolyMap(Z(7), 1, (((1,), (2,)),))
    box = range(-5, 6)
    assert degree_check(phi, 2, box, ops=ops)
    assert not degree_check(phi, 1, box, ops=ops)


def test_homomorphism_degree_one():
    assert degree_check(lambda x: 5 * x, 1, range(-4, 5))
    assert polynomial_degree(lambda x: 5 * x, range(-4, 5)) == 1
    assert polynomial_degree(lambda x: 7, range(-4, 5)) == 0


@pytest.mark.parametrize("exps", [e for d in range(4) for e in itertools.product(range(d + 1), repeat=2) if sum(e) == d])
def test_binomial_generators_have_exact_degree(exps):
    group = Z(5)
    phi = BinomialPolyMap(group, 2, (((1,), exps),))
    ops = abelian_ops(group)
    box = [range(-2, 3), range(-2, 3)]
    shifts = [range(-1, 2), range(-1, 2)]
    k = sum(exps)
    assert degree_check(phi, k, box, shifts, ops)
    if k:
        assert not degree_check(phi, k - 1, box, shifts, ops)


def test_spanning_on_grid():
    survivors = grid_degree_survivors(4, 2, 2)
    span = binomial_span(4, 2, 2)
    assert survivors == span
    assert len(span) == 2 ** 6


def test_integer_cubic():
    cube = lambda x: x ** 3
    assert polynomial_degree(cube, range(-4, 5), range(-2, 3)) == 3
    assert not degree_check(cube, 2, range(-4, 5), range(-2, 3), INTEGER_OPS)
