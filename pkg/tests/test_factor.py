import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclolrs.cyclo import make_field, norm
from cyclolrs.errors import EmptyS, FactorizationTimeout, IncompleteFactorization, NonIntegral, ZeroElement
from cyclolrs.ideals import (
    factor_principal,
    greatest_prime_and_radical,
    parse_prime_ideal,
    s_part,
    split_prime,
    valuation,
)
from cyclolrs.intfactor import factorint, is_prime, pollard_brent


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 10**18))
def test_factorint_matches_sympy(n):
    assert factorint(n) == sympy.factorint(n)


def test_factorint_semiprime_beyond_trial_division():
    p, q = sympy.nextprime(10**9), sympy.nextprime(3 * 10**9)
    assert factorint(p * q) == {p: 1, q: 1}
    assert pollard_brent(p * q) in (p, q)
    assert is_prime(p) and not is_prime(p * q)


def test_factorint_budget():
    n = sympy.nextprime(10**20) * sympy.nextprime(10**21)
    with pytest.raises(FactorizationTimeout) as info:
        factorint(n, budget_ms=0.001)
    found, rest = info.value.partial
    assert found == {} and rest == [n]


def test_split_prime_examples():
    K = make_field(4)
    five = split_prime(K, 5)
    assert len(five) == 2 and all((P.f, P.e) == (1, 1) for P in five)
    assert sorted(P.gen_poly for P in five) == [(2, 1), (3, 1)]
    (three,) = split_prime(K, 3)
    assert (three.f, three.e, three.norm) == (2, 1, 9)
    (two,) = split_prime(K, 2)
    assert (two.f, two.e) == (1, 2)


@pytest.mark.parametrize("m", [3, 4, 5, 8, 9, 12, 15, 20, 21])
@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 31])
def test_degree_identity(m, p):
    ideals = split_prime(make_field(m), p)
    assert sum(P.e * P.f for P in ideals) == make_field(m).degree
    if m % p:
        order = sympy.n_order(p, m) if m > 1 else 1
        assert all(P.e == 1 and P.f == order for P in ideals)


def test_valuation_examples():
    K = make_field(4)
    z = K.zeta()
    (two,) = split_prime(K, 2)
    assert valuation(8 + 8 * z, two) == 7
    assert valuation(K(3), two) == 0
    for P in split_prime(K, 5):
        assert valuation(K(5), P) == 1
    with pytest.raises(ZeroElement):
        valuation(K.zero, two)
    with pytest.raises(NonIntegral):
        valuation(K(Fraction(1, 2)), two)


def test_factor_principal_examples():
    f72 = factor_principal(make_field(1)(72))
    assert [(P.p, v) for P, v in f72.factors] == [(2, 3), (3, 2)] and f72.norm_abs == 72
    unit = factor_principal(make_field(5).zeta())
    assert unit.factors == [] and unit.norm_abs == 1
    z = make_field(4).zeta()
    g = factor_principal(8 + 8 * z)
    assert [(P.p, P.e, v) for P, v in g.factors] == [(2, 2, 7)] and g.norm_abs == 128
    assert greatest_prime_and_radical(f72) == (3, 6)
    assert greatest_prime_and_radical(g) == (2, 2)
    assert greatest_prime_and_radical(unit) == (1, 1)


def test_incomplete_factorization_is_flagged():
    n = sympy.nextprime(10**20) * sympy.nextprime(10**21)
    part = factor_principal(make_field(1)(2 * n), budget_ms=0.001, allow_partial=True)
    assert not part.complete
    with pytest.raises(IncompleteFactorization):
        greatest_prime_and_radical(part)


def test_s_part_examples():
    K1, K4 = make_field(1), make_field(4)
    f72 = factor_principal(K1(72))
    r = s_part(f72, split_prime(K1, 2))
    assert (r.s_part_norm, r.cofactor_norm) == (8, 9)
    r = s_part(f72, split_prime(K1, 5))
    assert (r.s_part_norm, r.cofactor_norm) == (1, 72)
    z = K4.zeta()
    r = s_part(factor_principal(8 + 8 * z), split_prime(K4, 2))
    assert (r.s_part_norm, r.cofactor_norm) == (128, 1)
    with pytest.raises(EmptyS):
        s_part(f72, [])


def test_prime_ideal_text():
    for P in split_prime(make_field(12), 13):
        assert parse_prime_ideal(P.to_text(), 12) == P


def _random_integral(K, rng, bound=6):
    while True:
        beta = K.from_coords([rng.randint(-bound, bound) for _ in range(K.degree)])
        if not beta.is_zero():
            return beta


@pytest.mark.parametrize("m", [3, 4, 5, 7, 8, 12])
def test_factorization_invariants(m):
    K = make_field(m)
    rng = random.Random(m)
    for _ in range(6):
        beta, gamma = _random_integral(K, rng), _random_integral(K, rng)
        fb, fg, fbg = factor_principal(beta), factor_principal(gamma), factor_principal(beta * gamma)
        for fact in (fb, fg, fbg):
            assert fact.recompose() == fact.norm_abs == abs(norm(fact.element))
            for p, e in sympy.factorint(fact.norm_abs).items():
                assert sum(P.f * v for P, v in fact.factors if P.p == p) == e
        vb, vg = dict(fb.factors), dict(fg.factors)
        for P, v in fbg.factors:
            assert v == vb.get(P, 0) + vg.get(P, 0)
        S = split_prime(K, 2) + split_prime(K, 3)
        assert s_part(fbg, S).s_part_norm == s_part(fb, S).s_part_norm * s_part(fg, S).s_part_norm


def test_primes_beyond_word_size():
    p = int(sympy.nextprime(2**70))
    q = int(sympy.nextprime(2**66))
    K = make_field(4)
    ideals = split_prime(K, p)
    assert sum(P.e * P.f for P in ideals) == 2
    fact = factor_principal(K(p * q))
    assert fact.recompose() == fact.norm_abs == (p * q) ** 2
