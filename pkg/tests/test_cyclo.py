import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclolrs.cyclo import (
    Ordering,
    abs_compare,
    cyclotomic_poly,
    euler_phi,
    galois_conjugates,
    heights,
    house,
    is_root_of_unity,
    make_field,
    min_poly,
    norm,
    parse_elem,
    to_text,
)
from cyclolrs.errors import ParseError, ZeroElement

X = sympy.Symbol("X")


def elems(m, bound=5):
    K = make_field(m)
    coord = st.fractions(min_value=-bound, max_value=bound, max_denominator=3)
    return st.lists(coord, min_size=K.degree, max_size=K.degree).map(K.from_coords)


def int_elems(m, bound=4):
    K = make_field(m)
    return st.lists(st.integers(-bound, bound), min_size=K.degree, max_size=K.degree).map(K.from_coords)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6, 8, 9, 12, 15, 16, 20, 30])
def test_cyclotomic_poly_matches_sympy(m):
    ref = sympy.Poly(sympy.cyclotomic_poly(m, X), X).all_coeffs()[::-1]
    assert list(cyclotomic_poly(m)) == [int(c) for c in ref]
    K = make_field(m)
    assert K.degree == sympy.totient(m) == euler_phi(m) == len(K.galois_exponents)


@pytest.mark.parametrize("m,deg,tors", [(1, 1, 2), (4, 2, 4), (5, 4, 10)])
def test_make_field(m, deg, tors):
    K = make_field(m)
    assert (K.degree, K.torsion_order) == (deg, tors)


def test_galois_conjugates_examples():
    K4, K5 = make_field(4), make_field(5)
    z = K4.zeta()
    assert set(galois_conjugates(2 + z)) == {2 + z, 2 - z}
    assert galois_conjugates(K5(3)) == [K5(3)] * 4
    w = K5.zeta()
    assert galois_conjugates(w) == [w, w**2, w**3, w**4]


def test_norm_examples():
    z4, z5 = make_field(4).zeta(), make_field(5).zeta()
    assert norm(8 + 8 * z4) == 128
    assert norm(1 + z5) == 1
    assert norm(make_field(7).zero) == 0


@pytest.mark.parametrize("m", [3, 5, 8, 12])
def test_norm_equals_resultant(m):
    K = make_field(m)
    phi = sympy.Poly(sympy.cyclotomic_poly(m, X), X)
    for coords in ([1, 2] + [0] * (K.degree - 2), [3, -1, 2, 0, 5, 1, 0, 0][: K.degree], [Fraction(1, 2)] * K.degree):
        beta = K.from_coords(coords)
        b = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(beta.coords)), X)
        assert norm(beta) == Fraction(str(sympy.resultant(phi, b)))


def test_house_examples():
    assert house(make_field(1)(2), 80).contains(2)
    assert house(make_field(8).zeta(), 80).overlaps(1)
    golden = (1 + mpmath.sqrt(5)) / 2
    h = house(1 + make_field(5).zeta(), 80)
    assert abs(float(h.mid()) - float(golden)) < 1e-15
    assert float(h.rad()) < 1e-20


def test_min_poly_examples():
    assert min_poly(make_field(4).zeta()) == ((1, 0, 1), 1)
    assert min_poly(1 + make_field(5).zeta()) == ((1, -2, 4, -3, 1), 1)
    assert min_poly(make_field(1)(Fraction(1, 2))) == ((-1, 2), 2)


@settings(max_examples=40, deadline=None)
@given(elems(12))
def test_min_poly_agrees_with_sympy(beta):
    if beta.is_zero():
        return
    z = sympy.exp(2 * sympy.pi * sympy.I / 12)
    expr = sum(sympy.Rational(c.numerator, c.denominator) * z**i for i, c in enumerate(beta.coords))
    ref = sympy.Poly(sympy.minimal_polynomial(expr, X), X).all_coeffs()[::-1]
    ref = [int(c) for c in ref]
    if ref[-1] < 0:
        ref = [-c for c in ref]
    assert list(min_poly(beta).coeffs) == ref


def test_heights_examples():
    H, h = heights(make_field(1)(2), 80)
    assert H.contains(2) and abs(float(h.mid()) - math.log(2)) < 1e-15
    for m in (1, 3, 7, 12):
        H, h = heights(make_field(m).zeta(), 80)
        assert H.contains(1) and h.contains(0)
    # oracle: roots of the minimal polynomial
    roots = mpmath.polyroots([1, -3, 4, -2, 1], extraprec=60)
    ref_H = mpmath.fprod(max(1, abs(r)) for r in roots)
    H, h = heights(1 + make_field(5).zeta(), 80)
    assert abs(float(H.mid()) - float(ref_H)) < 1e-12
    assert abs(float(H.mid()) - 2.6180339887) < 1e-9
    assert abs(float(h.mid()) - 0.2406059125) < 1e-9
    with pytest.raises(ZeroElement):
        heights(make_field(5).zero)


def test_is_root_of_unity_examples():
    z3, z5, z7 = make_field(3).zeta(), make_field(5).zeta(), make_field(7).zeta()
    assert is_root_of_unity(1 + z3)
    assert (1 + z3) ** 6 == 1
    assert not is_root_of_unity(1 + z5)
    assert is_root_of_unity(-(z7**3))
    assert not is_root_of_unity(make_field(7).zero)


@pytest.mark.parametrize("m", [1, 4, 6, 9, 10])
def test_roots_of_unity_are_exactly_the_torsion(m):
    K = make_field(m)
    roots = set(K.roots_of_unity())
    assert len(roots) == K.torsion_order
    assert all(is_root_of_unity(r) for r in roots)
    # a sample of small integral elements: torsion iff in the list
    for coords in [(1, 1), (2, 0), (1, -1), (0, 2)]:
        beta = K.from_coords(list(coords[: K.degree]) + [0] * max(0, K.degree - 2))
        assert is_root_of_unity(beta) == (beta in roots)


def test_abs_compare_examples():
    K = make_field(4)
    z = K.zeta()
    assert abs_compare(3 + z, 1 + 3 * z) == Ordering.EQUAL
    assert abs_compare(3 + z, 1 + z) == Ordering.GREATER
    assert abs_compare(z, K.one) == Ordering.EQUAL


@settings(max_examples=60, deadline=None)
@given(int_elems(5), int_elems(5))
def test_abs_compare_antisymmetric_and_matches_floats(a, b):
    c = abs_compare(a, b)
    assert abs_compare(b, a) == -c
    w = complex(mpmath.exp(2j * mpmath.pi / 5))
    fa = abs(sum(float(x) * w**i for i, x in enumerate(a.coords)))
    fb = abs(sum(float(x) * w**i for i, x in enumerate(b.coords)))
    if abs(fa - fb) > 1e-9:
        assert c == (Ordering.GREATER if fa > fb else Ordering.LESS)


@settings(max_examples=50, deadline=None)
@given(elems(8), elems(8), elems(8))
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    if not a.is_zero():
        assert a * a.inverse() == 1
        assert norm(a) * norm(b) == norm(a * b)


@settings(max_examples=30, deadline=None)
@given(elems(9), elems(9), st.sampled_from([1, 2, 4, 5, 7, 8]))
def test_galois_is_a_ring_homomorphism(a, b, s):
    assert (a * b).galois(s) == a.galois(s) * b.galois(s)
    assert (a + b).galois(s) == a.galois(s) + b.galois(s)


def test_text_round_trip():
    K = make_field(5)
    beta = K.from_coords([Fraction(1, 2), -3, 0, 7])
    assert to_text(beta) == "5; 1/2, -3, 0, 7"
    assert parse_elem(to_text(beta)) == beta
    for bad in ("5; 1, 2", "x; 1", "0; 1", "5; 1, 2, 3, q"):
        with pytest.raises(ParseError):
            parse_elem(bad)
