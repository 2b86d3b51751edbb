from fractions import Fraction

import pytest
import sympy

from cyclolrs.cyclo import make_field
from cyclolrs.errors import UniverseTooSmall
from cyclolrs.exceptional import (
    XY_MINUS_U,
    RationalFunctionPair,
    budget_breakdown,
    divide_by_binomial,
    exclusion_budget,
    level_set_count,
    modulus_difference,
    scan_multi_dominant,
    scan_point,
    split_by_tie,
    torsion_factor_check,
    verify_witness,
)
from cyclolrs.lrs import ParamLRS

from conftest import gaussian_family, tied_family

K1 = make_field(1)


def poly(*cs, K=K1):
    return tuple(K(c) for c in cs)


def test_scan_small_orders():
    hits = scan_multi_dominant(tied_family(), 4)
    assert [(h.m, h.j, h.tie_size) for h in hits] == [(4, 1, 2), (4, 3, 2)]
    assert scan_multi_dominant(gaussian_family(), 12) == []


def test_scan_single_point():
    # at zeta = 1 the tied family has alpha ratio 1, which is torsion
    assert scan_point(tied_family(), 1, 1) is None
    L = ParamLRS.from_coefficients([[1], [1]], [[3], [-3, 0]])
    assert scan_point(L, 1, 1) is None
    L = ParamLRS.from_coefficients([[1], [1]], [[3, 1], [1, 3]])
    assert scan_point(L, 4, 1) == 2


def test_scan_three_way_tie():
    # 5, 3 + 4i, 4 + 3i all have modulus 5 and pairwise non-torsion ratios
    L = ParamLRS.from_coefficients([[1], [1], [1]], [[5], [3, 4], [4, 3]])
    assert scan_point(L, 4, 1) == 3
    two, more = split_by_tie(scan_multi_dominant(L, 6))
    assert (4, 1, 3) in more and all(h.tie_size == 2 for h in two)


def test_modulus_difference_matches_sympy():
    X, Y = sympy.symbols("X Y")
    P = modulus_difference(poly(2, 1), poly(1, 2))
    ref = sympy.Poly(sympy.expand((X + 2) * (Y + 2) - (2 * X + 1) * (2 * Y + 1)), X, Y)
    assert {k: int(v.coords[0]) for k, v in P.items()} == {k: int(v) for k, v in ref.as_dict().items()}
    assert sympy.expand(ref.as_expr() + 3 * (X * Y - 1)) == 0


def test_torsion_factor_examples():
    v = torsion_factor_check(poly(2, 1), poly(1, 2), 4)
    assert v.found
    assert [(w.r, w.s, w.u, w.shape) for w in v.witnesses] == [(1, 1, K1(1), XY_MINUS_U)]
    assert all(verify_witness(v.polynomial, w) for w in v.witnesses)
    assert not torsion_factor_check(poly(3, 1), poly(1, 1), 4).found
    v = torsion_factor_check(poly(0, 1), poly(1), 4)
    assert v.found and (v.witnesses[0].r, v.witnesses[0].s, v.witnesses[0].u) == (1, 1, K1(1))


def test_torsion_factor_zero_difference():
    with pytest.raises(ValueError):
        torsion_factor_check(poly(1, 1), poly(1, 1), 2)


def test_universe_too_small_is_reported():
    # X^2 + 1 vs X^2 - 1 gives 2(X^2 + Y^2) = 2(X - iY)(X + iY)
    with pytest.raises(UniverseTooSmall):
        torsion_factor_check(poly(1, 0, 1), poly(-1, 0, 1), 2)
    K4 = make_field(4)
    v = torsion_factor_check(poly(1, 0, 1, K=K4), poly(-1, 0, 1, K=K4), 2)
    assert {w.u for w in v.witnesses} == {K4.zeta(), -K4.zeta()}
    assert all(verify_witness(v.polynomial, w) for w in v.witnesses)
    # over Q, X^2 vs 1 gives X^2 Y^2 - 1 = (XY - 1)(XY + 1); both u = +-1 live in Q
    v = torsion_factor_check(poly(0, 0, 1), poly(1), 2)
    assert {w.u for w in v.witnesses if (w.r, w.s) == (1, 1)} == {K1(1), K1(-1)}
    # X^3 vs 1: X^3Y^3 - 1 has the factor XY - zeta_3, outside Q
    with pytest.raises(UniverseTooSmall):
        torsion_factor_check(poly(0, 0, 0, 1), poly(1), 1)


def test_divide_by_binomial_rejects_non_factor():
    P = modulus_difference(poly(3, 1), poly(1, 1))
    _, rem = divide_by_binomial(P, 1, 1, K1(1), XY_MINUS_U)
    assert rem


def test_exclusion_budget():
    assert exclusion_budget(1, 3) == 216
    assert exclusion_budget(2, 3) == 864
    # d^2 (2k^3/3 + 22k^2) at d = 1, k = 2 is 16/3 + 88
    assert exclusion_budget(1, 2) == Fraction(280, 3)
    b = budget_breakdown(1, 3)
    assert b["total"] == 216 and b["per_equation"] == 44
    with pytest.raises(ValueError):
        exclusion_budget(0, 3)


def test_level_set_tangent_circles():
    pair = RationalFunctionPair(g1=(poly(-2, 1), poly(1)), g2=(poly(0, 1), poly(1)))
    res = level_set_count(pair)
    assert res.bound == 4 and res.count == 1 and res.within_bound
    assert not res.exceptional_like
    assert abs(complex(res.points[0]) - 1) < 1e-3


def test_level_set_two_point_intersection():
    # |z - 1| = 1 = |z| meets at exp(+-i pi/3)
    pair = RationalFunctionPair(g1=(poly(-1, 1), poly(1)), g2=(poly(0, 1), poly(1)))
    res = level_set_count(pair)
    assert res.count == 2
    pts = sorted((complex(p) for p in res.points), key=lambda z: z.imag)
    assert abs(pts[0] - complex(0.5, -(3**0.5) / 2)) < 1e-6
    assert abs(pts[1] - complex(0.5, (3**0.5) / 2)) < 1e-6


def test_level_set_identical_functions_flagged():
    pair = RationalFunctionPair(g1=(poly(0, 1), poly(1)), g2=(poly(0, 1), poly(1)))
    res = level_set_count(pair)
    assert res.exceptional_like and not res.within_bound


def test_level_set_bound_field():
    z3 = poly(0, 0, 0, 1)
    pair = RationalFunctionPair(g1=(z3, poly(1)), g2=(poly(2, 0, 0, 1), poly(1)))
    assert level_set_count(pair, grid=16, max_iter=5).bound == 36
