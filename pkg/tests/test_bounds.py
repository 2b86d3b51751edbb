import math
from fractions import Fraction

import mpmath
import pytest
from flint import arb

from cyclolrs.bounds import (
    MatveevInput,
    admissible_c,
    matveev_explicit,
    matveev_linear_form,
    multiplicative_relation,
    resolve_n_bound,
    theorem1_report,
    theorem2_report,
    theorem3_bound,
)
from cyclolrs.cyclo import make_field
from cyclolrs.errors import BadInput, DegenerateGap, MissingConstant
from cyclolrs.ideals import split_prime
from cyclolrs.lrs import specialize

from conftest import tied_family


def matveev_oracle(m, D, B, logA, dps=60):
    with mpmath.workdps(dps):
        e = mpmath.e
        out = -4 * mpmath.mpf(30) ** (m + 4) * mpmath.mpf(m + 1) ** mpmath.mpf(5.5) * mpmath.mpf(D) ** (m + 2)
        out *= mpmath.log(e * D) * mpmath.log(e * m * B)
        return out * mpmath.fprod(mpmath.mpf(a) for a in logA)


def test_matveev_explicit_against_oracle():
    got = matveev_explicit(MatveevInput(3, 2, (1, 1, 1), 100))
    ref = matveev_oracle(3, 2, 100, (1, 1, 1))
    with mpmath.workdps(60):
        assert abs((got - ref) / ref) < mpmath.mpf(10) ** -30
    assert abs(float(got) / -6.508e16 - 1) < 1e-3
    small = matveev_explicit(MatveevInput(2, 1, (1, 1), 1))
    assert math.isfinite(float(small)) and small < 0


def test_matveev_scaling_and_rounding():
    a = matveev_explicit(MatveevInput(3, 2, (1, 1, 1), 100))
    b = matveev_explicit(MatveevInput(3, 2, (2, 1, 1), 100))
    assert abs(b / a - 2) < mpmath.mpf(10) ** -60
    ref = matveev_oracle(3, 2, 100, (1, 1, 1), dps=100)
    with mpmath.workdps(100):
        assert a <= ref  # lower endpoint


def test_matveev_bad_input():
    for inp in (
        MatveevInput(1, 2, (1,), 10),
        MatveevInput(3, 2, (1, 1), 10),
        MatveevInput(3, 0, (1, 1, 1), 10),
        MatveevInput(3, 2, (1, 1, 1), 0),
        MatveevInput(3, 2, (1, 1, 0.01), 10),
        MatveevInput(3, 2, (1, 1, 1), 10, kappa=3),
    ):
        with pytest.raises(BadInput):
            matveev_explicit(inp)


def test_matveev_linear_form():
    with mpmath.workdps(80):
        _linear_form_checks()


def _linear_form_checks():
    B = mpmath.e
    got = matveev_linear_form(MatveevInput(2, 1, (1, 1), B), 1)
    assert abs(got + mpmath.log(mpmath.e * B)) < 1e-60
    d1 = matveev_linear_form(MatveevInput(2, 1, (1, 1), 10), 1)
    d2 = matveev_linear_form(MatveevInput(2, 2, (1, 1), 10), 1)
    # D^(m+1) log(eD): 8 log(2e) against log e
    assert abs(d2 / d1 - 8 * mpmath.log(2 * mpmath.e)) < 1e-50
    with pytest.raises(MissingConstant):
        matveev_linear_form(MatveevInput(2, 1, (1, 1), 10))


def test_resolve_n_bound():
    with mpmath.workdps(80):
        assert abs(resolve_n_bound(10) - 20 * mpmath.log(10)) < 1e-60
        assert abs(resolve_n_bound(1) - mpmath.e) < 1e-60
        assert abs(resolve_n_bound(mpmath.e) - 2 * mpmath.e) < 1e-60
    with pytest.raises(BadInput):
        resolve_n_bound(0)


def test_admissible_c():
    assert abs(admissible_c(3, 3) - 0.402) < 1e-3
    assert abs(admissible_c(11, 5) - 0.772) < 1e-3
    assert admissible_c(1, 10) == 0.0


def test_theorem1_examples(L1_at_1, L1_at_i):
    rep = theorem1_report(L1_at_1, range(3, 12))
    rows = {r.n: r for r in rep.admissible}
    assert rows[5].P == 11 and rows[5].abs_norm == 1056
    assert abs(rows[3].c1 - 0.402) < 1e-3 and abs(rows[5].c1 - 0.772) < 1e-3
    assert rep.verdict
    g = theorem1_report(L1_at_i, [2])
    (row,) = g.admissible
    assert (row.P, row.radical_norm) == (2, 2) and abs(row.c2 - 0.240) < 1e-3


def test_theorem2_examples(L1_at_1):
    S = split_prime(L1_at_1.field, 2)
    rep = theorem2_report(L1_at_1, S, range(3, 12))
    rows = {r.n: r for r in rep.admissible}
    assert rows[10].s_part_norm == 2**10 and abs(rows[10].e_n - 0.4999) < 1e-4
    assert abs(rows[4].e_n - 0.4947) < 1e-3
    assert all(r.case == "cofactor" for r in rep.admissible)
    S5 = split_prime(L1_at_1.field, 5)
    rep5 = theorem2_report(L1_at_1, S5, [3, 4, 5])
    assert all(r.e_n == 0 for r in rep5.admissible)
    assert rep5.thresholds["C3"].value == 1


def test_theorem3_bound_monotone(L1_at_1):
    bounds = [theorem3_bound(L1_at_1, [2, 3], 2, Fraction(e), C_override=1) for e in ("1/2", "1", "2")]
    assert all(b.C5 > 0 for b in bounds)
    ns = [b.n_bound for b in bounds]
    assert ns[0] >= ns[1] >= ns[2]
    r2 = theorem3_bound(L1_at_1, [2, 3], 2, Fraction(1, 2), C_override=1)
    r3 = theorem3_bound(L1_at_1, [2, 3], 3, Fraction(1, 2), C_override=1)
    assert r3.C5 >= r2.C5
    explicit = theorem3_bound(L1_at_1, [2, 3], 2, Fraction(1, 2), engine="explicit")
    assert mpmath.isfinite(explicit.C5) and explicit.C5 > bounds[0].C5


def test_theorem3_chain_reevaluated(L1_at_1):
    # independent float re-evaluation of the case split at zeta = 1: |f1| = 1, C8 = 1, |alpha_1| = 4, rho = 1/2
    r, eps = 2, 0.5
    b = theorem3_bound(L1_at_1, [2, 3], r, Fraction(1, 2), C_override=1)
    theta = max(4 ** (-eps / (1 + eps)), 0.5)
    C20 = (r - 1) * max(1, 2 * r / 1) + 2 * r * 1
    assert abs(float(b.constants["C20"].value.mid()) - C20) < 1e-12
    assert abs(float(b.constants["theta"].value.mid()) - theta) < 1e-12
    n1 = math.log(2 * C20) / math.log(1 / theta)
    assert abs(float(b.constants["n_case1"].value.mid()) - n1) < 1e-9
    assert float(b.n_bound) >= n1


def test_theorem3_errors(L1_at_1):
    with pytest.raises(MissingConstant):
        theorem3_bound(L1_at_1, [2], 2, 1)
    with pytest.raises(DegenerateGap):
        theorem3_bound(specialize(tied_family(), 4, 1), [2], 2, 1, C_override=1)


def test_multiplicative_relation():
    K = make_field(1)
    assert multiplicative_relation([K(2), K(3), K(6)]).relation in ((1, 1, -1), (-1, -1, 1))
    assert multiplicative_relation([K(2), K(3), K(5)]).independent
    assert not multiplicative_relation([K(1), K(4)]).independent
    K4 = make_field(4)
    z = K4.zeta()
    chk = multiplicative_relation([1 + z, K4(2)])
    assert not chk.independent  # (1+i)^2 = 2i
    assert multiplicative_relation([2 + z, 2 - z]).independent


def test_theorem3_bound_covers_solver_solutions(L1_at_1):
    from cyclolrs.sunit import SUnitConfig, solve

    bound = theorem3_bound(L1_at_1, [2, 3], 2, Fraction(1, 2), engine="explicit")
    sols = solve(L1_at_1, SUnitConfig((2, 3), 2, Fraction(1, 2), 14, 10**12, check_independence=False))
    assert len(sols) > 0
    assert all(s.n <= bound.C5 and max(abs(w) for w in s.w) <= bound.C5 for s in sols)
