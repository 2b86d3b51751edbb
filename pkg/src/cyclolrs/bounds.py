"""Explicit lower bounds for linear forms in logarithms and the constant pipelines
built on them: prime growth, S-part decay and the S-unit bound.

Bound arithmetic uses arb balls and always keeps the endpoint that weakens the
bound, so a reported constant is never smaller than the true one.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import mpmath
import numpy as np
from flint import arb, ctx, fmpq, fmpz

from ._parallel import pmap
from .cyclo import CycloElem, embed, heights, is_root_of_unity
from .errors import BadInput, DegenerateGap, MissingConstant
from .ideals import PrimeIdeal, factor_principal, greatest_prime_and_radical, s_part
from .lrs import SpecializedLRS, _require_dominant, term_closed_form

log = logging.getLogger(__name__)

WORK_PREC = 256


# -- conversions -------------------------------------------------------------------

def _to_arb(x) -> arb:
    if isinstance(x, arb):
        return x
    if isinstance(x, (int, fmpz)):
        return arb(x)
    if isinstance(x, Fraction):
        return arb(fmpq(x.numerator, x.denominator))
    if isinstance(x, float):
        return arb(x)
    if hasattr(x, "_mpf_") and not isinstance(x, mpmath.mpf):
        with mpmath.workprec(WORK_PREC):  # mpmath constants such as mpmath.e
            x = mpmath.mpf(x)
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        man = fmpz(int(man))
        return arb(man) * arb(2) ** exp if exp >= 0 else arb(man) / arb(2) ** (-exp)
    raise TypeError(f"cannot convert {type(x).__name__} to a ball")


def _exact_mpf(x: arb) -> mpmath.mpf:
    # x is an exact dyadic (an endpoint); rebuild it without rounding
    man, exp = x.man_exp()
    with mpmath.workprec(max(64, int(man).bit_length() + 8)):
        return +mpmath.mpf((int(man), int(exp)))


def _endpoint_prec(x: arb) -> int:
    # lower()/upper() round to the context precision, so keep every bit of the midpoint
    return max(WORK_PREC, x.mid().bits() + 64)


def lower_mpf(x: arb) -> mpmath.mpf:
    with ctx.workprec(_endpoint_prec(x)):
        return _exact_mpf(x.lower())


def upper_mpf(x: arb) -> mpmath.mpf:
    with ctx.workprec(_endpoint_prec(x)):
        return _exact_mpf(x.upper())


# -- linear forms in logarithms ---------------------------------------------------

@dataclass(frozen=True)
class MatveevInput:
    m: int
    D: int
    logA: tuple
    B: object
    kappa: int = 2

    def validate(self):
        if self.m < 2:
            raise BadInput("need at least two terms (m >= 2)")
        if len(self.logA) != self.m:
            raise BadInput(f"logA has {len(self.logA)} entries, m = {self.m}")
        if self.D < 1:
            raise BadInput("field degree D must be >= 1")
        if self.kappa not in (1, 2):
            raise BadInput("kappa must be 1 or 2")
        with ctx.workprec(WORK_PREC):
            if not _to_arb(self.B) >= 1:
                raise BadInput("B must be >= 1")
            floor = arb(fmpq(16, 100)) / self.D
            for a in self.logA:
                if not _to_arb(a) > 0:
                    raise BadInput("every logA_i must be positive")
                if _to_arb(a) < floor:
                    raise BadInput("logA_i below 0.16/D")


def matveev_explicit_ball(inp: MatveevInput) -> arb:
    inp.validate()
    m, D = inp.m, inp.D
    with ctx.workprec(WORK_PREC):
        e = arb.const_e()
        out = arb(-4) * arb(30) ** (m + 4) * arb(m + 1) ** arb(fmpq(11, 2)) * arb(D) ** (m + 2)
        out *= (e * D).log() * (e * m * _to_arb(inp.B)).log()
        for a in inp.logA:
            out *= _to_arb(a)
        return out


def matveev_explicit(inp: MatveevInput) -> mpmath.mpf:
    """-4 30^(m+4) (m+1)^5.5 D^(m+2) log(eD) log(emB) prod logA_i, rounded downward."""
    return lower_mpf(matveev_explicit_ball(inp))


def matveev_linear_form(inp: MatveevInput, C_override=None) -> mpmath.mpf:
    """-C D prod(A_i) log(eD) log(eB) with A_i = D logA_i; C must come from configuration."""
    if C_override is None:
        raise MissingConstant("the constant C(m, kappa) must be configured")
    inp.validate()
    with ctx.workprec(WORK_PREC):
        C = _to_arb(C_override)
        if not C > 0:
            raise BadInput("C_override must be positive")
        e = arb.const_e()
        out = -C * inp.D * (e * inp.D).log() * (e * _to_arb(inp.B)).log()
        for a in inp.logA:
            out *= inp.D * _to_arb(a)
        return lower_mpf(out)


def resolve_n_bound(x) -> mpmath.mpf:
    """max(e, 2x log x): if a >= e and a / log a < x then a is below this value."""
    with ctx.workprec(WORK_PREC):
        xb = _to_arb(x)
        if not xb > 0:
            raise BadInput("x must be positive")
        val = (2 * xb * xb.log()).max(arb.const_e())
        return upper_mpf(val)


# -- per-element helpers --------------------------------------------------------------

def log_height_bound(eta: CycloElem, D: int, precision: int = WORK_PREC) -> arb:
    """Upper end of max(h(eta), |log eta| / D, 0.16 / D): an admissible log A."""
    with ctx.workprec(precision):
        h = heights(eta, precision).h
        lg = abs(embed(eta, 1, precision).log())
        val = h.max(lg / D).max(arb(fmpq(16, 100)) / D)
        return val.upper()


def _log_abs(x: CycloElem, precision: int) -> arb:
    with ctx.workprec(precision):
        return abs(embed(x, 1, precision)).log()


def _flt(x) -> float:
    if isinstance(x, arb):
        return float(upper_mpf(x))
    return float(x)


# -- reports ------------------------------------------------------------------------

@dataclass
class Constant:
    value: object
    formula: str

    def as_json(self):
        v = self.value
        if isinstance(v, arb):
            v = upper_mpf(v)
        if isinstance(v, mpmath.mpf):
            v = mpmath.nstr(v, 17)
        elif isinstance(v, Fraction):
            v = f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
        elif v is None:
            v = None
        else:
            v = repr(v) if isinstance(v, float) else str(v)
        return {"value": v, "formula": self.formula}


BOUND_COLUMNS = ("n", "abs_norm", "P", "radical_norm", "s_part_norm", "c1", "c2", "e_n", "case")


@dataclass
class BoundRow:
    n: int
    abs_norm: int
    P: int
    radical_norm: int
    s_part_norm: Optional[int] = None
    c1: Optional[float] = None
    c2: Optional[float] = None
    e_n: Optional[float] = None
    case: str = ""

    def cells(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return [fmt(getattr(self, c)) for c in BOUND_COLUMNS]


@dataclass
class BoundReport:
    pipeline: str
    constants: dict = field(default_factory=dict)
    admissible: list = field(default_factory=list)
    verdict: bool = False
    thresholds: dict = field(default_factory=dict)

    def constants_json(self) -> dict:
        return {
            "pipeline": self.pipeline,
            "verdict": self.verdict,
            "constants": {k: c.as_json() for k, c in self.constants.items()},
            "thresholds": {k: c.as_json() for k, c in self.thresholds.items()},
        }


def _factor_task(args):
    beta, budget_ms = args
    return factor_principal(beta, budget_ms=budget_ms)


def factor_terms(Lz: SpecializedLRS, ns: Sequence[int], workers: int = 1, budget_ms=None) -> dict:
    terms = [(term_closed_form(Lz, n), budget_ms) for n in ns]
    return dict(zip(ns, pmap(_factor_task, terms, workers, chunksize=1)))


def admissible_c(P: int, n: int) -> float:
    """log P log n / n, the constant that makes P = exp(c n / log n) an identity."""
    if P <= 1 or n <= 1:
        return 0.0
    return math.log(P) * math.log(n) / n


def _dominance_panel(Lz: SpecializedLRS) -> dict:
    dom = Lz.dominance
    return {
        "delta": Constant(dom.delta, "max over j>=2 of log|alpha_j| / log|alpha_1|, clamped at 0"),
        "rho": Constant(dom.rho, "max over j>=2 of |alpha_j| / |alpha_1|"),
        "C7": Constant(dom.C7, "sum over j>=2 of |f_j(zeta)|"),
        "C8": Constant(dom.C8, "C7 / |f_1(zeta)|"),
        "abs_alpha1": Constant(dom.abs_alpha1, "|alpha_1(zeta)|"),
        "abs_f1": Constant(dom.abs_f1, "|f_1(zeta)|"),
    }


def _chain_constants(Lz: SpecializedLRS, facts: dict, n0: int) -> dict:
    """Materialized C9..C13 over the sampled range (prime-growth chain)."""
    dom = Lz.dominance
    D = Lz.field.degree
    prec = max(Lz.precision, 128)
    out = {}
    with ctx.workprec(prec):
        C9 = arb(0)
        C10 = arb(0)
        for n, fact in facts.items():
            if fact.norm_abs <= 1:
                continue
            u = fact.element
            logN = arb(fact.norm_abs).log()
            lh = _house_log(u, prec)
            C9 = C9.max(lh / logN)
            C10 = C10.max(log_height_bound(u, D, prec) / logN)
        logA2 = log_height_bound(Lz.fvals[0], D, prec)
        logA3 = log_height_bound(Lz.avals[0], D, prec)
        nb = max(n0, 3)
        # product-form bound with m = 3, B = n, written as C11 log A1 log n for n >= nb
        base = matveev_explicit_ball(MatveevInput(3, D, (arb(1), logA2, logA3), nb))
        C11 = (-base / arb(nb).log()).upper()
        C12 = 1 - dom.delta
        C13 = C11 / (C12 * dom.abs_alpha1.log())
    out["C9"] = Constant(C9, "max over sampled n of log house(U_n) / log|N(U_n)| (direct house, no unit-group estimate)")
    out["C10"] = Constant(C10, "max over sampled n of log A1 / log|N(U_n)|, log A1 = max(h, |log U_n|/D, 0.16/D)")
    out["logA2"] = Constant(logA2, "max(h(f_1), |log f_1|/D, 0.16/D)")
    out["logA3"] = Constant(logA3, "max(h(alpha_1), |log alpha_1|/D, 0.16/D)")
    out["C11"] = Constant(C11, f"4 30^7 4^5.5 D^5 log(eD) log(3eB) logA2 logA3 / log n, B = n, at n = {nb}")
    out["C12"] = Constant(C12, "1 - delta (log C8 absorbed for large n)")
    out["C13"] = Constant(C13, "C11 / (C12 log|alpha_1|)")
    return out


def _house_log(u: CycloElem, prec: int) -> arb:
    from .cyclo import house

    with ctx.workprec(prec):
        return house(u, prec).max(arb(1)).log()


def theorem1_report(Lz: SpecializedLRS, n_range: Sequence[int], workers: int = 1, budget_ms=None,
                    facts: Optional[dict] = None) -> BoundReport:
    """Largest prime-ideal norm and radical norm of [U_n] with empirical admissible constants."""
    _require_dominant(Lz)
    ns = list(n_range)
    if facts is None:
        facts = factor_terms(Lz, ns, workers, budget_ms)
    rows = []
    for n in ns:
        fact = facts[n]
        P, rad = greatest_prime_and_radical(fact)
        rows.append(BoundRow(n, fact.norm_abs, P, rad, None, admissible_c(P, n), admissible_c(rad, n)))
    report = BoundReport("T1", _dominance_panel(Lz), rows)
    report.constants.update(_chain_constants(Lz, facts, ns[0] if ns else 3))
    scored = [r for r in rows if r.n >= 2]
    min_c1 = min((r.c1 for r in scored), default=0.0)
    min_c2 = min((r.c2 for r in scored), default=0.0)
    report.verdict = bool(scored) and min_c1 > 0 and min_c2 > 0
    report.thresholds["min_c1"] = Constant(min_c1, "min over n >= 2 of log P log n / n")
    report.thresholds["min_c2"] = Constant(min_c2, "min over n >= 2 of log N(Q) log n / n")
    return report


def theorem2_report(Lz: SpecializedLRS, S: Sequence[PrimeIdeal], n_range: Sequence[int], workers: int = 1,
                    budget_ms=None, facts: Optional[dict] = None) -> BoundReport:
    """S-part exponents e_n = log N([U_n]_S) / log|N(U_n)| and the admissible C3, C4."""
    _require_dominant(Lz)
    ns = list(n_range)
    if facts is None:
        facts = factor_terms(Lz, ns, workers, budget_ms)
    rows = []
    for n in ns:
        fact = facts[n]
        P, rad = greatest_prime_and_radical(fact)
        sp = s_part(fact, S)
        if sp.s_part_norm * sp.cofactor_norm != fact.norm_abs:
            raise ArithmeticError("S-part and cofactor do not recompose the norm")
        e_n = math.log(sp.s_part_norm) / math.log(fact.norm_abs) if fact.norm_abs > 1 else None
        case = "cofactor" if sp.cofactor_norm > sp.s_part_norm else "S"
        rows.append(BoundRow(n, fact.norm_abs, P, rad, sp.s_part_norm, admissible_c(P, n), admissible_c(rad, n), e_n, case))
    report = BoundReport("T2", _dominance_panel(Lz), rows)
    report.constants.update(_chain_constants(Lz, facts, ns[0] if ns else 3))

    exps = [(r.n, r.e_n) for r in rows if r.e_n is not None]
    max_e = max((e for _, e in exps), default=None)
    # C4: least n0 from which every sampled e_n stays below 1
    C4 = None
    running = -math.inf
    for n, e in reversed(exps):
        running = max(running, e)
        if running < 1:
            C4 = n
        else:
            break
    C3 = None if max_e is None else 1 - max_e
    report.verdict = C3 is not None and C3 > 0
    report.thresholds["max_e_n"] = Constant(max_e, "max over sampled n of e_n")
    report.thresholds["C3"] = Constant(C3, "1 - max e_n")
    report.thresholds["C4"] = Constant(C4, "least sampled n0 with max over n >= n0 of e_n < 1")

    with ctx.workprec(WORK_PREC):
        C13 = report.constants["C13"].value
        C15 = _to_arb(resolve_n_bound(C13))
        C16 = 1 / (2 * C15)
        cpp = min((arb(r.n) / arb(r.abs_norm).log() for r in rows if r.abs_norm > 1), default=arb(0), key=_flt)
        C17 = C16 * cpp
        # eta = (f_1, alpha_1, U_n), b = (-1, -n, 1), log A3 = log|N(U_n)|
        lf, la = report.constants["logA2"].value, report.constants["logA3"].value
        C14 = arb(0)
        for r in rows:
            if r.abs_norm > 1 and r.n > 0:
                lA3 = arb(r.abs_norm).log()
                B = arb(1).max(lf / lA3).max(r.n * la / lA3)
                C14 = C14.max(B * lA3 / r.n)
    report.constants["C14"] = Constant(C14, "max over sampled n of B log A3 / n, log A3 = log|N(U_n)|")
    report.constants["C15"] = Constant(C15, "resolve_n_bound(C13), from n/log A3 < C13 log(n / log A3)")
    report.constants["C16"] = Constant(C16, "1 / (2 C15)")
    report.constants["C17"] = Constant(C17, "C16 min over sampled n of n / log|N(U_n)|")
    return report


# -- S-unit bound -------------------------------------------------------------------

@dataclass
class Theorem3Bound:
    C5: mpmath.mpf
    n_bound: mpmath.mpf
    w_bound: mpmath.mpf
    constants: dict


def theorem3_bound(Lz: SpecializedLRS, S: Sequence[int], r: int, eps, C_override=None,
                   engine: str = "linear_form") -> Theorem3Bound:
    """Explicit C5 bounding max(n, |w_1|, ..., |w_r|) over solutions of U_n = w_1 + ... + w_r.

    With Phi = f_1 alpha_1^n / w_r and theta = max(|alpha_1|^(-eps/(1+eps)), rho):
      |Phi - 1| < C20 theta^n,  C20 = (r-1) max(1, 2r/|f_1|) + 2r C8,
    valid once |h_n| <= |f_1 alpha_1^n| / 2.  Either |Phi - 1| > 1/2 (n small), or the
    linear form Lambda = log Phi satisfies |Lambda| < 2 C20 theta^n against a lower bound
    of shape -K log(e C21 n); the resulting n < X + Y log n is resolved as
    n <= max(2X, resolve_n_bound(2Y)).  ``engine="explicit"`` applies the fully explicit
    product-form bound to |Phi - 1| directly and needs no configured constant.
    """
    _require_dominant(Lz)
    if engine not in ("linear_form", "explicit"):
        raise BadInput(f"unknown engine {engine!r}")
    if engine == "linear_form" and C_override is None:
        raise MissingConstant("the linear-form constant C(m, kappa) must be configured")
    if r < 1:
        raise BadInput("r must be >= 1")
    S = sorted(set(int(p) for p in S))
    if not S:
        raise BadInput("S must be non-empty")
    dom = Lz.dominance
    D = Lz.field.degree
    s = len(S)
    with ctx.workprec(WORK_PREC):
        eps_b = _to_arb(eps if not isinstance(eps, str) else Fraction(eps))
        if not eps_b > 0:
            raise BadInput("eps must be positive")
        a1, f1 = dom.abs_alpha1, dom.abs_f1
        if not a1 > 1:
            raise DegenerateGap("|alpha_1(zeta)| must exceed 1")
        expo = eps_b / (1 + eps_b)
        theta = (a1 ** (-expo)).max(dom.rho)
        log_inv_theta = -theta.log()
        if not log_inv_theta > 0:
            raise DegenerateGap("envelope does not decay")
        C19 = arb(r - 1) * arb(1).max(2 * r / f1)
        c10 = 2 * r * dom.C8
        C20 = (C19 + c10).upper()
        # |h_n| <= C8 rho^n |f_1 alpha_1^n| <= half of the leading term from here on
        if dom.C8 > 0 and dom.rho > 0:
            n_half = (((2 * dom.C8).log()) / (-dom.rho.log())).max(arb(0)).upper()
        else:
            n_half = arb(0)
        n_case1 = ((2 * C20).log() / log_inv_theta).max(arb(0)).upper()

        # B <= C21 n for n >= 1: exponents of p_j in w_r, then 1, n and |b_0| <= s + 2
        C7 = dom.C7
        lead = (2 * (f1 + C7)).log().max(arb(0)) + a1.log()
        C21 = (lead / arb(2).log()).max(arb(s + 2)).max(arb(1))
        if r > 1:
            C21 = C21.max((1 + eps_b) / eps_b * arb(2 * (r - 1)).log() / arb(2).log())
        C21 = C21.upper()

        logA_p = [arb(p).log() for p in S]
        logA_f = log_height_bound(Lz.fvals[0], D)
        logA_a = log_height_bound(Lz.avals[0], D)
        logA_m1 = arb.pi() / D  # h(-1) = 0, |log(-1)| = pi
        logAs = logA_p + [logA_f, logA_a, logA_m1.max(arb(fmpq(16, 100)) / D)]
        m = s + 3
        e = arb.const_e()
        if engine == "linear_form":
            C = _to_arb(C_override)
            K = C * D * (e * D).log()
            for a in logAs:
                K *= D * a  # A_j = D log A_j, so A_j = D log p_j for the primes
            # log|Lambda| >= -K (1 + log C21 + log n);  log|Lambda| < log(2 C20) - n log(1/theta)
            X = ((2 * C20).log() + K * (1 + C21.log())) / log_inv_theta
            Y = K / log_inv_theta
        else:
            K = arb(4) * arb(30) ** (m + 4) * arb(m + 1) ** arb(fmpq(11, 2)) * arb(D) ** (m + 2) * (e * D).log()
            for a in logAs:
                K *= a
            # B' <= C21 n max(logA) / logA_m; log(e m B') = log(e m C21 ratio) + log n
            ratio = max(logAs, key=_flt) / logAs[-1]
            X = (C20.log() + K * (e * m * C21 * ratio).log()) / log_inv_theta
            Y = K / log_inv_theta
        n_case2 = (2 * X).max(_to_arb(resolve_n_bound(2 * Y))).upper()
        n_bound = n_half.max(n_case1).max(n_case2).upper()
        # |w_r| <= 2|U_n| once (r-1)|w_r|^(1/(1+eps)) <= |w_r|/2
        log_w = (arb(2).log() + (f1 + C7).log() + n_bound * a1.log())
        if r > 1:
            log_w = log_w.max((1 + eps_b) / eps_b * arb(2 * (r - 1)).log())
        log_w = log_w.upper()
    with mpmath.workprec(WORK_PREC):
        w_bound = mpmath.exp(upper_mpf(log_w))
        n_mp = upper_mpf(n_bound)
        C5 = max(n_mp, w_bound)
    consts = {
        "theta": Constant(theta, "max(|alpha_1|^(-eps/(1+eps)), rho)"),
        "C19": Constant(C19, "(r-1) max(1, 2r/|f_1|)"),
        "c10": Constant(c10, "2r C8"),
        "C20": Constant(C20, "C19 + 2r C8"),
        "C21": Constant(C21, "B <= C21 n: max(1, s+2, log(2(|f_1|+C7)|alpha_1|)/log 2, (1+eps)/eps log(2(r-1))/log 2)"),
        "n_half": Constant(n_half, "log(2 C8) / log(1/rho)"),
        "n_case1": Constant(n_case1, "log(2 C20) / log(1/theta)"),
        "n_case2": Constant(n_case2, f"max(2X, resolve_n_bound(2Y)), engine={engine}"),
        "n_bound": Constant(n_mp, "max(n_half, n_case1, n_case2)"),
        "log_w_bound": Constant(log_w, "log 2 + log(|f_1|+C7) + n_bound log|alpha_1|"),
        "C5": Constant(C5, "max(n_bound, exp(log_w_bound))"),
    }
    return Theorem3Bound(C5, n_mp, w_bound, consts)


# -- multiplicative independence -------------------------------------------------------

@dataclass
class IndependenceCheck:
    independent: bool
    relation: Optional[tuple] = None


def multiplicative_relation(elems: Sequence[CycloElem], exponent_bound: int = 20) -> IndependenceCheck:
    """Search e in [-B, B]^k, e != 0, with prod elems^e a root of unity.

    A float prefilter keeps exponent vectors whose log-modulus combination vanishes at
    every embedding (Kronecker); survivors are confirmed exactly.
    """
    if any(x.is_zero() for x in elems):
        raise ValueError("zero has no multiplicative relations")
    K = elems[0].field
    for i, x in enumerate(elems):
        if is_root_of_unity(x):
            rel = tuple(1 if j == i else 0 for j in range(len(elems)))
            return IndependenceCheck(False, rel)
    logs = np.array([[float(upper_mpf(abs(embed(x, a, 128)).log()))
                      for a in K.galois_exponents] for x in elems])
    rng = np.arange(-exponent_bound, exponent_bound + 1)
    grid = np.array(list(product(rng, repeat=len(elems))), dtype=np.int64)
    # one representative per +-pair: first nonzero coordinate positive
    nz = grid != 0
    first = np.argmax(nz, axis=1)
    keep = nz.any(axis=1) & (grid[np.arange(len(grid)), first] > 0)
    grid = grid[keep]
    combo = grid @ logs
    scale = 1e-8 * (1 + np.abs(grid) @ np.abs(logs))
    cand = grid[np.all(np.abs(combo) <= scale, axis=1)]
    for vec in cand:
        prod_ = K.one
        for x, ex in zip(elems, vec):
            prod_ = prod_ * x ** int(ex)
        if is_root_of_unity(prod_):
            return IndependenceCheck(False, tuple(int(v) for v in vec))
    return IndependenceCheck(True, None)
