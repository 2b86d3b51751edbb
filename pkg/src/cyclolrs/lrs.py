"""Parametric sequences U_n(X) = sum_i f_i(X) alpha_i(X)^n specialized at roots of unity."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import NamedTuple, Optional, Sequence

from flint import arb, ctx

from .cyclo import (
    CycloElem,
    CycloField,
    Ordering,
    abs_compare,
    abs_squared,
    embed,
    is_root_of_unity,
    lift,
    make_field,
    real_sign,
)
from .errors import DegenerateGap, DegenerateTerm, ExceptionalParameter, NotRootOfUnity, StructureViolation, ValidationError

Poly = tuple  # tuple[CycloElem, ...], lowest degree first


def poly_degree(p: Poly) -> int:
    deg = -1
    for i, c in enumerate(p):
        if not c.is_zero():
            deg = i
    return deg


def poly_eval(p: Poly, x: CycloElem) -> CycloElem:
    acc = x.field.zero
    for c in reversed(p):
        acc = acc * x + lift(c, x.field)
    return acc


def poly_lift(p: Poly, K: CycloField) -> Poly:
    return tuple(lift(c, K) for c in p)


def _normalize(p: Poly) -> Poly:
    deg = poly_degree(p)
    return tuple(p[: deg + 1])


@dataclass(frozen=True)
class ParamLRS:
    """Coefficient polynomials f_i and characteristic-root polynomials alpha_i over Q(zeta_M)."""

    field: CycloField
    f: tuple
    alpha: tuple

    def __post_init__(self):
        f = tuple(_normalize(tuple(p)) for p in self.f)
        alpha = tuple(_normalize(tuple(p)) for p in self.alpha)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "alpha", alpha)
        if len(f) != len(alpha):
            raise ValidationError("f and alpha must have the same length")
        if len(f) < 2:
            raise ValidationError("need k >= 2 summands")
        for name, polys in (("f", f), ("alpha", alpha)):
            for i, p in enumerate(polys):
                if not p:
                    raise ValidationError(f"{name}[{i}]: nonzero polynomials required")
                if any(c.field != self.field for c in p):
                    raise ValidationError(f"{name}[{i}]: coefficients must lie in Q(zeta_{self.field.m})")
        if len(set(alpha)) != len(alpha):
            raise ValidationError("alpha polynomials must be pairwise distinct")

    @classmethod
    def from_coefficients(cls, f: Sequence[Sequence], alpha: Sequence[Sequence], M: int = 1) -> ParamLRS:
        """Build from nested lists: a polynomial is a list of coefficients, each a
        rational or a coordinate list in Q(zeta_M)."""
        K = make_field(M)

        def coef(c):
            if isinstance(c, CycloElem):
                return lift(c, K)
            if isinstance(c, (list, tuple)):
                return K.from_coords(c)
            return K(Fraction(c))

        return cls(K, tuple(tuple(coef(c) for c in p) for p in f), tuple(tuple(coef(c) for c in p) for p in alpha))

    @property
    def k(self) -> int:
        return len(self.f)

    @property
    def d(self) -> int:
        return max(poly_degree(p) for p in self.f + self.alpha)


def point(L: ParamLRS, m: int, j: int) -> tuple[CycloField, CycloElem, int, int]:
    """Working field and the root of unity zeta_m^j, with the exponent reduced by gcd(j, m)."""
    if m < 1:
        raise ValidationError("root-of-unity order must be positive")
    g = gcd(j, m)
    order, exponent = m // g, (j // g) % (m // g)
    if order == 1:
        exponent = 1
    W = make_field(lcm(L.field.m, order))
    return W, W.zeta((W.m // order) * exponent), order, exponent


class ExceptionalCheck(NamedTuple):
    member: bool
    reasons: list


def in_exceptional_set(L: ParamLRS, zeta: CycloElem) -> ExceptionalCheck:
    if not is_root_of_unity(zeta):
        raise NotRootOfUnity(f"{zeta!r} is not a root of unity")
    W = zeta.field
    fvals = [poly_eval(poly_lift(p, W), zeta) for p in L.f]
    avals = [poly_eval(poly_lift(p, W), zeta) for p in L.alpha]
    return _exceptional_reasons(fvals, avals)


def _exceptional_reasons(fvals, avals) -> ExceptionalCheck:
    reasons = []
    for i, v in enumerate(fvals):
        if v.is_zero():
            reasons.append(f"f_{i + 1}(zeta) = 0")
    for i, v in enumerate(avals):
        if v.is_zero():
            reasons.append(f"alpha_{i + 1}(zeta) = 0")
    torsion = avals[0].field.torsion_order if avals else 1
    powers = [v**torsion if not v.is_zero() else None for v in avals]
    for i in range(len(avals)):
        for j in range(i + 1, len(avals)):
            # alpha_i/alpha_j is torsion iff their torsion_order-th powers agree
            if powers[i] is not None and powers[j] is not None and powers[i] == powers[j]:
                reasons.append(f"alpha_{i + 1}(zeta)/alpha_{j + 1}(zeta) is a root of unity")
    return ExceptionalCheck(bool(reasons), reasons)


@dataclass(frozen=True)
class DominanceData:
    dominant_count: int
    dominant_index: Optional[int]  # original (0-based) index of the dominant root
    delta: Optional[arb] = None
    rho: Optional[arb] = None
    C7: Optional[arb] = None
    C8: Optional[arb] = None
    abs_alpha1: Optional[arb] = None
    abs_f1: Optional[arb] = None


@dataclass(frozen=True)
class SpecializedLRS:
    """U_n at a fixed root of unity.  When there is a single dominant root it sits at index 0;
    ``order_map[i]`` is the original index of the i-th stored summand."""

    parent: ParamLRS
    field: CycloField
    zeta: CycloElem
    order: int
    exponent: int
    fvals: tuple
    avals: tuple
    char_poly: tuple  # monic, lowest degree first
    dominance: DominanceData
    order_map: tuple
    precision: int

    @property
    def k(self) -> int:
        return len(self.fvals)

    @property
    def single_dominant(self) -> bool:
        return self.dominance.dominant_count == 1


def dominant_tie(avals: Sequence[CycloElem]) -> list[int]:
    """Indices of the characteristic roots of maximal modulus (exact comparison)."""
    best = [0]
    for i in range(1, len(avals)):
        c = abs_compare(avals[i], avals[best[0]])
        if c == Ordering.GREATER:
            best = [i]
        elif c == Ordering.EQUAL:
            best.append(i)
    return best


def _char_poly(avals):
    K = avals[0].field
    poly = [K.one]
    for a in avals:
        nxt = [K.zero] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = nxt[i + 1] + c
            nxt[i] = nxt[i] - c * a
        poly = nxt
    return tuple(poly)


def specialize(L: ParamLRS, m: int, j: int = 1, precision: int = 128) -> SpecializedLRS:
    W, zeta, order, exponent = point(L, m, j)
    fvals = [poly_eval(poly_lift(p, W), zeta) for p in L.f]
    avals = [poly_eval(poly_lift(p, W), zeta) for p in L.alpha]
    check = _exceptional_reasons(fvals, avals)
    if check.member:
        raise ExceptionalParameter(check.reasons)

    tie = dominant_tie(avals)
    if len(tie) > 1:
        dom = DominanceData(dominant_count=len(tie), dominant_index=None)
        perm = list(range(L.k))
    else:
        top = tie[0]
        perm = [top] + [i for i in range(L.k) if i != top]
        fvals = [fvals[i] for i in perm]
        avals = [avals[i] for i in perm]
        dom = _dominance(fvals, avals, top, precision)
    return SpecializedLRS(
        parent=L,
        field=W,
        zeta=zeta,
        order=order,
        exponent=exponent,
        fvals=tuple(fvals),
        avals=tuple(avals),
        char_poly=_char_poly(avals),
        dominance=dom,
        order_map=tuple(perm),
        precision=precision,
    )


def _dominance(fvals, avals, top, precision) -> DominanceData:
    if real_sign(abs_squared(avals[0]) - 1) <= 0:
        raise DegenerateGap("dominant root has modulus <= 1; the growth analysis needs |alpha_1(zeta)| > 1")
    with ctx.workprec(precision):
        a1 = abs(embed(avals[0], 1, precision))
        f1 = abs(embed(fvals[0], 1, precision))
        log_a1 = a1.log()
        others = [abs(embed(a, 1, precision)) for a in avals[1:]]
        # roots inside the unit disc give negative exponents; 0 still bounds them
        delta = arb(0)
        rho = None
        for r in others:
            delta = delta.max(r.log() / log_a1)
            rho = r / a1 if rho is None else rho.max(r / a1)
        C7 = arb(0)
        for f in fvals[1:]:
            C7 += abs(embed(f, 1, precision))
        C8 = C7 / f1
    return DominanceData(1, top, delta, rho, C7, C8, a1, f1)


def term_closed_form(Lz: SpecializedLRS, n: int) -> CycloElem:
    if n < 0:
        raise ValueError("n must be nonnegative")
    acc = Lz.field.zero
    for f, a in zip(Lz.fvals, Lz.avals):
        acc = acc + f * a**n
    return acc


def recurrence_coefficients(Lz: SpecializedLRS) -> list[CycloElem]:
    """A_0, ..., A_{k-1} with u_{n+k} = A_{k-1} u_{n+k-1} + ... + A_0 u_n."""
    return [-c for c in Lz.char_poly[:-1]]


def iter_terms(Lz: SpecializedLRS):
    """Yield u_0, u_1, ... by running the order-k recurrence from closed-form seeds."""
    k = Lz.k
    A = recurrence_coefficients(Lz)
    window = [term_closed_form(Lz, i) for i in range(k)]
    yield from window
    while True:
        nxt = Lz.field.zero
        for coef, u in zip(A, window):
            nxt = nxt + coef * u
        window = window[1:] + [nxt]
        yield nxt


def term_recurrence(Lz: SpecializedLRS, n: int) -> CycloElem:
    if n < 0:
        raise ValueError("n must be nonnegative")
    for i, u in enumerate(iter_terms(Lz)):
        if i == n:
            return u


def _require_dominant(Lz: SpecializedLRS):
    if not Lz.single_dominant:
        raise DegenerateGap(f"{Lz.dominance.dominant_count} characteristic roots share the maximal modulus")


class RemainderRatio(NamedTuple):
    R_minus_1: arb
    bound: arb
    ok: bool


def remainder_ratio(Lz: SpecializedLRS, n: int) -> RemainderRatio:
    """|R_n - 1| = |h_n| / |f_1 alpha_1^n| against the envelope C8 |alpha_1|^(-n(1-delta))."""
    _require_dominant(Lz)
    lead = Lz.fvals[0] * Lz.avals[0] ** n
    rest = term_closed_form(Lz, n) - lead
    if rest.is_zero():
        raise DegenerateTerm(n)
    dom = Lz.dominance
    prec = Lz.precision
    with ctx.workprec(prec):
        ratio = abs(embed(rest, 1, prec)) / abs(embed(lead, 1, prec))
        bound = dom.C8 * (dom.abs_alpha1.log() * (-n * (1 - dom.delta))).exp()
        ok = not (ratio > bound)
    return RemainderRatio(ratio, bound, ok)


@dataclass
class StructureReport:
    passed: bool
    n_checked: int
    n_star: Optional[int]
    notes: list


def _tail_lower(Lz: SpecializedLRS, n: int) -> tuple[arb, arb]:
    dom = Lz.dominance
    with ctx.workprec(Lz.precision):
        growth = (dom.abs_alpha1.log() * n).exp()
        gap = (dom.abs_alpha1.log() * (n * (1 - dom.delta))).exp()
        lower = dom.abs_f1 * growth * (1 - dom.C8 / gap)
        return lower, gap


def _tail_certified(Lz: SpecializedLRS, n: int) -> bool:
    # lower envelope > 1 at n and increasing from n on (gap > delta * C8)
    dom = Lz.dominance
    lower, gap = _tail_lower(Lz, n)
    with ctx.workprec(Lz.precision):
        return bool(lower > 1 and gap > dom.delta * dom.C8)


def tail_threshold(Lz: SpecializedLRS, limit: int = 1 << 24) -> Optional[int]:
    """Largest n* such that |U_n| > 1 is certified for every n > n*, or None past ``limit``.

    The certification predicate is monotone in n, so exponential plus binary search applies.
    """
    _require_dominant(Lz)
    if _tail_certified(Lz, 0):
        return -1
    hi = 1
    while not _tail_certified(Lz, hi):
        hi *= 2
        if hi > limit:
            return None
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _tail_certified(Lz, mid):
            hi = mid
        else:
            lo = mid
    return hi - 1


def desired_structure_check(Lz: SpecializedLRS, n_check: int) -> StructureReport:
    """Exact checks of U_n != f_1 alpha_1^n and |U_n| >= 1 for n <= n_check, plus a tail
    certificate from the dominance gap.  Raises StructureViolation on the first failure."""
    _require_dominant(Lz)
    f1, a1 = Lz.fvals[0], Lz.avals[0]
    power = Lz.field.one
    for n, u in zip(range(n_check + 1), iter_terms(Lz)):
        lead = f1 * power
        if u == lead:
            raise StructureViolation(n, "U_n equals f_1(zeta) alpha_1(zeta)^n")
        if real_sign(abs_squared(u) - 1) < 0:
            raise StructureViolation(n, "|U_n(zeta)| < 1")
        power = power * a1
    n_star = tail_threshold(Lz)
    notes = [
        "nonexceptional pairs and torsion-coset factors are checked by the exceptional scan",
        "U_n != f_1 alpha_1^n is verified exactly only for n <= n_check",
    ]
    passed = n_star is not None and n_star <= n_check
    if n_star is None:
        notes.append("tail bound could not be certified")
    elif n_star > n_check:
        notes.append(f"tail certificate starts after n={n_star}, beyond the checked range")
    return StructureReport(passed, n_check, n_star, notes)
