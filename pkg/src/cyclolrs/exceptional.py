"""Exclusion machinery: multi-dominant scans, torsion-coset factors, budgets, level sets."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import NamedTuple, Optional, Sequence

import mpmath

from .cyclo import CycloElem, CycloField, embed, euler_phi, lift, make_field
from .errors import NoConvergence, UniverseTooSmall
from .lrs import ParamLRS, _exceptional_reasons, dominant_tie, point, poly_eval, poly_lift

log = logging.getLogger(__name__)

XY_MINUS_U = "XY_minus_u"
X_MINUS_UY = "X_minus_uY"


# -- multi-dominant scan -------------------------------------------------------

class ScanHit(NamedTuple):
    m: int  # order of the root of unity
    j: int
    tie_size: int


def scan_point(L: ParamLRS, order: int, j: int) -> Optional[int]:
    """Tie size at zeta_order^j, or None when the point lies in the exceptional set."""
    W, zeta, _, _ = point(L, order, j)
    fvals = [poly_eval(poly_lift(p, W), zeta) for p in L.f]
    avals = [poly_eval(poly_lift(p, W), zeta) for p in L.alpha]
    if _exceptional_reasons(fvals, avals).member:
        return None
    return len(dominant_tie(avals))


def _scan_task(args):
    L, order, j = args
    return order, j, scan_point(L, order, j)


def scan_multi_dominant(L: ParamLRS, M_max: int, workers: int = 1) -> list[ScanHit]:
    """Roots of unity of order <= M_max (outside the exceptional set) where two or more
    characteristic roots share the maximal modulus."""
    from ._parallel import pmap

    tasks = [(L, q, j) for q in range(1, M_max + 1) for j in range(1, q + 1) if gcd(j, q) == 1]
    hits = []
    for q, j, tie in pmap(_scan_task, tasks, workers):
        if tie is not None and tie >= 2:
            hits.append(ScanHit(q, j, tie))
    return hits


def split_by_tie(hits: Sequence[ScanHit]) -> tuple[list[ScanHit], list[ScanHit]]:
    """Separate ties of exactly two roots from ties of three or more."""
    return [h for h in hits if h.tie_size == 2], [h for h in hits if h.tie_size >= 3]


# -- bivariate polynomials --------------------------------------------------------

Bivariate = dict  # {(i, j): CycloElem}


def _biv_clean(P: Bivariate) -> Bivariate:
    return {k: v for k, v in P.items() if not v.is_zero()}


def _biv_mul(P: Bivariate, Q: Bivariate) -> Bivariate:
    out: Bivariate = {}
    for (a, b), c in P.items():
        for (x, y), d in Q.items():
            key = (a + x, b + y)
            out[key] = out[key] + c * d if key in out else c * d
    return _biv_clean(out)


def _biv_lift(P: Bivariate, K: CycloField) -> Bivariate:
    return {k: lift(v, K) for k, v in P.items()}


def conj_poly(p):
    return tuple(c.conjugate() for c in p)


def modulus_difference(ai, aj) -> Bivariate:
    """ai(X) conj(ai)(Y) - aj(X) conj(aj)(Y), where conj applies sigma_{-1} to coefficients."""
    out: Bivariate = {}
    for sign, poly in ((1, ai), (-1, aj)):
        cp = conj_poly(poly)
        for x, c in enumerate(poly):
            for y, d in enumerate(cp):
                term = c * d * sign
                out[(x, y)] = out[(x, y)] + term if (x, y) in out else term
    return _biv_clean(out)


def binomial(r: int, s: int, u: CycloElem, shape: str) -> Bivariate:
    one = u.field.one
    if shape == XY_MINUS_U:
        return _biv_clean({(r, s): one, (0, 0): -u}) if (r, s) != (0, 0) else {(0, 0): one - u}
    return _biv_clean({(r, 0): one, (0, s): -u})


def divide_by_binomial(P: Bivariate, r: int, s: int, u: CycloElem, shape: str) -> tuple[Bivariate, Bivariate]:
    """Quotient and remainder of P by X^r Y^s - u or X^r - u Y^s.

    Each binomial is a one-element Groebner basis for its ideal (leading monomial
    X^r Y^s, resp. X^r in lex order), so the remainder is zero iff it divides P.
    """
    rem = dict(P)
    quot: Bivariate = {}
    while True:
        if shape == XY_MINUS_U:
            keys = [k for k in rem if k[0] >= r and k[1] >= s]
        else:
            keys = [k for k in rem if k[0] >= r]
        if not keys:
            break
        key = max(keys)
        c = rem.pop(key)
        a, b = key
        qkey = (a - r, b - s) if shape == XY_MINUS_U else (a - r, b)
        quot[qkey] = quot[qkey] + c if qkey in quot else c
        low = (a - r, b - s) if shape == XY_MINUS_U else (a - r, b + s)
        rem[low] = rem[low] + c * u if low in rem else c * u
        rem = _biv_clean(rem)
    return _biv_clean(quot), _biv_clean(rem)


class Witness(NamedTuple):
    r: int
    s: int
    u: CycloElem
    shape: str


@dataclass
class TorsionFactorVerdict:
    found: bool
    witnesses: list = field(default_factory=list)
    polynomial: Bivariate = field(default_factory=dict, repr=False)


def _degrees(P: Bivariate) -> tuple[int, int]:
    return max(k[0] for k in P), max(k[1] for k in P)


def _universe(W: int, extension_degree: int) -> list[int]:
    """Conductors L, multiples of W, with [Q(zeta_L) : Q(zeta_W)] <= extension_degree."""
    phiW = euler_phi(W)
    limit = 2 * (phiW * extension_degree) ** 2 + 2
    out = set()
    for N in range(1, limit + 1):
        if euler_phi(N) > phiW * extension_degree:
            continue
        Lc = lcm(W, N)
        if euler_phi(Lc) // phiW <= extension_degree:
            out.add(Lc)
    return sorted(out)


def _new_torsion(K: CycloField, base_order: int) -> list[CycloElem]:
    # roots of unity of K whose order does not divide base_order (those were tested already)
    out = []
    for u in K.roots_of_unity():
        if u ** base_order != 1:
            out.append(u)
    return out


def torsion_factor_check(ai, aj, D_max: int) -> TorsionFactorVerdict:
    """Search factors X^r Y^s - u and X^r - u Y^s (u torsion, r, s <= D_max coprime) of
    ai(X) conj(ai)(Y) - aj(X) conj(aj)(Y).

    Torsion u in the coefficients' field are tested directly.  Because the Galois
    conjugates of a factor divide P as well, any u outside that field lies in an
    extension of degree at most deg(P)/r, which is searched next; a hit there raises
    UniverseTooSmall.
    """
    ai, aj = tuple(ai), tuple(aj)
    K = ai[0].field
    P = modulus_difference(ai, aj)
    if not P:
        raise ValueError("ai and aj have identical moduli everywhere (P = 0)")
    degX, degY = _degrees(P)
    witnesses, outside = [], []
    base_order = K.torsion_order
    for r in range(1, D_max + 1):
        for s in range(1, D_max + 1):
            if gcd(r, s) != 1:
                continue
            ext = min(degX // r, degY // s)
            if ext < 1:
                continue
            for cond in _universe(K.m, ext):
                E = make_field(cond)
                PE = _biv_lift(P, E)
                candidates = E.roots_of_unity() if cond == K.m else _new_torsion(E, base_order)
                for u in candidates:
                    for shape in (XY_MINUS_U, X_MINUS_UY):
                        q, rem = divide_by_binomial(PE, r, s, u, shape)
                        if rem:
                            continue
                        if _biv_mul(q, binomial(r, s, u, shape)) != PE:
                            raise ArithmeticError("witness failed re-verification")
                        if cond == K.m:
                            witnesses.append(Witness(r, s, u, shape))
                        else:
                            outside.append((r, s, cond, shape))
    if outside:
        raise UniverseTooSmall(outside)
    return TorsionFactorVerdict(bool(witnesses), witnesses, P)


def verify_witness(P: Bivariate, w: Witness) -> bool:
    q, rem = divide_by_binomial(P, w.r, w.s, w.u, w.shape)
    return not rem and _biv_mul(q, binomial(w.r, w.s, w.u, w.shape)) == P


# -- exclusion budget ----------------------------------------------------------

def exclusion_budget(d: int, k: int) -> Fraction:
    """d^2 (2k^3/3 + 22k^2): roots of unity allowed to have several dominant roots."""
    if d < 1 or k < 2:
        raise ValueError("need d >= 1 and k >= 2")
    return Fraction(d * d) * (Fraction(2 * k**3, 3) + 22 * k * k)


def budget_breakdown(d: int, k: int) -> dict:
    return {
        "total": exclusion_budget(d, k),
        "three_dominant": Fraction(2 * d * d * k * (k - 1) * (k - 2), 3),
        "two_dominant": Fraction(22 * d * d * k * k),
        "per_equation": Fraction(44 * d * d),
    }


# -- level sets --------------------------------------------------------------------

@dataclass
class BlaschkeDecomposition:
    """Record for g_i = Q_i o g with Q_i quotients of finite Blaschke products.

    Documentation only: no procedure constructs these, so exceptionality is never decided.
    """

    unimodular_factor: Optional[complex] = None
    zeros: list = field(default_factory=list)
    multiplicities: list = field(default_factory=list)
    Q1: object = None
    Q2: object = None
    inner: object = None


@dataclass
class RationalFunctionPair:
    g1: tuple  # (numerator, denominator), each a tuple of CycloElem coefficients
    g2: tuple
    blaschke: Optional[BlaschkeDecomposition] = None

    def __post_init__(self):
        for num, den in (self.g1, self.g2):
            if not any(not c.is_zero() for c in den):
                raise ValueError("denominator must be nonzero")

    @staticmethod
    def _deg(p):
        return max((i for i, c in enumerate(p) if not c.is_zero()), default=0)

    @property
    def n1(self) -> int:
        return max(self._deg(self.g1[0]), self._deg(self.g1[1]))

    @property
    def n2(self) -> int:
        return max(self._deg(self.g2[0]), self._deg(self.g2[1]))


class LevelSetCount(NamedTuple):
    count: int
    bound: int
    within_bound: bool
    rigor: str
    exceptional_like: bool
    points: list


def _coeffs_complex(p, prec):
    out = []
    for c in p:
        b = embed(c, 1, prec)
        out.append(mpmath.mpc(float(b.real.mid()), float(b.imag.mid())) if prec <= 53 else mpmath.mpc(
            mpmath.mpf(b.real.mid().str(prec // 3, radius=False)), mpmath.mpf(b.imag.mid().str(prec // 3, radius=False))
        ))
    return out


def _polyval(coeffs, z):
    acc = mpmath.mpc(0)
    dacc = mpmath.mpc(0)
    for c in reversed(coeffs):
        dacc = dacc * z + acc
        acc = acc * z + c
    return acc, dacc


def _log_derivs(num, den, z):
    n, dn = _polyval(num, z)
    d, dd = _polyval(den, z)
    # log g = log n - log d;  (log g)' = n'/n - d'/d
    return mpmath.log(abs(n)) - mpmath.log(abs(d)), dn / n - dd / d


def level_set_count(pair: RationalFunctionPair, grid: int = 16, precision: int = 53, radius: Optional[float] = None,
                    max_iter: int = 80) -> LevelSetCount:
    """Numerically count z with |g1(z)| = |g2(z)| = 1.

    Damped Newton on (log|g1|, log|g2|) from a grid of seeds over a disc; converged
    points are clustered.  Non-rigorous: the count is evidence, never proof.  Solution
    sets that look one-dimensional (singular Jacobians along many clusters, or more
    clusters than the bound) are flagged ``exceptional_like``.
    """
    if grid < 16:
        raise ValueError("grid must be at least 16")
    bound = (pair.n1 + pair.n2) ** 2
    with mpmath.workprec(precision):
        polys = [_coeffs_complex(p, max(precision, 64)) for p in (*pair.g1, *pair.g2)]
        if radius is None:
            radius = 1.0
            for p in polys:
                nz = [abs(c) for c in p if abs(c) > 0]
                if len(nz) > 1:
                    lead = abs(p[max(i for i, c in enumerate(p) if abs(c) > 0)])
                    radius = max(radius, 1 + float(max(nz) / lead))
            radius += 1.0
        tol = mpmath.mpf(2) ** (-precision // 2)
        points, singular = [], []
        for gx in range(grid):
            for gy in range(grid):
                x = -radius + 2 * radius * (gx + 0.5) / grid
                y = -radius + 2 * radius * (gy + 0.5) / grid
                if x * x + y * y > radius * radius:
                    continue
                try:
                    z, sing = _newton(polys, mpmath.mpc(x, y), tol, max_iter)
                except (NoConvergence, ZeroDivisionError, ValueError):
                    log.debug("seed (%g, %g) dropped", x, y)
                    continue
                points.append(z)
                singular.append(sing)
        clusters, cl_sing = [], []
        # tangential solutions only converge to about sqrt(tol), hence the loose radius
        ctol = 1e-3
        for z, sing in zip(points, singular):
            for i, c in enumerate(clusters):
                if abs(z - c) < ctol:
                    cl_sing[i] = cl_sing[i] or sing
                    break
            else:
                clusters.append(z)
                cl_sing.append(sing)
    count = len(clusters)
    exceptional_like = count > bound or sum(cl_sing) >= 3
    return LevelSetCount(count, bound, count <= bound, "heuristic", exceptional_like,
                         [complex(c) for c in clusters])


def _newton(polys, z, tol, max_iter):
    n1, d1, n2, d2 = polys
    for _ in range(max_iter):
        F1, L1 = _log_derivs(n1, d1, z)
        F2, L2 = _log_derivs(n2, d2, z)
        # d/dx Re log g = Re(g'/g),  d/dy Re log g = -Im(g'/g)
        J = mpmath.matrix([[mpmath.re(L1), -mpmath.im(L1)], [mpmath.re(L2), -mpmath.im(L2)]])
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        scale = (abs(L1) * abs(L2)) or 1
        if abs(F1) < tol and abs(F2) < tol:
            return z, abs(det) < 1e-6 * scale
        if abs(det) < 1e-30 * scale:
            # tangential direction: gradient step on F1^2 + F2^2
            g = mpmath.mpc(F1 * J[0, 0] + F2 * J[1, 0], F1 * J[0, 1] + F2 * J[1, 1])
            if abs(g) == 0:
                raise NoConvergence("stalled")
            z = z - g * (F1 * F1 + F2 * F2) / (abs(g) ** 2)
            continue
        dx = (J[1, 1] * F1 - J[0, 1] * F2) / det
        dy = (-J[1, 0] * F1 + J[0, 0] * F2) / det
        step = mpmath.mpc(dx, dy)
        t = 1
        cur = abs(F1) + abs(F2)
        while t > 1e-4:
            cand = z - t * step
            try:
                G1, _ = _log_derivs(n1, d1, cand)
                G2, _ = _log_derivs(n2, d2, cand)
            except (ZeroDivisionError, ValueError):
                G1 = G2 = mpmath.inf
            if abs(G1) + abs(G2) < cur:
                break
            t /= 2
        z = z - t * step
    raise NoConvergence("no convergence within the iteration budget")
