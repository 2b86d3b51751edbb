"""Prime ideals of Z[zeta_m] and factorization of principal ideals.

Z[zeta_m] is the maximal order of Q(zeta_m), so Kummer-Dedekind applies to every
rational prime: the primes above p are (p, g(zeta)) for the distinct monic
irreducible factors g of Phi_m modulo p.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

from flint import fmpz_mod_poly_ctx, nmod_poly

from .cyclo import CycloElem, CycloField, cyclotomic_poly, euler_phi, make_field, norm
from .errors import EmptyS, FactorizationTimeout, IncompleteFactorization, NonIntegral, ZeroElement
from .intfactor import factorint


@dataclass(frozen=True, order=True)
class PrimeIdeal:
    m: int
    p: int
    gen_poly: tuple[int, ...]  # monic factor of Phi_m mod p, lowest degree first
    f: int = field(compare=False)
    e: int = field(compare=False)

    @property
    def norm(self) -> int:
        return self.p**self.f

    def to_text(self) -> str:
        return f"{self.p}:{self.f}:{self.e}:" + ",".join(map(str, self.gen_poly))

    def anti_uniformizer(self) -> CycloElem:
        """gamma with gamma * P inside pZ[zeta] and v_P(gamma) = e - 1 (Kummer-Dedekind)."""
        return _anti_uniformizer(self)


def parse_prime_ideal(text: str, m: int) -> PrimeIdeal:
    p, f, e, g = text.split(":")
    return PrimeIdeal(m, int(p), tuple(int(c) for c in g.split(",")), int(f), int(e))


def _modp(coeffs, p: int):
    """Polynomial over Z/p; nmod_poly needs a word-size modulus."""
    if p < 1 << 63:
        return nmod_poly(list(coeffs), p)
    return _big_ring(p)(list(coeffs))


@lru_cache(maxsize=64)
def _big_ring(p: int):
    return fmpz_mod_poly_ctx(p)


def _p_free_part(m: int, p: int) -> int:
    while m % p == 0:
        m //= p
    return m


@lru_cache(maxsize=None)
def _split(m: int, p: int) -> tuple[PrimeIdeal, ...]:
    m0 = _p_free_part(m, p)
    e = euler_phi(m) // euler_phi(m0)
    # Phi_m = Phi_{m0}^e mod p, and Phi_{m0} is separable mod p
    _, factors = _modp(cyclotomic_poly(m0), p).factor()
    ideals = []
    for g, mult in factors:
        if mult != 1:
            raise ArithmeticError(f"Phi_{m0} is not separable mod {p}")
        coeffs = tuple(int(c) for c in g.coeffs())
        ideals.append(PrimeIdeal(m, p, coeffs, g.degree(), e))
    ideals.sort()
    if sum(P.e * P.f for P in ideals) != euler_phi(m):
        raise ArithmeticError("sum of e*f differs from the field degree")
    return tuple(ideals)


def split_prime(K: CycloField, p: int) -> list[PrimeIdeal]:
    return list(_split(K.m, p))


def ideals_above(K: CycloField, primes: Sequence[int]) -> list[PrimeIdeal]:
    out = []
    for p in primes:
        out.extend(split_prime(K, p))
    return out


@lru_cache(maxsize=None)
def _anti_uniformizer(P: PrimeIdeal) -> CycloElem:
    K = make_field(P.m)
    phi = _modp(cyclotomic_poly(P.m), P.p)
    g = _modp(P.gen_poly, P.p)
    h, r = divmod(phi, g)
    if r != 0:
        raise ArithmeticError("generator does not divide Phi_m mod p")
    return K.from_coords([int(c) for c in h.coeffs()])


def _check_integral(beta: CycloElem):
    if beta.is_zero():
        raise ZeroElement("valuation of zero")
    if not beta.is_integral():
        raise NonIntegral(f"{beta!r} is not in Z[zeta]")


def in_ideal(beta: CycloElem, P: PrimeIdeal) -> bool:
    """beta in (p, g(zeta)) iff g divides beta's coordinate polynomial mod p."""
    b = _modp([int(c) for c in beta.coords], P.p)
    return b % _modp(P.gen_poly, P.p) == 0


def valuation(beta: CycloElem, P: PrimeIdeal) -> int:
    """v_P(beta) for integral nonzero beta.

    Multiplying by gamma/p, with gamma the anti-uniformizer, lowers v_P by one and
    keeps every other valuation nonnegative, so the count of steps that stay
    integral is exactly v_P(beta).
    """
    _check_integral(beta)
    if beta.field.m != P.m:
        raise ValueError("ideal and element live in different fields")
    if not in_ideal(beta, P):
        return 0
    gamma = P.anti_uniformizer()
    p = P.p
    v = 0
    x = beta
    while True:
        y = x * gamma
        if any(c.numerator % p for c in y.coords):
            return v
        x = y / p
        v += 1


@dataclass
class IdealFactorization:
    element: CycloElem
    factors: list  # [(PrimeIdeal, valuation)], sorted by ideal
    norm_abs: int
    complete: bool = True
    unfactored: list = field(default_factory=list)

    def recompose(self) -> int:
        out = 1
        for P, v in self.factors:
            out *= P.norm**v
        return out


def _factor_from_primes(beta: CycloElem, norm_abs: int, primes: dict) -> list:
    K = beta.field
    factors = []
    for p, vp in primes.items():
        total = 0
        for P in split_prime(K, p):
            v = valuation(beta, P)
            if v:
                factors.append((P, v))
                total += P.f * v
        if total != vp:
            raise ArithmeticError(f"valuations above {p} give {total}, norm has {vp}")
    return factors


def factor_principal(beta: CycloElem, budget_ms: Optional[float] = None, allow_partial: bool = False) -> IdealFactorization:
    """Prime-ideal factorization of the principal ideal generated by beta."""
    _check_integral(beta)
    N = norm(beta)
    norm_abs = abs(int(N))
    try:
        primes = factorint(norm_abs, budget_ms=budget_ms)
    except FactorizationTimeout as exc:
        found, rest = exc.partial
        partial = IdealFactorization(beta, _factor_from_primes(beta, norm_abs, found), norm_abs, False, rest)
        if allow_partial:
            return partial
        raise FactorizationTimeout(str(exc), partial=partial) from exc
    return IdealFactorization(beta, _factor_from_primes(beta, norm_abs, primes), norm_abs)


class GreatestPrimeRadical(NamedTuple):
    P: int
    radical_norm: int


def greatest_prime_and_radical(fact: IdealFactorization) -> GreatestPrimeRadical:
    """Largest prime-ideal norm and the norm of the radical; both 1 for units."""
    if not fact.complete:
        raise IncompleteFactorization("factorization is incomplete")
    P = max((Q.norm for Q, _ in fact.factors), default=1)
    radical = 1
    for Q, _ in fact.factors:
        radical *= Q.norm
    return GreatestPrimeRadical(P, radical)


@dataclass
class SPartResult:
    s_part_norm: int
    cofactor_norm: int
    exponents: list  # [(PrimeIdeal, r_i)] for every ideal of S


def s_part(fact: IdealFactorization, S: Sequence[PrimeIdeal]) -> SPartResult:
    if not S:
        raise EmptyS("S must contain at least one prime ideal")
    if len(set(S)) != len(S):
        raise ValueError("S contains repeated ideals")
    if not fact.complete:
        raise IncompleteFactorization("factorization is incomplete")
    vals = dict(fact.factors)
    s_norm = 1
    exps = []
    for P in sorted(S):
        r = vals.get(P, 0)
        exps.append((P, r))
        s_norm *= P.norm**r
    cof = 1
    for P, v in fact.factors:
        if P not in S:
            cof *= P.norm**v
    return SPartResult(s_norm, cof, exps)
