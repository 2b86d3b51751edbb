"""Exact arithmetic in cyclotomic fields Q(zeta_m) with rigorous complex embeddings.

Elements are stored as rational coordinates in the power basis 1, zeta, ...,
zeta^(phi(m)-1) and every product is reduced modulo the cyclotomic polynomial,
so nothing is ever rounded.  Numerical questions (moduli, houses, heights) go
through python-flint balls (``arb``/``acb``), which play the role of complex
balls: every returned ball is guaranteed to contain the exact value.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, lcm
from typing import NamedTuple, Sequence

from flint import acb, arb, ctx, fmpq

from . import _poly
from .errors import ParseError, ZeroElement

DEFAULT_PRECISION = 64
MAX_PRECISION = 1 << 16


def divisors(m: int) -> list[int]:
    small = [d for d in range(1, int(m**0.5) + 1) if m % d == 0]
    return sorted(set(small + [m // d for d in small]))


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first.

    Uses X^m - 1 = prod_{d | m} Phi_d and divides out the proper divisors.
    """
    if m < 1:
        raise ValueError("conductor must be positive")
    poly = [-1] + [0] * (m - 1) + [1]
    for d in divisors(m)[:-1]:
        poly = _poly.exact_div(poly, list(cyclotomic_poly(d)))
    return tuple(int(c) for c in poly)


def euler_phi(m: int) -> int:
    return sum(1 for a in range(1, m + 1) if gcd(a, m) == 1)


@dataclass(frozen=True)
class CycloField:
    m: int
    degree: int = field(compare=False)
    cyclotomic_poly: tuple[int, ...] = field(compare=False, repr=False)
    torsion_order: int = field(compare=False)
    galois_exponents: tuple[int, ...] = field(compare=False, repr=False)

    @cached_property
    def _zeta_powers(self) -> tuple[tuple[Fraction, ...], ...]:
        # coordinates of zeta^e for 0 <= e < m
        powers = []
        cur = [Fraction(1)] + [Fraction(0)] * (self.degree - 1)
        for _ in range(self.m):
            powers.append(tuple(cur))
            cur = [Fraction(x) for x in self._reduce([Fraction(0)] + cur)]
        return tuple(powers)

    def _reduce(self, coeffs: Sequence) -> list:
        phi = self.cyclotomic_poly
        D = self.degree
        c = list(coeffs)
        for i in range(len(c) - 1, D - 1, -1):
            top = c[i]
            if top:
                base = i - D
                for j in range(D):
                    if phi[j]:
                        c[base + j] -= top * phi[j]
            c[i] = 0
        c = c[:D]
        if len(c) < D:
            c.extend([0] * (D - len(c)))
        return c

    def __call__(self, value) -> CycloElem:
        if isinstance(value, CycloElem):
            return lift(value, self)
        return CycloElem(self, (Fraction(value),) + (Fraction(0),) * (self.degree - 1))

    def from_coords(self, coords: Sequence) -> CycloElem:
        """Element with the given power-basis coordinates (any length; reduced mod Phi_m)."""
        return CycloElem(self, tuple(Fraction(c) for c in self._reduce([Fraction(c) for c in coords])))

    def zeta(self, j: int = 1) -> CycloElem:
        return CycloElem(self, self._zeta_powers[j % self.m])

    @property
    def zero(self) -> CycloElem:
        return self(0)

    @property
    def one(self) -> CycloElem:
        return self(1)

    def roots_of_unity(self) -> list[CycloElem]:
        """All torsion_order roots of unity of the field, as powers of -zeta or zeta."""
        out = [self.zeta(t) for t in range(self.m)]
        if self.torsion_order != self.m:
            out += [-z for z in out]
        return out


@lru_cache(maxsize=None)
def make_field(m: int) -> CycloField:
    if m < 1:
        raise ValueError("conductor must be positive")
    exps = tuple(a for a in range(1, m + 1) if gcd(a, m) == 1)
    return CycloField(
        m=m,
        degree=len(exps),
        cyclotomic_poly=cyclotomic_poly(m),
        torsion_order=lcm(2, m),
        galois_exponents=exps,
    )


class CycloElem:
    """Exact element of a cyclotomic field, immutable."""

    __slots__ = ("field", "coords", "_hash")

    def __init__(self, field: CycloField, coords: tuple):
        if len(coords) != field.degree:
            raise ValueError(f"expected {field.degree} coordinates, got {len(coords)}")
        self.field = field
        self.coords = coords
        self._hash = None

    def __getstate__(self):
        return (self.field.m, tuple((c.numerator, c.denominator) for c in self.coords))

    def __setstate__(self, state):
        m, pairs = state
        self.field = make_field(m)
        self.coords = tuple(Fraction(p, q) for p, q in pairs)
        self._hash = None

    def _coerce(self, other):
        if isinstance(other, CycloElem):
            if other.field != self.field:
                raise ValueError(f"field mismatch: Q(zeta_{self.field.m}) vs Q(zeta_{other.field.m})")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloElem(self.field, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloElem(self.field, tuple(a - b for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElem(self.field, tuple(a * other for a in self.coords))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coords, o.coords
        prod = [0] * (2 * len(a) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return CycloElem(self.field, tuple(Fraction(c) for c in self.field._reduce(prod)))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> CycloElem:
        if self.is_zero():
            raise ZeroElement("inverse of zero")
        others = self.field.one
        for a in self.field.galois_exponents[1:]:
            others = others * self.galois(a)
        return others * (1 / Fraction(norm(self)))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElem(self.field, tuple(a / other for a in self.coords))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.field(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coords[0] == other and not any(self.coords[1:])
        if isinstance(other, CycloElem):
            return self.field == other.field and self.coords == other.coords
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.m, self.coords))
        return self._hash

    def __repr__(self):
        return f"CycloElem({to_text(self)})"

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def is_integral(self) -> bool:
        """Membership in Z[zeta_m]; the power basis is an integral basis."""
        return all(c.denominator == 1 for c in self.coords)

    def galois(self, a: int) -> CycloElem:
        """sigma_a: zeta -> zeta^a."""
        m = self.field.m
        if gcd(a, m) != 1:
            raise ValueError(f"{a} is not a unit modulo {m}")
        table = self.field._zeta_powers
        out = [Fraction(0)] * self.field.degree
        for i, c in enumerate(self.coords):
            if c:
                img = table[(a * i) % m]
                for t, v in enumerate(img):
                    if v:
                        out[t] += c * v
        return CycloElem(self.field, tuple(out))

    def conjugate(self) -> CycloElem:
        """Complex conjugation, i.e. sigma_{-1}."""
        return self.galois(-1 % self.field.m) if self.field.m > 2 else self

    def poly(self) -> list[Fraction]:
        return _poly.trim(self.coords)


def lift(beta: CycloElem, target: CycloField) -> CycloElem:
    """Embed Q(zeta_m) into Q(zeta_M) for m | M via zeta_m = zeta_M^(M/m)."""
    src = beta.field
    if src == target:
        return beta
    if target.m % src.m:
        raise ValueError(f"Q(zeta_{src.m}) is not a subfield of Q(zeta_{target.m})")
    step = target.m // src.m
    out = target.zero
    for i, c in enumerate(beta.coords):
        if c:
            out = out + target.zeta(step * i) * c
    return out


def galois_conjugates(beta: CycloElem) -> list[CycloElem]:
    return [beta.galois(a) for a in beta.field.galois_exponents]


def norm(beta: CycloElem) -> Fraction:
    """Exact norm N_{K/Q}(beta) as the product of all conjugates."""
    prod = beta.field.one
    for conj in galois_conjugates(beta):
        prod = prod * conj
    if not prod.is_rational():
        raise ArithmeticError("norm did not reduce to a rational")
    return prod.coords[0]


# -- complex embeddings -----------------------------------------------------

def _root_ball(m: int, a: int) -> acb:
    q = fmpq(2 * a, m)
    return acb(arb.cos_pi_fmpq(q), arb.sin_pi_fmpq(q))


def embed(beta: CycloElem, a: int = 1, precision: int = DEFAULT_PRECISION) -> acb:
    """Ball enclosing sigma_a(beta) under zeta -> exp(2 pi i / m)."""
    with ctx.workprec(precision):
        z = _root_ball(beta.field.m, a)
        acc = acb(0)
        for c in reversed(beta.coords):
            acc = acc * z + arb(fmpq(c.numerator, c.denominator))
        return acc


def modulus(beta: CycloElem, precision: int = DEFAULT_PRECISION) -> arb:
    with ctx.workprec(precision):
        return abs(embed(beta, 1, precision))


def house(beta: CycloElem, precision: int = DEFAULT_PRECISION) -> arb:
    """Ball enclosing the maximum modulus over all conjugates of beta."""
    with ctx.workprec(precision):
        best = None
        for a in beta.field.galois_exponents:
            v = abs(embed(beta, a, precision))
            best = v if best is None else best.max(v)
        return best


class MinimalPolynomial(NamedTuple):
    coeffs: tuple[int, ...]  # lowest degree first, primitive, positive leading coefficient
    leading: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def characteristic_poly(beta: CycloElem) -> list[Fraction]:
    """prod_a (X - sigma_a(beta)), coefficients reduced to rationals."""
    K = beta.field
    poly = [K.one]
    for conj in galois_conjugates(beta):
        nxt = [K.zero] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = nxt[i + 1] + c
            nxt[i] = nxt[i] - c * conj
        poly = nxt
    out = []
    for c in poly:
        if not c.is_rational():
            raise ArithmeticError("characteristic polynomial is not rational")
        out.append(c.coords[0])
    return out


def min_poly(beta: CycloElem) -> MinimalPolynomial:
    char = characteristic_poly(beta)
    # char = minpoly^e over Q, so its square-free part is the minimal polynomial
    g = _poly.gcd_poly(char, _poly.derivative(char))
    sqf = _poly.exact_div(char, g) if _poly.degree(g) > 0 else char
    K = beta.field
    value = K.zero
    for c in reversed(sqf):
        value = value * beta + Fraction(c)
    if not value.is_zero():
        raise ArithmeticError("square-free part does not vanish at beta")
    ints = _poly.primitive_integer(sqf)
    return MinimalPolynomial(tuple(ints), ints[-1])


class Heights(NamedTuple):
    H: arb
    h: arb


def heights(beta: CycloElem, precision: int = DEFAULT_PRECISION) -> Heights:
    """Multiplicative height H and absolute logarithmic height h, as balls.

    The roots of the minimal polynomial are the distinct conjugates of beta, each
    repeated D/d times among the D embeddings.
    """
    if beta.is_zero():
        raise ZeroElement("height of zero")
    mp = min_poly(beta)
    d = mp.degree
    mult = beta.field.degree // d
    with ctx.workprec(precision):
        logsum = arb(0)
        for a in beta.field.galois_exponents:
            r = abs(embed(beta, a, precision))
            logsum += r.max(arb(1)).log()
        log_H = arb(abs(mp.leading)).log() + logsum / mult
        return Heights(log_H.exp(), log_H / d)


def is_root_of_unity(beta: CycloElem) -> bool:
    if beta.is_zero():
        return False
    return beta ** beta.field.torsion_order == 1


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def real_sign(x: CycloElem, start_precision: int = DEFAULT_PRECISION) -> int:
    """Sign of a real-valued element at the identity embedding, refined until certain.

    Zero is decided exactly from the coordinates, so the refinement loop terminates.
    """
    if x.is_zero():
        return 0
    prec = start_precision
    while prec <= MAX_PRECISION:
        v = embed(x, 1, prec).real
        if v > 0:
            return 1
        if v < 0:
            return -1
        prec *= 2
    raise ArithmeticError("failed to separate a nonzero value from zero")


def abs_squared(beta: CycloElem) -> CycloElem:
    return beta * beta.conjugate()


def abs_compare(beta: CycloElem, gamma: CycloElem) -> Ordering:
    """Compare |beta| with |gamma| exactly, via beta * conj(beta) - gamma * conj(gamma)."""
    return Ordering(real_sign(abs_squared(beta) - abs_squared(gamma)))


# -- text form -----------------------------------------------------------------

def _frac_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_text(beta: CycloElem) -> str:
    """``m; c0, c1, ...`` with rationals written ``p/q``."""
    return f"{beta.field.m}; " + ", ".join(_frac_text(c) for c in beta.coords)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational: {text!r}") from exc


def parse_elem(text: str) -> CycloElem:
    try:
        head, body = text.split(";", 1)
        m = int(head.strip())
    except ValueError as exc:
        raise ParseError(f"expected 'm; c0, c1, ...', got {text!r}") from exc
    if m < 1:
        raise ParseError(f"conductor must be positive in {text!r}")
    coords = [parse_rational(c) for c in body.split(",") if c.strip()]
    K = make_field(m)
    if len(coords) != K.degree:
        raise ParseError(f"Q(zeta_{m}) needs {K.degree} coordinates, got {len(coords)}")
    return K.from_coords(coords)


# Constant relating house and norm through fundamental units.  It is
# not computed anywhere: houses are evaluated directly instead.
FUNDAMENTAL_UNIT_CONSTANT = None
