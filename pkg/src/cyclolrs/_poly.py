"""Dense univariate polynomials over Q as coefficient lists, lowest degree first.

Only what the field code needs: exact division, gcd, derivative.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm, gcd


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p):
    return len(trim(p)) - 1


def mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def sub(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)])


def divmod_poly(p, q):
    """Quotient and remainder of p by q.  Integer inputs stay integral when q is monic."""
    p, q = trim(p), trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    lead = q[-1]
    rem = list(p)
    dq = len(q) - 1
    if len(rem) - 1 < dq:
        return [], rem
    quot = [0] * (len(rem) - dq)
    for i in range(len(rem) - 1, dq - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        c = c // lead if lead in (1, -1) and isinstance(c, int) else Fraction(c) / lead
        quot[i - dq] = c
        for j in range(dq + 1):
            rem[i - dq + j] -= c * q[j]
    return trim(quot), trim(rem)


def exact_div(p, q):
    quot, rem = divmod_poly(p, q)
    if rem:
        raise ArithmeticError("division is not exact")
    return quot


def monic(p):
    p = trim(p)
    lead = Fraction(p[-1])
    return [Fraction(c) / lead for c in p]


def gcd_poly(p, q):
    """Monic gcd over Q."""
    a, b = trim(p), trim(q)
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, r
    return monic(a) if a else []


def derivative(p):
    return trim([i * c for i, c in enumerate(p)][1:])


def evaluate(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def primitive_integer(p):
    """Scale a rational polynomial to a primitive integer one with positive leading coefficient."""
    p = [Fraction(c) for c in trim(p)]
    den = lcm(*(c.denominator for c in p))
    ints = [int(c * den) for c in p]
    content = gcd(*ints)
    if ints[-1] < 0:
        content = -content
    return [c // content for c in ints]
