"""Budgeted integer factorization: trial division, Pollard-Brent rho, then FLINT.

Primality is decided by FLINT's ``fmpz.is_prime``, which proves primality rather
than testing for it probabilistically.
"""
from __future__ import annotations

import logging
import time
from functools import lru_cache
from math import gcd, isqrt

from flint import fmpz

from .errors import FactorizationTimeout

log = logging.getLogger(__name__)

TRIAL_LIMIT = 10**6
RHO_ITERATIONS = 1 << 16


@lru_cache(maxsize=1)
def small_primes(limit: int = TRIAL_LIMIT) -> tuple[int, ...]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return tuple(i for i, v in enumerate(sieve) if v)


def is_prime(n: int) -> bool:
    return n > 1 and bool(fmpz(n).is_prime())


class _Deadline:
    def __init__(self, budget_ms):
        self.end = None if budget_ms is None else time.monotonic() + budget_ms / 1000

    def expired(self) -> bool:
        return self.end is not None and time.monotonic() > self.end


def pollard_brent(n: int, max_iter: int = RHO_ITERATIONS, deadline: _Deadline | None = None, seed: int = 1):
    """A nontrivial factor of composite odd n, or None if the iteration budget runs out."""
    for c in range(seed, seed + 8):
        y, r, q, g = 2, 1, 1, 1
        f = lambda v: (v * v + c) % n  # noqa: E731
        x = ys = y
        done = 0
        while g == 1 and done < max_iter:
            x = y
            for _ in range(r):
                y = f(y)
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = f(y)
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += 128
            done += r
            r *= 2
            if deadline is not None and deadline.expired():
                return None
        if g == n:
            g = 1
            while g == 1:
                ys = f(ys)
                g = gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def factorint(n: int, budget_ms: float | None = None) -> dict[int, int]:
    """Prime factorization of |n| as {p: exponent}.

    Raises FactorizationTimeout when the budget runs out; its ``partial`` attribute
    holds ``(found, unfactored)`` with the primes found so far and the leftover cofactors.
    """
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    found: dict[int, int] = {}
    deadline = _Deadline(budget_ms)

    def add(p, e=1):
        found[p] = found.get(p, 0) + e

    for p in small_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            add(p, e)
    if n == 1:
        return dict(sorted(found.items()))

    stack = [n]
    leftovers = []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if deadline.expired():
            leftovers.append(m)
            leftovers.extend(stack)
            raise FactorizationTimeout(f"budget of {budget_ms} ms exhausted", partial=(dict(sorted(found.items())), leftovers))
        if m < TRIAL_LIMIT**2 or is_prime(m):
            # after trial division every cofactor below TRIAL_LIMIT^2 is prime
            add(m)
            continue
        g = pollard_brent(m, deadline=deadline)
        if g is None:
            if deadline.expired():
                stack.append(m)
                continue
            log.debug("rho budget exhausted on a %d-digit cofactor; using FLINT", len(str(m)))
            for p, e in fmpz(m).factor():
                add(int(p), int(e))
            continue
        stack.extend([g, m // g])
    return dict(sorted(found.items()))
