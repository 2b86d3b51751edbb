"""Desk-scale solver for U_n(zeta) = w_1 + ... + w_r in rational S-integers with
|w_i|^(1+eps) < |w_r|, and a brute-force oracle to check it against."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ._parallel import pmap
from .errors import CapExceeded, ValidationError
from .intfactor import is_prime
from .lrs import SpecializedLRS, iter_terms

log = logging.getLogger(__name__)


def _as_fraction(eps) -> Fraction:
    if isinstance(eps, float):
        return Fraction(repr(eps))  # 0.1 means 1/10, not its binary expansion
    return Fraction(eps)


@dataclass(frozen=True)
class SUnitConfig:
    S: tuple
    r: int
    eps: Fraction
    n_max: int
    height_cap: int
    n_min: int = 0
    allow_negative: bool = True
    allow_zero: bool = False
    check_independence: bool = True

    def __post_init__(self):
        object.__setattr__(self, "S", tuple(sorted(int(p) for p in self.S)))
        object.__setattr__(self, "eps", _as_fraction(self.eps))
        if not self.S:
            raise ValidationError("S must be non-empty")
        if len(set(self.S)) != len(self.S) or not all(is_prime(p) for p in self.S):
            raise ValidationError("S must consist of distinct primes")
        if self.r < 1:
            raise ValidationError("r must be >= 1")
        if self.eps <= 0:
            raise ValidationError("eps must be positive")
        if self.n_max < 0 or self.n_min < 0:
            raise ValidationError("n range must be nonnegative")
        if self.height_cap < 1:
            raise ValidationError("height_cap must be >= 1")


@dataclass(frozen=True)
class Solution:
    n: int
    w: tuple  # w_1..w_{r-1} ascending, then w_r
    exponent_matrix: tuple  # row i: exponents of the primes of S in |w_i|
    signs: tuple
    independence_violations: tuple = ()

    def as_row(self) -> list:
        return [self.n, *self.w]


def enumerate_s_integers(S: Sequence[int], bound: int) -> list[int]:
    """All positive integers <= bound built from the primes in S, ascending."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    out = [1]
    for p in sorted(set(S)):
        grown = []
        for v in out:
            while v <= bound:
                grown.append(v)
                v *= p
        out = grown
    return sorted(out)


def s_exponents(v: int, S: Sequence[int]) -> Optional[tuple]:
    """Exponents of |v| over S, or None if |v| has a prime factor outside S."""
    v = abs(v)
    if v == 0:
        return None
    ex = []
    for p in S:
        e = 0
        while v % p == 0:
            v //= p
            e += 1
        ex.append(e)
    return tuple(ex) if v == 1 else None


def dominates(small: int, big: int, eps: Fraction) -> bool:
    """|small|^(1+eps) < |big|, exactly: |small|^(p+q) < |big|^q for eps = p/q."""
    p, q = eps.numerator, eps.denominator
    return abs(small) ** (p + q) < abs(big) ** q


def _iroot_ceil(x: int, k: int) -> int:
    """Least t >= 0 with t^k >= x."""
    if x <= 0:
        return 0
    lo, hi = 0, 1
    while hi**k < x:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**k >= x:
            hi = mid
        else:
            lo = mid
    return hi


def window_bound(value: int, r: int, eps: Fraction) -> int:
    """Every solution has |w_r| <= this.

    Beyond (2(r-1))^((1+eps)/eps) the other summands total at most |w_r|/2, which
    forces |w_r| < 2|value|.
    """
    if r == 1:
        return abs(value)
    p, q = eps.numerator, eps.denominator
    # (2(r-1))^((p+q)/p) rounded up
    knee = _iroot_ceil((2 * (r - 1)) ** (p + q), p)
    return max(2 * abs(value), knee)


def in_window(value: int, wr: int, r: int, eps: Fraction) -> bool:
    """|value - w_r| < (r-1)|w_r|^(1/(1+eps)), exactly; necessary for any solution."""
    p, q = eps.numerator, eps.denominator
    return abs(value - wr) ** (p + q) < (r - 1) ** (p + q) * abs(wr) ** q


def _signed(values: Sequence[int], allow_negative: bool) -> list[int]:
    if not allow_negative:
        return list(values)
    return sorted([-v for v in values] + list(values))


def _small_parts(target: int, count: int, pool: list[int], pool_set: set, lo_index: int):
    """Non-decreasing tuples of ``count`` elements of sorted ``pool`` (from lo_index) summing to target."""
    if count == 1:
        if target in pool_set and target >= pool[lo_index]:
            yield (target,)
        return
    for i in range(lo_index, len(pool)):
        a = pool[i]
        # the rest are >= a, so stop once count*a overshoots
        if count * a > target:
            break
        if a + (count - 1) * pool[-1] < target:
            continue
        for rest in _small_parts(target - a, count - 1, pool, pool_set, i):
            yield (a, *rest)


def solve_value(value: int, S: Sequence[int], r: int, eps: Fraction, cap: int, allow_negative: bool = True,
                allow_zero: bool = False) -> list[tuple]:
    """All normalized tuples (w_1 <= ... <= w_{r-1}, w_r) for one integer value."""
    S = sorted(S)
    eps = _as_fraction(eps)
    T = window_bound(value, r, eps)
    if T > cap:
        raise CapExceeded(None, T, cap)
    if r == 1:
        if value != 0 and s_exponents(value, S) is not None and (allow_negative or value > 0):
            return [(value,)]
        return []
    found = []
    for wr in _signed(enumerate_s_integers(S, T), allow_negative):
        if not in_window(value, wr, r, eps):
            continue
        # |w_i| < |w_r|^(1/(1+eps)) for i < r
        base = [v for v in enumerate_s_integers(S, abs(wr)) if dominates(v, wr, eps)]
        pool = _signed(base, allow_negative)
        if allow_zero:
            pool = sorted(pool + [0])
        if not pool:
            continue
        for parts in _small_parts(value - wr, r - 1, pool, set(pool), 0):
            found.append((*parts, wr))
    return sorted(set(found))


def _make_solution(n: int, w: tuple, S: Sequence[int]) -> Solution:
    ex = tuple(s_exponents(v, S) if v else tuple(0 for _ in S) for v in w)
    signs = tuple((v > 0) - (v < 0) for v in w)
    return Solution(n, w, ex, signs)


def _solve_task(args):
    n, value, cfg = args
    try:
        return n, solve_value(value, cfg.S, cfg.r, cfg.eps, cfg.height_cap, cfg.allow_negative, cfg.allow_zero), None
    except CapExceeded as exc:
        return n, [], exc.window


@dataclass
class SolveResult:
    solutions: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (n, reason)
    cap_exceeded: list = field(default_factory=list)  # (n, window)

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)


def solve(Lz: SpecializedLRS, cfg: SUnitConfig, workers: int = 1) -> SolveResult:
    """Solutions for n_min <= n <= n_max; non-integral U_n are skipped with a reason."""
    result = SolveResult()
    tasks = []
    for n, u in zip(range(cfg.n_max + 1), iter_terms(Lz)):
        if n < cfg.n_min:
            continue
        if not u.is_rational():
            result.skipped.append((n, "U_n is not rational"))
            continue
        c = u.coords[0]
        if c.denominator != 1:
            result.skipped.append((n, "U_n is not an integer"))
            continue
        tasks.append((n, int(c), cfg))
    for n, tuples, window in pmap(_solve_task, tasks, workers):
        if window is not None:
            note = f"window {window} exceeds height_cap {cfg.height_cap}"
            result.cap_exceeded.append((n, window))
            result.skipped.append((n, note))
            log.warning("n=%d: %s", n, note)
            continue
        for w in tuples:
            sol = _make_solution(n, w, cfg.S)
            if cfg.check_independence:
                sol = _with_independence(Lz, sol)
            result.solutions.append(sol)
    return result


def _with_independence(Lz: SpecializedLRS, sol: Solution) -> Solution:
    from .bounds import multiplicative_relation

    K = Lz.field
    wr = K(sol.w[-1])
    bad = []
    for i, (f, a) in enumerate(zip(Lz.fvals, Lz.avals)):
        if f.is_zero() or a.is_zero():
            continue
        chk = multiplicative_relation([f, a, wr], exponent_bound=20)
        if not chk.independent:
            bad.append((Lz.order_map[i] + 1, chk.relation))
    return Solution(sol.n, sol.w, sol.exponent_matrix, sol.signs, tuple(bad))


def verify_solution(value: int, sol_w: tuple, S: Sequence[int], eps) -> bool:
    eps = _as_fraction(eps)
    if sum(sol_w) != value or sol_w[-1] == 0:
        return False
    if any(v != 0 and s_exponents(v, S) is None for v in sol_w):
        return False
    return all(dominates(v, sol_w[-1], eps) for v in sol_w[:-1])


def brute_oracle(value: int, S: Sequence[int], r: int, eps, cap: int, allow_negative: bool = True,
                 allow_zero: bool = False) -> list[tuple]:
    """Every r-tuple of signed S-integers bounded by cap with the right sum and dominance.

    Plain Cartesian enumeration of w_1..w_{r-1} (w_r is then forced by the sum), with
    no localization of w_r.  Tuples are normalized like solve's output.
    """
    if cap < abs(value):
        raise ValueError("cap must be >= |value|")
    eps = _as_fraction(eps)
    S = sorted(S)
    vals = np.array(_signed(enumerate_s_integers(S, cap), allow_negative), dtype=object)
    members = set(int(v) for v in vals)
    if r == 1:
        return [(value,)] if value in members else []
    small = list(vals) + ([0] if allow_zero else [])
    arr = np.array(small, dtype=np.int64) if cap < 2**40 else np.array(small, dtype=object)
    grids = np.meshgrid(*([arr] * (r - 1)), indexing="ij")
    flat = [g.ravel() for g in grids]
    wr = value - sum(flat)
    hit = np.isin(wr, np.array(sorted(members), dtype=arr.dtype))
    out = set()
    for idx in np.nonzero(hit)[0]:
        w = tuple(int(f[idx]) for f in flat) + (int(wr[idx]),)
        if abs(w[-1]) > cap:
            continue
        if all(dominates(v, w[-1], eps) for v in w[:-1]):
            out.add((*sorted(w[:-1]), w[-1]))
    return sorted(out)
