"""Sieves, totients, and the partially reduced numerator sets S_n.

S_n keeps the numerators a in [n] whose gcd with n is at most
T(n) = max(1, (ln n)^(eps/2)).  Since gcds are integers, membership reduces
to ``gcd(a, n) <= D(n)`` with D(n) = floor(T(n)), and D(n) is decided once
per (n, eps) by the log comparison ``(2/eps) ln d <= ln ln n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Iterator

import mpmath
import numpy as np

from .circle import Arc
from .errors import InputError, ResourceError

DEFAULT_MEMORY_BUDGET = 10**8  # table entries
_CMP_PREC = 113  # quad precision for the threshold comparison


@dataclass(frozen=True, eq=False)
class SieveTables:
    """Smallest-prime-factor and Euler-totient tables for 0 <= n <= n_max."""

    n_max: int
    spf: np.ndarray
    phi: np.ndarray

    def factorize(self, n: int) -> list[tuple[int, int]]:
        if not 1 <= n <= self.n_max:
            raise InputError(f"{n} outside sieve range [1, {self.n_max}]")
        out: list[tuple[int, int]] = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def divisors(self, n: int) -> list[int]:
        divs = [1]
        for p, e in self.factorize(n):
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)


def build_sieve(n_max: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> SieveTables:
    if n_max < 2:
        raise InputError(f"sieve needs n_max >= 2, got {n_max}")
    if n_max + 1 > memory_budget:
        raise ResourceError(f"sieve of size {n_max} exceeds the budget of {memory_budget} entries")
    spf = np.zeros(n_max + 1, dtype=np.int64)
    for p in range(2, int(n_max**0.5) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.arange(n_max + 1)
    primes = (spf == 0) & (idx >= 2)
    spf[primes] = idx[primes]
    phi = idx.copy()
    for p in np.flatnonzero(primes):
        phi[p::p] -= phi[p::p] // p
    return SieveTables(n_max, spf, phi)


_SIEVE: SieveTables | None = None


def get_sieve(n: int) -> SieveTables:
    """Shared sieve covering at least n, grown by doubling on demand."""
    global _SIEVE
    if _SIEVE is None or _SIEVE.n_max < n:
        size = max(1 << 12, 1 << (max(n, 2) - 1).bit_length())
        _SIEVE = build_sieve(size)
    return _SIEVE


def totient(n: int) -> int:
    if n < 1:
        raise InputError(f"totient needs n >= 1, got {n}")
    return int(get_sieve(n).phi[n])


def divisors(n: int) -> list[int]:
    return get_sieve(n).divisors(n)


# -- partial reduction -------------------------------------------------------


def _as_eps(eps) -> Fraction:
    e = Fraction(eps)
    if e <= 0:
        raise InputError(f"eps must be positive, got {eps}")
    return e


@lru_cache(maxsize=1 << 16)
def _gcd_bound(n: int, eps: Fraction) -> int:
    if n < 3:
        # ln ln n is undefined or negative: only the floor T(n) >= 1 applies
        return 1
    with mpmath.workprec(_CMP_PREC):
        rhs = mpmath.log(mpmath.log(n))
        factor = mpmath.mpf(2 * eps.denominator) / eps.numerator
        d = 1
        # tie policy: equality admits d
        while factor * mpmath.log(d + 1) <= rhs:
            d += 1
    return d


def gcd_bound(n: int, eps) -> int:
    """D(n) = largest integer d with d <= T(n); always at least 1."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    return _gcd_bound(n, _as_eps(eps))


def s_threshold(n: int, eps) -> float:
    """T(n) = max(1, (ln n)^(eps/2)) as a float, for reporting only."""
    e = float(_as_eps(eps))
    if n < 3:
        return 1.0
    return max(1.0, float(mpmath.log(n)) ** (e / 2))


def s_membership(a: int, n: int, eps) -> bool:
    if not 1 <= a <= n:
        raise InputError(f"numerator {a} outside [1, {n}]")
    return gcd(a, n) <= gcd_bound(n, eps)


class NumeratorSet:
    """A finite subset of [n] standing for P_n, S_n, Q_n, or an explicit set."""

    __slots__ = ("n", "members", "kind")

    def __init__(self, n: int, members: Iterable[int] | np.ndarray, kind: str = "explicit"):
        arr = np.unique(np.asarray(list(members) if not isinstance(members, np.ndarray) else members, dtype=np.int64))
        if arr.size and (arr[0] < 1 or arr[-1] > n):
            raise InputError(f"members must lie in [1, {n}]")
        arr.setflags(write=False)
        self.n = n
        self.members = arr
        self.kind = kind

    def __len__(self) -> int:
        return int(self.members.size)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members.tolist())

    def __contains__(self, a: int) -> bool:
        i = int(np.searchsorted(self.members, a))
        return i < self.members.size and int(self.members[i]) == a

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NumeratorSet)
            and self.n == other.n
            and np.array_equal(self.members, other.members)
        )

    def __repr__(self) -> str:
        head = self.members[:8].tolist()
        return f"NumeratorSet(n={self.n}, kind={self.kind}, size={len(self)}, head={head})"

    def tolist(self) -> list[int]:
        return self.members.tolist()


def s_mask(n: int, eps) -> np.ndarray:
    """Boolean mask over a = 1..n of membership in S_n."""
    a = np.arange(1, n + 1, dtype=np.int64)
    return np.gcd(a, n) <= gcd_bound(n, eps)


def s_set(n: int, eps) -> NumeratorSet:
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    return NumeratorSet(n, np.flatnonzero(s_mask(n, eps)) + 1, kind="S")


def arc_mask(n: int, arc: Arc, a: np.ndarray | None = None) -> np.ndarray:
    """Which numerators a (default 1..n) have a/n mod 1 inside the arc."""
    if a is None:
        a = np.arange(1, n + 1, dtype=np.int64)
    r = a % n  # a = n sits at 0
    lo, hi = arc.lo, arc.hi
    # a/n >= lo  <=>  r * lo.den >= lo.num * n   (all exact in int64 for desk-scale n)
    def ge(num, den):
        return r * den >= num * n

    def gt(num, den):
        return r * den > num * n

    lo_ok = ge(lo.numerator, lo.denominator) if arc.half_open else gt(lo.numerator, lo.denominator)
    if hi <= 1:
        return lo_ok & ~ge(hi.numerator, hi.denominator)
    w = hi - 1
    return lo_ok | ~ge(w.numerator, w.denominator)


def s_count_in_arc(n: int, eps, arc: Arc) -> int:
    """|S_n ∩ nJ| counted with the arc's own boundary semantics."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    return int(np.count_nonzero(s_mask(n, eps) & arc_mask(n, arc)))


def phi_divisor_sum(n: int, t) -> int:
    """Sum of phi(n/d) over divisors d of n with d <= t."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    phi = get_sieve(n).phi
    return int(sum(int(phi[n // d]) for d in divisors(n) if d <= t))


def s_decompose(n: int, eps) -> dict[int, NumeratorSet]:
    """S_n split by gcd: d -> {d*b : b in [n/d], gcd(b, n/d) = 1} for d | n, d <= D(n)."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    bound = gcd_bound(n, eps)
    out: dict[int, NumeratorSet] = {}
    for d in divisors(n):
        if d > bound:
            break
        m = n // d
        b = np.arange(1, m + 1, dtype=np.int64)
        out[d] = NumeratorSet(n, d * b[np.gcd(b, m) == 1], kind="explicit")
    return out
