"""Slow, independent reference computations used as test oracles.

Nothing here goes through the package's fast paths: logarithms come from
mpmath, sets from plain gcd scans, and measures from evaluating membership
at the midpoints of a fine rational grid.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import gcd, lcm

import mpmath

mpmath.mp.prec = 256
TWO64 = 1 << 64
MASK = TWO64 - 1


def dyadic_floor(x) -> int:
    return int(mpmath.floor(x * TWO64))


def inv_log_scaled(n: int, cap=Fraction(1, 2)) -> int:
    capk = int(cap * TWO64)
    if n == 1:
        return capk
    return min(capk, dyadic_floor(1 / mpmath.log(n)))


def gcd_cap(n: int, eps: Fraction) -> int:
    if n < 3:
        return 1
    t = mpmath.log(n) ** (mpmath.mpf(eps.numerator) / (2 * eps.denominator))
    return max(1, int(mpmath.floor(t)))


def s_list(n: int, eps) -> list[int]:
    d = gcd_cap(n, Fraction(eps))
    return [a for a in range(1, n + 1) if gcd(a, n) <= d]


def totient(n: int) -> int:
    return sum(1 for a in range(1, n + 1) if gcd(a, n) == 1)


def splitmix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def prf(seed: int, n: int, a: int) -> int:
    key = splitmix((seed + n * 0x9E3779B97F4A7C15) & MASK)
    return splitmix((key + a * 0xC2B2AE3D27D4EB4F) & MASK)


def arcs_of(n: int, members, psi: Fraction) -> list[tuple[Fraction, Fraction]]:
    return [(Fraction(a, n) - psi / n, Fraction(a, n) + psi / n) for a in members]


def inside(x: Fraction, arcs) -> bool:
    """Membership of x (mod 1) in a union of open real-line arcs of length <= 1."""
    x = x % 1
    for lo, hi in arcs:
        for y in (x - 1, x, x + 1):
            if lo < y < hi:
                return True
    return False


def grid_measure(arcs_list, L: int, J: tuple[Fraction, Fraction] = (Fraction(0), Fraction(1))) -> Fraction:
    """Measure of the intersection of the given unions, clipped to J.

    All endpoints must be multiples of 1/L; then every cell (k/L, (k+1)/L) is
    either inside or outside, and its midpoint decides which.
    """
    total = 0
    for k in range(L):
        x = Fraction(2 * k + 1, 2 * L)
        if not J[0] <= x < J[1]:
            continue
        if all(inside(x, arcs) for arcs in arcs_list):
            total += 1
    return Fraction(total, L)


def common_grid(*fracs: Fraction) -> int:
    return lcm(*(f.denominator for f in fracs))


def exhaustive_overlap(m: int, n: int, Sm, Sn, psi: Fraction, pm: Fraction, pn: Fraction) -> Fraction:
    """E λ(E_m^Q ∩ E_n^Q) by summing over every subset configuration."""
    L = common_grid(*(Fraction(1, 2 * m), Fraction(1, 2 * n), psi / m, psi / n))
    total = Fraction(0)
    for bits_m in product((0, 1), repeat=len(Sm)):
        for bits_n in product((0, 1), repeat=len(Sn)):
            prob = Fraction(1)
            for b in bits_m:
                prob *= pm if b else 1 - pm
            for b in bits_n:
                prob *= pn if b else 1 - pn
            Am = [a for a, b in zip(Sm, bits_m) if b]
            An = [a for a, b in zip(Sn, bits_n) if b]
            if not Am or not An:
                continue
            total += prob * grid_measure([arcs_of(m, Am, psi), arcs_of(n, An, psi)], L)
    return total
