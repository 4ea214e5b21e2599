"""Brute-force reference routines shared by the oracle scripts.

Nothing here imports the package: transcendental values come from mpmath,
the PRF is a plain-integer transcription, numerator sets come from gcd
scans, and measures come from an integer sweep over a common denominator.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from math import gcd, lcm

import mpmath

mpmath.mp.prec = 256
TWO64 = 1 << 64
MASK = TWO64 - 1


def splitmix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def prf(seed: int, n: int, a: int) -> int:
    key = splitmix((seed + n * 0x9E3779B97F4A7C15) & MASK)
    return splitmix((key + a * 0xC2B2AE3D27D4EB4F) & MASK)


def dyadic_floor(x) -> int:
    return int(mpmath.floor(x * TWO64))


def psi_inv_log(n: int, cap=Fraction(1, 2)) -> int:
    """2^64 * min(cap, 1/ln n), rounded down."""
    capk = int(cap * TWO64)
    if n == 1:
        return capk
    return min(capk, dyadic_floor(1 / mpmath.log(n)))


def p_log_power(n: int, eps: Fraction) -> int:
    """Threshold floor(2^64 * min(1, (ln n)^(-eps)))."""
    if n == 1:
        return TWO64
    v = mpmath.log(n) ** (-mpmath.mpf(eps.numerator) / eps.denominator)
    return TWO64 if v >= 1 else dyadic_floor(v)


def gcd_cap(n: int, eps: Fraction) -> int:
    """floor(max(1, (ln n)^(eps/2)))."""
    if n < 3:
        return 1
    t = mpmath.log(n) ** (mpmath.mpf(eps.numerator) / (2 * eps.denominator))
    return max(1, int(mpmath.floor(t)))


def s_list(n: int, eps: Fraction) -> list[int]:
    d = gcd_cap(n, eps)
    return [a for a in range(1, n + 1) if gcd(a, n) <= d]


def checkpoints(weights: list[Fraction], cap: int) -> list[int]:
    """Least N with Σ_{n<=N} w_n >= t^2, t = 1, 2, ..., for N <= cap."""
    out, s, t = [], Fraction(0), 1
    for n in range(1, cap + 1):
        s += weights[n - 1]
        while s >= t * t:
            out.append(n)
            t += 1
    return out


def integer_sweep(arcs, L: int, M: int, uptos, weight_of=None):
    """Exact ∫_J c and ∫_J c^2 per partition arc, where c is the (weighted) count.

    ``arcs`` are (band, lo, hi) with lo, hi integers in units of 1/L on the real
    line (0 <= lo < hi <= L after splitting at 0).  Returns, for each cutoff in
    ``uptos``, a list over J of (first, second) as Fractions.
    """
    events = []
    for band, lo, hi in arcs:
        events.append((lo, band, 1))
        events.append((hi, band, -1))
    events.sort(key=lambda e: e[0])
    step = L // M
    results = []
    for upto in uptos:
        first = [0] * M
        second = [0] * M
        c = 0
        pos = 0
        bounds = [j * step for j in range(M + 1)]

        def add(x0, x1, c):
            # add c over [x0, x1) split by partition boundaries
            if c == 0 or x1 <= x0:
                return
            j = x0 // step
            while x0 < x1:
                end = min(x1, bounds[j + 1])
                first[j] += c * (end - x0)
                second[j] += c * c * (end - x0)
                x0 = end
                j += 1

        for x, band, d in events:
            if band > upto:
                continue
            add(pos, x, c)
            pos = x
            c += d * (weight_of(band) if weight_of else 1)
        add(pos, L, c)
        results.append([(Fraction(f, L), Fraction(s, L)) for f, s in zip(first, second)])
    return results


def arcs_for(n: int, members, k: int, L: int):
    """Integer arcs of half-width k/(n 2^64) around a/n, in units of 1/L, split at 0."""
    unit = L // n
    half = L * k // (n * TWO64)
    assert half * n * TWO64 == L * k
    out = []
    for a in members:
        c = (a % n) * unit
        lo, hi = c - half, c + half
        if lo < 0:
            out.append((n, lo + L, L))
            out.append((n, 0, hi))
        else:
            out.append((n, lo, hi))
    return out


def common_den(n_max: int, M: int) -> int:
    return lcm(*range(1, n_max + 1), M) * TWO64


def digest(values) -> str:
    text = "\n".join(f"{v.numerator}/{v.denominator}" for v in values)
    return hashlib.sha256(text.encode()).hexdigest()


def rational_entry(value: Fraction, oracle: str, config: dict) -> dict:
    return {
        "value": f"{value.numerator}/{value.denominator}",
        "decimal": f"{float(value):.15g}",
        "oracle": oracle,
        "config": config,
    }
