"""Minimum of |S_n ∩ nJ| / (λ(J) ε n) for J = [0, 1/4), ε = 1/2, 100 <= n <= 10^4, by gcd scan."""

from __future__ import annotations

import json
from fractions import Fraction
from math import gcd

from common import gcd_cap, rational_entry

EPS = Fraction(1, 2)
LAM = Fraction(1, 4)
N0, N1 = 100, 10_000


def run() -> dict:
    best = None
    onset_ok = True
    for n in range(N0, N1 + 1):
        d = gcd_cap(n, EPS)
        # a/n mod 1 in [0, 1/4): a = n (the point 0) or 4a < n
        count = 0
        phi = 0
        for a in range(1, n + 1):
            g = gcd(a, n)
            phi += g == 1
            if g <= d and (a == n or 4 * a < n):
                count += 1
        onset_ok &= 2 * count >= phi * LAM
        r = Fraction(count) / (LAM * EPS * n)
        if best is None or r < best[0]:
            best = (r, n)
    cfg = {"J": ["0", "1/4"], "eps": "1/2", "n_range": [N0, N1], "argmin": best[1], "onset_is_range_start": onset_ok}
    return {"lemma_S_min_ratio": rational_entry(best[0], "scripts/oracles/lemma_s.py", cfg)}


if __name__ == "__main__":
    print(json.dumps(run(), indent=2))
