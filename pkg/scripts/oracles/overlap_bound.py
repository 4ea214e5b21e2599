"""C_N = E Σ_{m,n<=N} λ(E_m^Q ∩ E_n^Q) / ((Σ p_n ψ(n))² + Σ p_n ψ(n)) for N = 100, 200, ..., 2000.

Divergent test configuration: eps = 1/2, p_n = min(1, (ln n)^(-1/2)), psi(n) = min(1/2, 1/ln n).
The expectation uses p_m p_n λ(E_m^S ∩ E_n^S) off the diagonal and p_n λ(E_n^S) on it; the
off-diagonal part comes from a p-weighted integer sweep of the coverage count.
"""

from __future__ import annotations

import json
from fractions import Fraction

from common import TWO64, arcs_for, common_den, digest, integer_sweep, p_log_power, psi_inv_log, s_list

EPS = Fraction(1, 2)
GRID = list(range(100, 2001, 100))


def run() -> dict:
    top = GRID[-1]
    ks = [psi_inv_log(n) for n in range(1, top + 1)]
    thr = [p_log_power(n, EPS) for n in range(1, top + 1)]
    L = common_den(top, 1)
    arcs, lam = [], []
    for n in range(1, top + 1):
        s = s_list(n, EPS)
        arcs += arcs_for(n, s, ks[n - 1], L)
        lam.append(Fraction(len(s) * 2 * ks[n - 1], n * TWO64))
    table = integer_sweep(arcs, L, 1, GRID, weight_of=lambda n: thr[n - 1])
    cs = []
    for N, per_j in zip(GRID, table):
        second = per_j[0][1] / (TWO64 * TWO64)
        p = [Fraction(t, TWO64) for t in thr[:N]]
        lhs = second - sum(pn * pn * ln for pn, ln in zip(p, lam)) + sum(pn * ln for pn, ln in zip(p, lam))
        s = sum(pn * Fraction(k, TWO64) for pn, k in zip(p, ks))
        cs.append(lhs / (s * s + s))
    return {
        "overlap_bound_C": {
            "value": [f"{c.numerator}/{c.denominator}" for c in cs],
            "decimal": [f"{float(c):.15g}" for c in cs],
            "sha256": digest(cs),
            "oracle": "scripts/oracles/overlap_bound.py",
            "config": {"eps": "1/2", "psi": "min(1/2, 1/ln n)", "p": "min(1, (ln n)^(-1/2))", "N_grid": GRID},
        }
    }


if __name__ == "__main__":
    print(json.dumps(run(), indent=2))
