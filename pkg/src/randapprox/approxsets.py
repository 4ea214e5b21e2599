"""Approximation sets E_n^A, their exact measures and overlaps, and the
closed-form expectations for the random sets E_n^Q.

E_n^A is the union over a in A of the open arcs ((a - psi)/n, (a + psi)/n)
on R/Z.  For psi <= 1/2 the arcs are pairwise disjoint, so the measure is
|A| * 2 psi / n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .circle import Arc, IntervalUnion, clip, intersect, measure, normalize
from .errors import InputError
from .numtheory import NumeratorSet, s_mask, s_set
from .sequences import SCALE, ProbSpec, PsiSpec, eval_p, eval_psi, psi_scaled
from .sweep import ArcBatch

DEFAULT_EXACT_BOUND = 5000
QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class ApproxSet:
    n: int
    kind: str
    numerators: NumeratorSet
    psi: Fraction
    union: IntervalUnion = field(repr=False)

    @property
    def measure(self) -> Fraction:
        return self.union.measure

    @property
    def scaled_psi(self) -> int:
        """psi * 2^64, for dyadic psi with at most 64 fractional bits."""
        k = self.psi * SCALE
        if k.denominator != 1:
            raise InputError(f"psi = {self.psi} is not a 64-bit dyadic rational")
        return int(k)


def build_E(A: NumeratorSet, psi_n) -> ApproxSet:
    psi_n = Fraction(psi_n)
    if not 0 <= psi_n <= Fraction(1, 2):
        raise InputError(f"psi_n must lie in [0, 1/2], got {psi_n}")
    n = A.n
    if psi_n == 0 or len(A) == 0:
        return ApproxSet(n, A.kind, A, psi_n, IntervalUnion((), _trusted=True))
    r = psi_n / n
    u = normalize((Fraction(a, n) - r, Fraction(a, n) + r) for a in A)
    return ApproxSet(n, A.kind, A, psi_n, u)


def e_s(n: int, psi: PsiSpec, eps) -> ApproxSet:
    """E_n^S for the configured psi."""
    return build_E(s_set(n, eps), eval_psi(psi, n))


def overlap(e1: ApproxSet, e2: ApproxSet, J: Arc | None = None) -> Fraction:
    u = intersect(e1.union, e2.union)
    if J is not None:
        u = clip(u, J)
    return measure(u)


def expected_measure_Q(n: int, psi: PsiSpec, p: ProbSpec, eps, J: Arc | None = None) -> Fraction:
    """E λ(E_n^Q ∩ J) = p_n λ(E_n^S ∩ J)."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    pn = eval_p(p, n).value
    if pn == 0:
        return Fraction(0)
    u = e_s(n, psi, eps).union
    if J is not None:
        u = clip(u, J)
    return pn * measure(u)


def expected_overlap_Q(m: int, n: int, psi: PsiSpec, p: ProbSpec, eps) -> Fraction:
    """E λ(E_m^Q ∩ E_n^Q): p_m p_n λ(E_m^S ∩ E_n^S) off the diagonal, p_n λ(E_n^S) on it."""
    if m < 1 or n < 1:
        raise InputError(f"indices must be >= 1, got ({m}, {n})")
    if m == n:
        return eval_p(p, n).value * e_s(n, psi, eps).measure
    pm, pn = eval_p(p, m).value, eval_p(p, n).value
    if pm == 0 or pn == 0:
        return Fraction(0)
    return pm * pn * overlap(e_s(m, psi, eps), e_s(n, psi, eps))


def arc_batch(sets: list[ApproxSet]) -> ArcBatch:
    return ArcBatch.from_centers(
        [e.n for e in sets], [e.numerators.members for e in sets], [e.scaled_psi for e in sets]
    )


# -- interval incidence between two levels ------------------------------------


def _mask_of(n: int, members: np.ndarray) -> np.ndarray:
    mask = np.zeros(n + 1, dtype=bool)  # index = numerator, slot 0 unused
    mask[members] = True
    return mask


def intersecting_pairs(
    m: int, n: int, k_m: int, k_n: int, mem_m: np.ndarray, mem_n: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All (a, b) with a in mem_m, b in mem_n whose open arcs around a/m and b/n meet.

    Half-widths are k_m/(m 2^64) and k_n/(n 2^64).  The arcs meet iff
    |a n - b m| * 2^64 < k_m n + k_n m for a suitable lift of b, which is an
    integer test.  Returns (a, b mod n in [1, n], b_lift) where b_lift/n is
    the lifted center on the real line.  Each (a, b_lift) is one connected
    piece of the intersection; a residue b can only appear under two lifts
    when an arc is wider than 1/4 of the circle gap, never for psi <= 1/4.
    """
    reach = k_m * n + k_n * m
    empty = np.zeros(0, dtype=np.int64)
    if reach == 0 or len(mem_m) == 0 or len(mem_n) == 0:
        return empty, empty, empty
    bound = (reach - 1) >> 64  # largest admissible |a n - b m|
    a = np.asarray(mem_m, dtype=np.int64)
    lo = -((bound - a * n) // m)  # ceil((a n - bound) / m)
    hi = (a * n + bound) // m
    width = int((hi - lo).max()) + 1 if a.size else 0
    if width <= 0:
        return empty, empty, empty
    b = lo[:, None] + np.arange(width, dtype=np.int64)[None, :]
    ok = b <= hi[:, None]
    red = (b - 1) % n + 1
    ok &= _mask_of(n, np.asarray(mem_n, dtype=np.int64))[red]
    rows, cols = np.nonzero(ok)
    return a[rows], red[rows, cols], b[rows, cols]


@dataclass(frozen=True)
class QkProfile:
    m: int
    n: int
    counts: tuple[int, ...]  # q_k for the intervals of E_m^S in numerator order
    bound: Fraction
    max_hits_per_n_interval: int

    @property
    def max(self) -> int:
        return max(self.counts, default=0)

    @property
    def bound_ok(self) -> bool:
        return self.max <= self.bound

    @property
    def single_ok(self) -> bool:
        return self.max_hits_per_n_interval <= 1


def _check_quarter(psi_val: Fraction, n: int) -> None:
    if not 0 <= psi_val <= QUARTER:
        raise InputError(f"psi({n}) = {psi_val} outside [0, 1/4]")


def qk_profile(
    m: int,
    n: int,
    psi: PsiSpec,
    eps,
    A_m: NumeratorSet | None = None,
    A_n: NumeratorSet | None = None,
) -> QkProfile:
    """q_k = number of intervals of E_n^S meeting the k-th interval of E_m^S."""
    if not 1 <= m < n:
        raise InputError(f"need 1 <= m < n, got m={m}, n={n}")
    psi_m, psi_n = eval_psi(psi, m), eval_psi(psi, n)
    _check_quarter(psi_m, m)
    _check_quarter(psi_n, n)
    mem_m = (A_m if A_m is not None else s_set(m, eps)).members
    mem_n = (A_n if A_n is not None else s_set(n, eps)).members
    bound = 2 * psi_m / m * n + 3
    a, b, _ = intersecting_pairs(m, n, psi_scaled(psi, m), psi_scaled(psi, n), mem_m, mem_n)
    idx = np.searchsorted(mem_m, a)
    counts = np.bincount(idx, minlength=len(mem_m))
    per_b = np.bincount(b, minlength=n + 1)
    return QkProfile(m, n, tuple(counts.tolist()), bound, int(per_b.max()) if b.size else 0)


@dataclass
class QkScanReport:
    n_max: int
    pairs: int = 0
    bound_violations: list[tuple[int, int]] = field(default_factory=list)
    single_violations: list[tuple[int, int]] = field(default_factory=list)
    max_slack: Fraction | None = None  # max over pairs of max q_k / bound

    @property
    def ok(self) -> bool:
        return not self.bound_violations and not self.single_violations


def qk_scan(n_max: int, psi: PsiSpec, eps, n_min: int = 1) -> QkScanReport:
    """Check the q_k bound and the single-intersection property for all n_min <= m < n <= n_max."""
    rep = QkScanReport(n_max)
    members = {n: s_set(n, eps).members for n in range(n_min, n_max + 1)}
    ks = {n: psi_scaled(psi, n) for n in members}
    for n in members:
        _check_quarter(eval_psi(psi, n), n)
    for n in range(n_min + 1, n_max + 1):
        for m in range(n_min, n):
            rep.pairs += 1
            a, b, _ = intersecting_pairs(m, n, ks[m], ks[n], members[m], members[n])
            if a.size == 0:
                continue
            qmax = int(np.bincount(a).max())
            # q_max <= 2 psi(m) n / m + 3  <=>  (q_max - 3) m 2^64 <= 2 k_m n
            if (qmax - 3) * m * SCALE > 2 * ks[m] * n:
                rep.bound_violations.append((m, n))
            if int(np.bincount(b).max()) > 1:
                rep.single_violations.append((m, n))
            ratio = Fraction(qmax * m * SCALE, 2 * ks[m] * n + 3 * m * SCALE)
            if rep.max_slack is None or ratio > rep.max_slack:
                rep.max_slack = ratio
    return rep


# -- overlap matrices ----------------------------------------------------------


@dataclass(frozen=True)
class OverlapRow:
    m: int
    n: int
    value: Fraction
    expected: Fraction


def overlap_rows(
    sets: dict[int, ApproxSet], psi: PsiSpec, p: ProbSpec, eps
) -> Iterator[OverlapRow]:
    """Rows m <= n of the realised overlap matrix next to its expectation."""
    ns = sorted(sets)
    for i, n in enumerate(ns):
        for m in ns[: i + 1]:
            value = sets[n].measure if m == n else overlap(sets[m], sets[n])
            yield OverlapRow(m, n, value, expected_overlap_Q(m, n, psi, p, eps))


def s_members(n: int, eps) -> np.ndarray:
    return np.flatnonzero(s_mask(n, eps)) + 1
