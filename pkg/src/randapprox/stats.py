"""The QIA statistic, Monte Carlo estimators, and the empirical verifiers.

The verifiers never assert a universal constant.  They compute empirical
constants on declared grids, and the CI checks compare against values frozen
from independent oracle runs (see ``frozen_thresholds.json``).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import floor
from typing import Any, Callable, Sequence

import numpy as np

from .approxsets import intersecting_pairs
from .circle import Arc
from .errors import InputError
from .numtheory import arc_mask, s_mask, totient
from .randmodel import below_threshold, prf64_array, trial_seeds
from .sequences import (
    SCALE,
    ProbSpec,
    PsiSpec,
    eval_p,
    eval_psi,
    format_rational,
    p_range,
    partial_sum,
    psi_scaled_range,
)
from .sweep import ArcBatch, Sweep

MIN_STABLE_TRIALS = 1000
DEFAULT_TAU = Fraction(1, 10)


# -- frozen oracle values ------------------------------------------------------


@lru_cache(maxsize=1)
def frozen_thresholds() -> dict[str, dict[str, Any]]:
    text = resources.files("randapprox").joinpath("frozen_thresholds.json").read_text()
    return json.loads(text)


def frozen_value(name: str):
    """A frozen oracle value: a Fraction, or a list of Fractions for sequences."""
    entry = frozen_thresholds()[name]
    v = entry["value"]
    if isinstance(v, list):
        return [Fraction(x) for x in v]
    return Fraction(v)


def frozen_block(*names: str) -> dict[str, dict[str, Any]]:
    table = frozen_thresholds()
    return {k: table[k] for k in names if k in table}


def _dec(x: Fraction | None, digits: int = 12) -> str | None:
    if x is None:
        return None
    return f"{float(x):.{digits}g}"


# -- QIA -----------------------------------------------------------------------


@dataclass(frozen=True)
class QiaReport:
    N: int
    numerator: Fraction
    denominator: Fraction
    ratio: Fraction | None  # None when everything is zero
    ratio_over_lambda: Fraction | None
    t: int | None = None
    j_index: int | None = None

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "N": self.N,
            "J_index": self.j_index,
            "numerator": format_rational(self.numerator),
            "denominator": format_rational(self.denominator),
            "ratio": None if self.ratio is None else format_rational(self.ratio),
            "ratio_over_lambdaJ": None if self.ratio_over_lambda is None else format_rational(self.ratio_over_lambda),
        }


def qia_from_sums(first: Fraction, second: Fraction) -> Fraction | None:
    """(Σ λ(E_n))² / Σ λ(E_m ∩ E_n), or None when both vanish."""
    if second == 0:
        if first != 0:
            raise InputError("nonzero measures with zero overlap sum: diagonal missing")
        return None
    return first * first / second


def qia_ratio(measures: Sequence[Fraction], overlaps: Sequence[Sequence[Fraction]], N: int | None = None) -> Fraction | None:
    """QIA ratio over the first N levels from explicit measures and overlap matrix."""
    N = len(measures) if N is None else N
    if N > len(measures) or len(overlaps) < N:
        raise InputError(f"need at least {N} levels")
    for i in range(N):
        if Fraction(overlaps[i][i]) != Fraction(measures[i]):
            raise InputError(f"overlap diagonal {i} differs from the measure")
        for j in range(i):
            if Fraction(overlaps[i][j]) != Fraction(overlaps[j][i]):
                raise InputError(f"overlap matrix not symmetric at ({i}, {j})")
    first = sum((Fraction(x) for x in measures[:N]), Fraction(0))
    second = sum((Fraction(overlaps[i][j]) for i in range(N) for j in range(N)), Fraction(0))
    return qia_from_sums(first, second)


# -- generic Monte Carlo -------------------------------------------------------


@dataclass(frozen=True)
class McEstimate:
    trials: int
    mean: Fraction | float
    variance: Fraction | float
    stderr: float

    def to_dict(self) -> dict:
        def enc(x):
            return format_rational(x) if isinstance(x, Fraction) else x

        return {"trials": self.trials, "mean": enc(self.mean), "variance": enc(self.variance), "stderr": self.stderr}


def _estimate(values: list, trials: int) -> McEstimate:
    if all(isinstance(v, (int, Fraction)) for v in values):
        vals = [Fraction(v) for v in values]
        mean = sum(vals, Fraction(0)) / trials
        var = sum(((v - mean) ** 2 for v in vals), Fraction(0)) / (trials - 1)
        return McEstimate(trials, mean, var, math.sqrt(var / trials))
    arr = np.asarray(values, dtype=np.float64)
    mean = float(np.sum(arr) / trials)
    var = float(np.sum((arr - mean) ** 2) / (trials - 1))
    return McEstimate(trials, mean, var, math.sqrt(var / trials))


def mc_estimate(statistic: Callable[[int], Any], trials: int, base_seed: int, start: int = 0) -> McEstimate:
    """Mean and unbiased variance of statistic(seed_t) over trial seeds t = start..start+trials-1.

    Exact (Fraction) arithmetic is used whenever the statistic returns ints
    or Fractions; otherwise float64 with numpy's fixed pairwise summation.
    """
    if trials < 2:
        raise InputError(f"need at least 2 trials, got {trials}")
    seeds = trial_seeds(base_seed, trials, start)
    return _estimate([statistic(int(s)) for s in seeds], trials)


# -- S-set counting --------------------------------------------------------------


@dataclass
class LemmaSReport:
    eps: Fraction
    J: Arc
    n_range: tuple[int, int]
    onset: int | None
    min_ratio: Fraction | None
    argmin: int | None
    table: list[tuple[int, int, Fraction]] = field(repr=False)  # (n, |S_n ∩ nJ|, ratio)
    frozen: Fraction | None = None

    @property
    def status(self) -> str:
        if self.frozen is None:
            return "computed"
        return "pass" if self.min_ratio is not None and self.min_ratio >= self.frozen else "fail"

    def to_dict(self) -> dict:
        return {
            "eps": format_rational(self.eps),
            "J": [format_rational(self.J.lo), format_rational(self.J.hi)],
            "n_range": list(self.n_range),
            "onset": self.onset,
            "min_ratio": None if self.min_ratio is None else format_rational(self.min_ratio),
            "min_ratio_decimal": _dec(self.min_ratio),
            "argmin": self.argmin,
            "status": self.status,
        }


def verify_lemma_S(n_range: tuple[int, int], eps, J: Arc, frozen: Fraction | None = None) -> LemmaSReport:
    """r(n) = |S_n ∩ nJ| / (λ(J) ε n) over the range, minimised after the empirical onset.

    The onset is the least n in the range from which |S_n ∩ nJ| >= φ(n) λ(J) / 2
    holds for every later n in the range.
    """
    eps = Fraction(eps)
    n0, n1 = n_range
    if not 1 <= n0 <= n1:
        raise InputError(f"bad range {n_range}")
    lam = J.length
    table = []
    good = []
    for n in range(n0, n1 + 1):
        c = int(np.count_nonzero(s_mask(n, eps) & arc_mask(n, J)))
        table.append((n, c, Fraction(c) / (lam * eps * n)))
        good.append(2 * c >= totient(n) * lam)
    onset = None
    for i in range(len(good) - 1, -1, -1):
        if not good[i]:
            break
        onset = table[i][0]
    tail = [row for row in table if onset is not None and row[0] >= onset]
    best = min(tail, key=lambda r: (r[2], r[0])) if tail else None
    return LemmaSReport(
        eps, J, (n0, n1), onset, best[2] if best else None, best[0] if best else None, table, frozen
    )


# -- overlap-sum bound --------------------------------------------------------


def _trend(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ys on xs."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.size < 2:
        return 0.0
    x = x - x.mean()
    return float(np.dot(x, y - y.mean()) / np.dot(x, x))


def bounded_trend(ns: Sequence[int], cs: Sequence[float], tol: float) -> tuple[float, bool]:
    """Slope of C against ln N, and whether the fitted growth across the grid stays
    within tol * max(C)."""
    if not cs:
        return 0.0, True
    slope = _trend([math.log(n) for n in ns], cs)
    growth = slope * (math.log(max(ns)) - math.log(min(ns))) if len(ns) > 1 else 0.0
    return slope, growth <= tol * max(cs)


@dataclass
class OverlapBoundRow:
    N: int
    lhs: Fraction
    rhs_core: Fraction
    rhs_linear: Fraction

    @property
    def C(self) -> Fraction | None:
        rhs = self.rhs_core + self.rhs_linear
        return None if rhs == 0 else self.lhs / rhs


@dataclass
class OverlapBoundReport:
    rows: list[OverlapBoundRow]
    slope: float
    bounded: bool
    frozen: list[Fraction] | None = None

    @property
    def C(self) -> Fraction | None:
        cs = [r.C for r in self.rows if r.C is not None]
        return max(cs) if cs else None

    @property
    def status(self) -> str:
        if not self.bounded:
            return "fail"
        if self.frozen is None:
            return "pass"
        return "pass" if [r.C for r in self.rows] == self.frozen else "fail"

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "N": r.N,
                    "lhs": format_rational(r.lhs),
                    "rhs_core": format_rational(r.rhs_core),
                    "rhs_linear": format_rational(r.rhs_linear),
                    "C": None if r.C is None else format_rational(r.C),
                    "C_decimal": _dec(r.C),
                }
                for r in self.rows
            ],
            "C": None if self.C is None else format_rational(self.C),
            "slope_vs_logN": self.slope,
            "bounded": self.bounded,
            "status": self.status,
        }


def _common_weights(values: Sequence[Fraction]) -> tuple[list[int], int]:
    den = math.lcm(*[v.denominator for v in values]) if values else 1
    return [int(v * den) for v in values], den


def expected_overlap_sums(N_grid: Sequence[int], psi: PsiSpec, p: ProbSpec, eps) -> list[OverlapBoundRow]:
    """E Σ_{m,n<=N} λ(E_m^Q ∩ E_n^Q) for every N in the grid, by one weighted sweep.

    With weights p_n the sweep yields Σ_{m,n} p_m p_n λ(E_m^S ∩ E_n^S),
    including p_n² λ(E_n^S) on the diagonal, which is then swapped for the
    p_n λ(E_n^S) convention of the overlap sums.
    """
    grid = sorted(set(N_grid))
    if not grid or grid[0] < 1:
        raise InputError(f"bad grid {N_grid}")
    top = grid[-1]
    ks = psi_scaled_range(psi, 1, top)
    ps = [v.value for v in p_range(p, 1, top)]
    mems = [np.flatnonzero(s_mask(n, eps)) + 1 for n in range(1, top + 1)]
    batch = ArcBatch.from_centers(range(1, top + 1), mems, ks)
    w_int, den = _common_weights(ps)
    weights = np.array([w_int[int(b) - 1] for b in batch.band], dtype=object)
    sweep = Sweep(batch, 1)
    rows = []
    lam = [Fraction(len(mems[n - 1]) * 2 * ks[n - 1], n * SCALE) for n in range(1, top + 1)]
    for N in grid:
        second = sweep.moments(upto=N, weights=weights, want=("second",))[0].second / (den * den)
        diag_sq = sum((ps[n - 1] ** 2 * lam[n - 1] for n in range(1, N + 1)), Fraction(0))
        diag = sum((ps[n - 1] * lam[n - 1] for n in range(1, N + 1)), Fraction(0))
        s = partial_sum(psi, p, N)
        rows.append(OverlapBoundRow(N, second - diag_sq + diag, s * s, s))
    return rows


def verify_overlap_bound(
    N_grid: Sequence[int], psi: PsiSpec, p: ProbSpec, eps, trend_tol: float = 0.1, frozen: list[Fraction] | None = None
) -> OverlapBoundReport:
    rows = expected_overlap_sums(N_grid, psi, p, eps)
    pts = [(r.N, float(r.C)) for r in rows if r.C is not None]
    slope, ok = bounded_trend([n for n, _ in pts], [c for _, c in pts], trend_tol)
    return OverlapBoundReport(rows, slope, ok, frozen)


# -- pairwise Monte Carlo over the extended space (P, J) ------------------------


def _segment_in_partition(lo: Fraction, hi: Fraction, m: int) -> list[tuple[int, Fraction]]:
    """Lengths of the real segment (lo, hi), taken mod 1, inside each [i/m, (i+1)/m)."""
    shift = floor(lo)
    lo, hi = lo - shift, hi - shift
    pieces = [(lo, min(hi, Fraction(1)))]
    if hi > 1:
        pieces.append((Fraction(0), hi - 1))
    out: dict[int, Fraction] = {}
    for a, b in pieces:
        for i in range(floor(a * m), min(m, floor(b * m) + 1)):
            x = max(a, Fraction(i, m))
            y = min(b, Fraction(i + 1, m))
            if y > x:
                out[i] = out.get(i, Fraction(0)) + (y - x)
    return sorted(out.items())


@dataclass
class PairAtoms:
    """Exact pieces I^m_a ∩ I^n_b ∩ J_i over pairs m <= n <= N.

    A trial realises λ(E_m^Q ∩ E_n^Q ∩ J) as the sum of the atom lengths whose
    two numerators are both selected and whose partition index is the
    trial's J.  Slots enumerate the candidates (n, a), a in S_n.
    """

    N: int
    M: int
    pairs: list[tuple[int, int]]
    slot_n: np.ndarray
    slot_a: np.ndarray
    slot_thr: list[int]
    atom_pair: np.ndarray
    atom_j: np.ndarray
    atom_sa: np.ndarray
    atom_sb: np.ndarray
    atom_len: list[Fraction]

    def overlap_S(self) -> dict[tuple[int, int], Fraction]:
        """λ(E_m^S ∩ E_n^S), summed over the partition."""
        out = {pr: Fraction(0) for pr in self.pairs}
        for i, length in zip(self.atom_pair.tolist(), self.atom_len):
            out[self.pairs[i]] += length
        return out


def build_pair_atoms(N: int, psi: PsiSpec, p: ProbSpec, eps, M: int = 1) -> PairAtoms:
    if N < 1 or M < 1:
        raise InputError(f"need N >= 1 and M >= 1, got N={N}, M={M}")
    ks = {n: k for n, k in zip(range(1, N + 1), psi_scaled_range(psi, 1, N))}
    mems = {n: np.flatnonzero(s_mask(n, eps)) + 1 for n in range(1, N + 1)}
    base = {}
    slot_n, slot_a, slot_thr = [], [], []
    for n in range(1, N + 1):
        base[n] = len(slot_n)
        thr = eval_p(p, n).threshold
        for a in mems[n].tolist():
            slot_n.append(n)
            slot_a.append(a)
            slot_thr.append(thr)
    pairs: list[tuple[int, int]] = []
    ap, aj, sa, sb, ln = [], [], [], [], []
    for n in range(1, N + 1):
        for m in range(1, n + 1):
            pi = len(pairs)
            pairs.append((m, n))
            if m == n:
                d = Fraction(ks[n], n * SCALE)
                if d == 0:
                    continue
                for idx, a in enumerate(mems[n].tolist()):
                    c = Fraction(a, n)
                    for j, length in _segment_in_partition(c - d, c + d, M):
                        ap.append(pi); aj.append(j); ln.append(length)
                        sa.append(base[n] + idx); sb.append(base[n] + idx)
                continue
            a, _, b_lift = intersecting_pairs(m, n, ks[m], ks[n], mems[m], mems[n])
            dm, dn = Fraction(ks[m], m * SCALE), Fraction(ks[n], n * SCALE)
            ia = np.searchsorted(mems[m], a)
            ib = np.searchsorted(mems[n], (b_lift - 1) % n + 1)
            for x, y, i1, i2 in zip(a.tolist(), b_lift.tolist(), ia.tolist(), ib.tolist()):
                c1, c2 = Fraction(x, m), Fraction(y, n)
                lo, hi = max(c1 - dm, c2 - dn), min(c1 + dm, c2 + dn)
                for j, length in _segment_in_partition(lo, hi, M):
                    ap.append(pi); aj.append(j); ln.append(length)
                    sa.append(base[m] + i1); sb.append(base[n] + i2)
    return PairAtoms(
        N, M, pairs,
        np.array(slot_n, dtype=np.uint64), np.array(slot_a, dtype=np.uint64), slot_thr,
        np.array(ap, dtype=np.int64), np.array(aj, dtype=np.int64),
        np.array(sa, dtype=np.int64), np.array(sb, dtype=np.int64), ln,
    )


@dataclass
class PairMcResult:
    trials: int
    pairs: list[tuple[int, int]]
    mean: list[Fraction]  # exact sample means of Y_mn
    var: np.ndarray  # unbiased sample variances of Y_mn
    total_var: float  # unbiased sample variance of X = Σ_{m,n} Y_mn over ordered pairs
    total_mean: float


def _trial_partition(seeds: np.ndarray, M: int) -> np.ndarray:
    h = prf64_array(seeds, 0, 0)
    return np.array([(int(x) * M) >> 64 for x in h], dtype=np.int64)


def run_pair_mc(atoms: PairAtoms, trials: int, base_seed: int, batch: int = 64) -> PairMcResult:
    """Monte Carlo over (P, J): trial t uses the oracle keyed by trial_seed(base, t)."""
    if trials < 2:
        raise InputError(f"need at least 2 trials, got {trials}")
    P = len(atoms.pairs)
    order = np.argsort(atoms.atom_pair, kind="stable")
    apair = atoms.atom_pair[order]
    aj, sa, sb = atoms.atom_j[order], atoms.atom_sa[order], atoms.atom_sb[order]
    alen = [atoms.atom_len[i] for i in order.tolist()]
    lenf = np.array([float(x) for x in alen], dtype=np.float64)
    starts = np.flatnonzero(np.concatenate([[True], apair[1:] != apair[:-1]])) if apair.size else np.zeros(0, dtype=np.int64)
    present = apair[starts] if apair.size else np.zeros(0, dtype=np.int64)
    mult = np.array([1.0 if m == n else 2.0 for m, n in atoms.pairs])
    # shift each pair by a float centre close to its mean to keep the one-pass variance stable
    centre = np.zeros(P)
    if apair.size:
        np.add.at(centre, apair, lenf)
        thr_f = np.array([t / SCALE for t in atoms.slot_thr])
        sel_p = thr_f[sa] * np.where(sa == sb, 1.0, thr_f[sb])
        centre = np.zeros(P)
        np.add.at(centre, apair, lenf * sel_p / atoms.M)
    counts = np.zeros(apair.size, dtype=np.int64)
    s1 = np.zeros(P)
    s2 = np.zeros(P)
    xs = []
    for t0 in range(0, trials, batch):
        b = min(batch, trials - t0)
        seeds = trial_seeds(base_seed, b, t0)
        jt = _trial_partition(seeds, atoms.M)
        h = prf64_array(seeds[:, None], atoms.slot_n[None, :], atoms.slot_a[None, :])
        sel = below_threshold(h, atoms.slot_thr)
        hit = sel[:, sa] & sel[:, sb] & (jt[:, None] == aj[None, :])
        counts += hit.sum(axis=0)
        y = np.zeros((b, P))
        if apair.size:
            y[:, present] = np.add.reduceat(hit * lenf[None, :], starts, axis=1)
        d = y - centre[None, :]
        s1 += d.sum(axis=0)
        s2 += (d * d).sum(axis=0)
        xs.append(y @ mult)
    mean = [Fraction(0)] * P
    for i, c, length in zip(apair.tolist(), counts.tolist(), alen):
        if c:
            mean[i] += c * length
    mean = [x / trials for x in mean]
    var = np.maximum((s2 - s1 * s1 / trials) / (trials - 1), 0.0)
    x = np.concatenate(xs) if xs else np.zeros(0)
    xm = float(np.sum(x) / trials)
    dx = x - x[0]  # centred on a sample so a constant X has variance exactly 0
    dm = float(np.sum(dx) / trials)
    total_var = float(np.sum((dx - dm) ** 2) / (trials - 1))
    return PairMcResult(trials, atoms.pairs, mean, var, total_var, xm)


@dataclass
class VarSubaddReport:
    N: int
    M: int
    trials: int
    lhs_var: float
    rhs_sum_var: float
    tau: Fraction

    @property
    def ratio(self) -> float | None:
        return None if self.rhs_sum_var == 0 else self.lhs_var / self.rhs_sum_var

    @property
    def status(self) -> str:
        if self.trials < MIN_STABLE_TRIALS:
            return "warning"
        ok = self.lhs_var <= self.rhs_sum_var * float(1 + self.tau) or (self.lhs_var == 0 and self.rhs_sum_var == 0)
        return "pass" if ok else "fail"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tau"] = format_rational(self.tau)
        d.update(ratio=self.ratio, status=self.status)
        return d


def verify_var_subadditivity(
    N: int, M: int, trials: int, psi: PsiSpec, p: ProbSpec, eps, base_seed: int, tau=DEFAULT_TAU
) -> VarSubaddReport:
    """Var(Σ_{m,n<=N} λ(E_m^Q ∩ E_n^Q ∩ J)) against Σ_{m,n} Var(λ(E_m^Q ∩ E_n^Q ∩ J)),
    with J uniform over the M-partition and drawn jointly with P in each trial."""
    if trials < MIN_STABLE_TRIALS:
        warnings.warn(f"{trials} trials is below {MIN_STABLE_TRIALS}; variances are unstable", stacklevel=2)
    atoms = build_pair_atoms(N, psi, p, eps, M)
    res = run_pair_mc(atoms, trials, base_seed)
    mult = np.array([1.0 if m == n else 2.0 for m, n in atoms.pairs])
    return VarSubaddReport(N, M, trials, res.total_var, float(np.sum(res.var * mult)), Fraction(tau))


@dataclass
class VarTwoRow:
    m: int
    n: int
    var: float
    rhs: Fraction

    @property
    def C(self) -> float | None:
        return None if self.rhs == 0 else self.var / float(self.rhs)


@dataclass
class VarTwoReport:
    rows: list[VarTwoRow]
    trials: int
    slope: float
    bounded: bool
    zero_rhs_nonzero_var: list[tuple[int, int]]

    @property
    def C(self) -> float | None:
        cs = [r.C for r in self.rows if r.C is not None]
        return max(cs) if cs else None

    @property
    def status(self) -> str:
        return "pass" if self.bounded and not self.zero_rhs_nonzero_var else "fail"

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "C": self.C,
            "slope_vs_logn": self.slope,
            "bounded": self.bounded,
            "zero_rhs_nonzero_var": self.zero_rhs_nonzero_var,
            "status": self.status,
            "rows": [
                {"m": r.m, "n": r.n, "var": r.var, "rhs": format_rational(r.rhs), "C": r.C} for r in self.rows
            ],
        }


def verify_vartwo_bound(
    N: int,
    psi: PsiSpec,
    p: ProbSpec,
    eps,
    M: int,
    trials: int,
    base_seed: int,
    pairs: Sequence[tuple[int, int]] | None = None,
    trend_tol: float = 0.1,
) -> VarTwoReport:
    """Var λ(E_m^Q ∩ E_n^Q ∩ J) against p_m p_n ψ(m)ψ(n) + E λ(E_m^Q ∩ E_n^Q) on the pair grid m < n <= N."""
    for n in range(1, N + 1):
        if eval_psi(psi, n) > Fraction(1, 4):
            raise InputError(f"psi({n}) exceeds 1/4")
    atoms = build_pair_atoms(N, psi, p, eps, M)
    res = run_pair_mc(atoms, trials, base_seed)
    over = atoms.overlap_S()
    wanted = set(pairs) if pairs is not None else None
    rows, bad = [], []
    for i, (m, n) in enumerate(atoms.pairs):
        if m == n or (wanted is not None and (m, n) not in wanted):
            continue
        pm, pn = eval_p(p, m).value, eval_p(p, n).value
        rhs = pm * pn * eval_psi(psi, m) * eval_psi(psi, n) + pm * pn * over[(m, n)]
        row = VarTwoRow(m, n, float(res.var[i]), rhs)
        if rhs == 0 and row.var > 0:
            bad.append((m, n))
        rows.append(row)
    # boundedness: the worst C at each n should show no growth in ln n
    worst: dict[int, float] = {}
    for r in rows:
        if r.C is not None:
            worst[r.n] = max(worst.get(r.n, 0.0), r.C)
    ns = sorted(worst)
    slope, ok = bounded_trend(ns, [worst[n] for n in ns], trend_tol)
    return VarTwoReport(rows, trials, slope, ok, bad)
