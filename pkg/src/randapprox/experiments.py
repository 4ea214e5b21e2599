"""Finite-truncation experiments: grid coverage of the limsup set over a window
of n, the convergence/divergence dichotomy, and the QIA trajectory at the
sparse checkpoints N_t.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any

import numpy as np

from .errors import ConfigError, InputError, InsufficientDivergence, ResourceError
from .numtheory import gcd_bound
from .randmodel import MASK64, MembershipOracle, below_threshold, prf64_array
from .sequences import (
    SCALE,
    ProbSpec,
    PsiSpec,
    format_rational,
    p_range,
    parse_rational,
    psi_scaled,
    psi_scaled_range,
    sparse_sequence,
    tail_sum,
)
from .stats import QiaReport, qia_from_sums
from .sweep import ArcBatch, Sweep, union_components

# Grid offset theta in x_j = (j + theta)/G.  A prime denominator above any
# window end keeps every grid point off every center a/n; see window_coverage.
GRID_OFFSET_PRIME = 1_000_003
DEFAULT_GRID_OFFSET = Fraction(618_034, GRID_OFFSET_PRIME)
DEFAULT_EXACT_BOUND = 5000
DEFAULT_CONV_TAIL_TOL = Fraction(1, 10)


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    eps: Fraction
    psi: PsiSpec
    p: ProbSpec
    window: tuple[int, int] = (1, 1000)
    grid: int = 10_000
    M: int = 1
    exact_bound: int = DEFAULT_EXACT_BOUND
    trials: int = 10_000
    t_max: int = 1000
    grid_offset: Fraction = DEFAULT_GRID_OFFSET

    def __post_init__(self):
        object.__setattr__(self, "eps", Fraction(self.eps))
        object.__setattr__(self, "grid_offset", Fraction(self.grid_offset))
        object.__setattr__(self, "window", tuple(int(v) for v in self.window))
        n0, n1 = self.window
        if not 0 <= self.seed <= MASK64:
            raise ConfigError(f"seed must be an unsigned 64-bit value, got {self.seed}")
        if self.eps <= 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if not 1 <= n0 <= n1:
            raise ConfigError(f"window needs 1 <= N0 <= N1, got {self.window}")
        if self.grid < 1 or self.M < 1 or self.exact_bound < 1 or self.trials < 1 or self.t_max < 1:
            raise ConfigError("grid, M, exact_bound, trials and t_max must be positive")
        if not 0 <= self.grid_offset < 1:
            raise ConfigError(f"grid_offset must lie in [0, 1), got {self.grid_offset}")

    def oracle(self) -> MembershipOracle:
        return MembershipOracle(self.seed, self.p, self.eps)

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "eps": format_rational(self.eps),
            "psi": self.psi.to_dict(),
            "p": self.p.to_dict(),
            "window": list(self.window),
            "grid": self.grid,
            "M": self.M,
            "exact_bound": self.exact_bound,
            "trials": self.trials,
            "t_max": self.t_max,
            "grid_offset": format_rational(self.grid_offset),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("experiment config must be an object")
        known = {"seed", "eps", "psi", "p", "window", "grid", "M", "exact_bound", "trials", "t_max", "grid_offset"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown experiment keys: {sorted(extra)}")
        for key in ("seed", "eps", "psi", "p"):
            if key not in d:
                raise ConfigError(f"experiment config is missing {key!r}")
        kw: dict[str, Any] = {
            "seed": _int(d["seed"], "seed"),
            "eps": parse_rational(d["eps"]),
            "psi": PsiSpec.from_dict(d["psi"]),
            "p": ProbSpec.from_dict(d["p"]),
        }
        if "window" in d:
            w = d["window"]
            if not isinstance(w, (list, tuple)) or len(w) != 2:
                raise ConfigError(f"window must be [N0, N1], got {w!r}")
            kw["window"] = (_int(w[0], "window"), _int(w[1], "window"))
        for key in ("grid", "M", "exact_bound", "trials", "t_max"):
            if key in d:
                kw[key] = _int(d[key], key)
        if "grid_offset" in d:
            kw["grid_offset"] = parse_rational(d["grid_offset"])
        return cls(**kw)


def _int(v, name: str) -> int:
    if isinstance(v, bool):
        raise ConfigError(f"{name} must be an integer, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, str) and v.strip().lstrip("-").isdigit():
        return int(v)
    raise ConfigError(f"{name} must be an integer, got {v!r}")


# -- single points -------------------------------------------------------------


def _check_mode(mode: str) -> None:
    if mode not in ("P", "Q"):
        raise InputError(f"mode must be 'P' or 'Q', got {mode!r}")


def point_hit(o: MembershipOracle, psi: PsiSpec, eps, x, n: int, mode: str = "P") -> bool:
    """Whether x lies in E_n^P (or E_n^Q): |x - a/n| < psi(n)/n for a selected a."""
    _check_mode(mode)
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    x = Fraction(x) % 1
    k = psi_scaled(psi, n)
    if k == 0:
        return False
    a0 = (x.numerator * n) // x.denominator
    for a in (a0, a0 + 1):
        # |x - a/n| * n * 2^64 < k
        if abs(x * n - a) * SCALE >= k:
            continue
        a_mod = a if a >= 1 else n  # a = 0 and a = n are the same point
        if not o.member(n, a_mod):
            continue
        if mode == "Q" and gcd(a_mod, n) > gcd_bound(n, eps):
            continue
        return True
    return False


# -- window coverage -------------------------------------------------------------


@dataclass
class CoverageResult:
    window: tuple[int, int]
    mode: str
    method: str
    grid: int
    fraction: Fraction
    first_hit: np.ndarray | None = field(default=None, repr=False)  # per grid point, 0 = never hit
    exact_measure: Fraction | None = None
    components: int | None = None

    def fraction_upto(self, n: int) -> Fraction:
        """Grid fraction covered by the sub-window [N0, n]."""
        if self.first_hit is None:
            raise InputError("per-point hits are only kept by the grid method")
        covered = np.count_nonzero((self.first_hit > 0) & (self.first_hit <= n))
        return Fraction(int(covered), self.grid)


def grid_points(cfg: ExperimentConfig) -> tuple[np.ndarray, int]:
    """Integer numerators X_j and common denominator D with x_j = X_j / D."""
    th = cfg.grid_offset
    D = cfg.grid * th.denominator
    X = np.arange(cfg.grid, dtype=np.int64) * th.denominator + th.numerator
    if D * cfg.window[1] >= 1 << 62:
        raise ResourceError("grid resolution times window end overflows the exact grid test")
    return X, D


def _grid_coverage(cfg: ExperimentConfig, mode: str) -> CoverageResult:
    n0, n1 = cfg.window
    X, D = grid_points(cfg)
    ks = psi_scaled_range(cfg.psi, n0, n1)
    thr = [v.threshold for v in p_range(cfg.p, n0, n1)]
    first = np.zeros(cfg.grid, dtype=np.int64)
    active = np.arange(cfg.grid)
    seed = np.uint64(cfg.seed)
    for n, k, t in zip(range(n0, n1 + 1), ks, thr):
        if k == 0 or t == 0 or active.size == 0:
            continue
        bound = (D * k - 1) >> 64  # hit iff |X n - a D| <= bound
        xa = X[active] * n
        a0 = xa // D
        r0 = xa - a0 * D
        hit = np.zeros(active.size, dtype=bool)
        for a, near in ((a0, r0 <= bound), (a0 + 1, D - r0 <= bound)):
            if not near.any():
                continue
            idx = np.flatnonzero(near & ~hit)
            if idx.size == 0:
                continue
            cand = a[idx]
            cand = np.where(cand == 0, n, cand)
            ok = below_threshold(prf64_array(seed, np.uint64(n), cand.astype(np.uint64)), t)
            if mode == "Q":
                ok &= np.gcd(cand, n) <= gcd_bound(n, cfg.eps)
            hit[idx[ok]] = True
        if hit.any():
            first[active[hit]] = n
            active = active[~hit]
    covered = int(np.count_nonzero(first))
    return CoverageResult(cfg.window, mode, "grid", cfg.grid, Fraction(covered, cfg.grid), first_hit=first)


def window_arcs(cfg: ExperimentConfig, mode: str, n0: int | None = None, n1: int | None = None) -> ArcBatch:
    """Arcs of E_n^P (or E_n^Q) for n in the window, realised from the oracle."""
    n0 = cfg.window[0] if n0 is None else n0
    n1 = cfg.window[1] if n1 is None else n1
    if n1 > cfg.exact_bound:
        raise ResourceError(f"materialising up to n = {n1} exceeds the exact bound {cfg.exact_bound}")
    o = cfg.oracle()
    ns = list(range(n0, n1 + 1))
    sample = o.sample_Q if mode == "Q" else o.sample_P
    mems = [sample(n).members for n in ns]
    return ArcBatch.from_centers(ns, mems, psi_scaled_range(cfg.psi, n0, n1))


def window_coverage(cfg: ExperimentConfig, mode: str = "P", method: str = "grid") -> CoverageResult:
    """Covered fraction of the window union: on the grid x_j = (j + theta)/G, or exactly.

    The default theta has a prime denominator larger than any admissible n,
    so no grid point coincides with a center a/n.  Cell midpoints (theta = 1/2)
    are available but resonate: for G = 10^4 every n divisible by 2G puts a
    center on every grid point.
    """
    _check_mode(mode)
    if method == "grid":
        return _grid_coverage(cfg, mode)
    if method != "exact":
        raise InputError(f"method must be 'grid' or 'exact', got {method!r}")
    arcs = window_arcs(cfg, mode)
    sweep = Sweep(arcs, 1)
    measure = sweep.moments(want=("support",))[0].support
    return CoverageResult(
        cfg.window, mode, "exact", cfg.grid, measure, exact_measure=measure, components=union_components(arcs)
    )


# -- dichotomy -----------------------------------------------------------------


@dataclass
class BranchReport:
    branch: str
    window: tuple[int, int]
    coverage: CoverageResult
    tail_bound: Fraction | None = None
    checkpoints: list[int] = field(default_factory=list)
    trajectory: list[Fraction] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "branch": self.branch,
            "window": list(self.window),
            "coverage": format_rational(self.coverage.fraction),
            "coverage_decimal": f"{float(self.coverage.fraction):.12g}",
        }
        if self.tail_bound is not None:
            d["tail_bound"] = format_rational(self.tail_bound)
            d["tail_bound_decimal"] = f"{float(self.tail_bound):.12g}"
        if self.checkpoints:
            d["checkpoints"] = self.checkpoints
            d["trajectory"] = [format_rational(v) for v in self.trajectory]
        return d


@dataclass
class DichotomyReport:
    convergent: BranchReport
    divergent: BranchReport

    def to_dict(self) -> dict[str, Any]:
        return {"convergent": self.convergent.to_dict(), "divergent": self.divergent.to_dict()}


def first_moment_bound(cfg: ExperimentConfig) -> Fraction:
    """Σ_{n in window} 2 p_n ψ(n), an upper bound for E λ(∪ E_n^P) over the window."""
    return 2 * tail_sum(cfg.psi, cfg.p, *cfg.window)


def convergent_branch(cfg: ExperimentConfig, tail_tol: Fraction = DEFAULT_CONV_TAIL_TOL) -> BranchReport:
    bound = first_moment_bound(cfg)
    if bound > tail_tol:
        raise ConfigError(
            f"window tail Σ 2 p_n psi(n) = {float(bound):.6g} exceeds {float(tail_tol):.6g}; "
            "the series does not look convergent over this window"
        )
    cov = window_coverage(cfg, "P", "grid")
    return BranchReport("convergent", cfg.window, cov, tail_bound=bound)


def divergent_branch(cfg: ExperimentConfig) -> BranchReport:
    n0, n1 = cfg.window
    try:
        cps = sparse_sequence(cfg.psi, cfg.p, cfg.t_max, n1)
    except InsufficientDivergence as exc:
        raise ConfigError(f"divergent branch: {exc}") from exc
    if len(cps) < 2:
        raise ConfigError(
            f"divergent branch reaches only {len(cps)} checkpoint(s) by N1 = {n1}; "
            "the series does not look divergent over this window"
        )
    cov = window_coverage(cfg, "P", "grid")
    cps = [n for n in cps if n >= n0]
    return BranchReport("divergent", cfg.window, cov, checkpoints=cps, trajectory=[cov.fraction_upto(n) for n in cps])


def dichotomy_experiment(
    cfg_conv: ExperimentConfig, cfg_div: ExperimentConfig, tail_tol: Fraction = DEFAULT_CONV_TAIL_TOL
) -> DichotomyReport:
    return DichotomyReport(convergent_branch(cfg_conv, tail_tol), divergent_branch(cfg_div))


# -- QIA trajectory --------------------------------------------------------------


@dataclass
class QiaSeries:
    checkpoints: list[int]
    M: int
    reports: list[QiaReport]  # ordered by t, then J
    truncated: bool
    first: dict[tuple[int, int], Fraction] = field(default_factory=dict, repr=False)  # (t, J) -> Σ λ(E_n ∩ J)
    second: dict[tuple[int, int], Fraction] = field(default_factory=dict, repr=False)

    @property
    def achieved_t(self) -> int:
        return len(self.checkpoints)

    def min_ratio_over_lambda(self, t_min: int = 2) -> tuple[Fraction | None, tuple[int, int] | None]:
        best, where = None, None
        for r in self.reports:
            if r.t is None or r.t < t_min or r.ratio_over_lambda is None:
                continue
            if best is None or r.ratio_over_lambda < best:
                best, where = r.ratio_over_lambda, (r.t, r.j_index)
        return best, where


def qia_from_arcs(arcs: ArcBatch, M: int, checkpoints: list[int]) -> QiaSeries:
    sweep = Sweep(arcs, M)
    lam = Fraction(1, M)
    reports, first, second = [], {}, {}
    for t, N in enumerate(checkpoints, start=1):
        for j, mom in enumerate(sweep.moments(upto=N, want=("first", "second"))):
            ratio = qia_from_sums(mom.first, mom.second)
            first[(t, j)], second[(t, j)] = mom.first, mom.second
            reports.append(
                QiaReport(N, mom.first**2, mom.second, ratio, None if ratio is None else ratio / lam, t=t, j_index=j)
            )
    return QiaSeries(list(checkpoints), M, reports, False, first, second)


def qia_experiment(cfg: ExperimentConfig) -> QiaSeries:
    """QIA ratios of the realised E_n^Q on each partition arc at each checkpoint N_t."""
    cap = min(cfg.window[1], cfg.exact_bound)
    cps = sparse_sequence(cfg.psi, cfg.p, cfg.t_max, cap)
    truncated = cfg.window[1] > cfg.exact_bound
    if truncated:
        warnings.warn(
            f"checkpoints truncated at the exact bound {cfg.exact_bound}: achieved t = {len(cps)}", stacklevel=2
        )
    arcs = window_arcs(cfg, "Q", 1, cps[-1])
    series = qia_from_arcs(arcs, cfg.M, cps)
    series.truncated = truncated
    return series
