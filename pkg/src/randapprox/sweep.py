"""Exact coverage integrals over large batches of approximation arcs.

For a family of open arcs with integer weights, let f(x) be the total weight
of the arcs covering x.  :class:`Sweep` computes, for each arc J_i of the
M-partition, the exact rationals

    first  = ∫_J f,      second = ∫_J f²,      support = λ({f > 0} ∩ J).

With unit weights and arcs drawn from sets E_1, ..., E_N whose own arcs are
pairwise disjoint, ``first`` is Σ_n λ(E_n ∩ J) and ``second`` is
Σ_{m,n} λ(E_m ∩ E_n ∩ J), diagonal included.

Every endpoint has the form a/den + s*k/(den*2**64) with s in {-1, 0, 1}.
Endpoints are ordered by a float key, and runs whose float gaps fall below
1e-13 (far above the float error of the key) are re-sorted exactly.  The
integral is then taken by summation by parts, Σ_i x_i (V_{i-1} - V_i),
grouped by denominator so that only O(#denominators) big-rational additions
are needed no matter how many arcs there are.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .errors import InputError
from .sequences import SCALE

_CLUSTER_TOL = 1e-13


@dataclass
class ArcBatch:
    """Arcs (lo, hi) with lo = lo_a/den + lo_s*k/(den*2^64), same for hi.

    ``band`` tags each arc with its owner (the denominator n of E_n) so that
    checkpoint sums over n <= N can reuse one sort.
    """

    band: np.ndarray
    den: np.ndarray
    lo_a: np.ndarray
    lo_s: np.ndarray
    hi_a: np.ndarray
    hi_s: np.ndarray
    k_of_den: dict[int, int]

    def __len__(self) -> int:
        return int(self.band.size)

    @classmethod
    def empty(cls) -> "ArcBatch":
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z, z, z, z, z, {})

    @classmethod
    def from_centers(
        cls, n_values: Sequence[int], members: Sequence[np.ndarray], ks: Sequence[int]
    ) -> "ArcBatch":
        """Arcs of half-width k/(n 2^64) around a/n for each n and a in members.

        The arc around a = n (i.e. around 0) is split into (1 - δ, 1) and (0, δ).
        """
        parts = []
        k_of_den: dict[int, int] = {}
        for n, a, k in zip(n_values, members, ks):
            if k == 0 or len(a) == 0:
                continue
            if n in k_of_den and k_of_den[n] != k:
                raise InputError(f"two half-widths for denominator {n}")
            k_of_den[n] = k
            a = np.asarray(a, dtype=np.int64)
            inner = a[a < n]
            cnt = inner.size
            one = np.ones(cnt, dtype=np.int64)
            parts.append((np.full(cnt, n), inner, -one, inner, one))
            if a.size and a[-1] == n:
                # left piece (1 - δ, 1) and right piece (0, δ)
                parts.append((np.array([n]), np.array([n]), np.array([-1]), np.array([n]), np.array([0])))
                parts.append((np.array([n]), np.array([0]), np.array([0]), np.array([0]), np.array([1])))
        if not parts:
            return cls.empty()
        den = np.concatenate([p[0] for p in parts]).astype(np.int64)
        return cls(
            band=den.copy(),
            den=den,
            lo_a=np.concatenate([p[1] for p in parts]).astype(np.int64),
            lo_s=np.concatenate([p[2] for p in parts]).astype(np.int64),
            hi_a=np.concatenate([p[3] for p in parts]).astype(np.int64),
            hi_s=np.concatenate([p[4] for p in parts]).astype(np.int64),
            k_of_den=k_of_den,
        )


@dataclass(frozen=True)
class SweepMoments:
    first: Fraction
    second: Fraction
    support: Fraction


def _float_k(k_of_den: dict[int, int], den: np.ndarray) -> np.ndarray:
    if not k_of_den:
        return np.zeros(den.shape)
    keys = np.array(sorted(k_of_den), dtype=np.int64)
    vals = np.array([k_of_den[int(d)] / SCALE for d in keys])
    idx = np.searchsorted(keys, den)
    idx = np.clip(idx, 0, keys.size - 1)
    out = np.where(keys[idx] == den, vals[idx], 0.0)
    return out


class Sweep:
    """Sort the endpoints of an ArcBatch (plus the M-partition boundaries) once,
    then evaluate coverage moments for any band cutoff or weight vector."""

    def __init__(self, arcs: ArcBatch, m: int = 1):
        if m < 1:
            raise InputError(f"partition size must be >= 1, got {m}")
        self.arcs = arcs
        self.m = m
        e = len(arcs)
        nb = m + 1
        self.ev_a = np.concatenate([arcs.lo_a, arcs.hi_a, np.arange(nb, dtype=np.int64)])
        self.ev_s = np.concatenate([arcs.lo_s, arcs.hi_s, np.zeros(nb, dtype=np.int64)])
        self.ev_den = np.concatenate([arcs.den, arcs.den, np.full(nb, m, dtype=np.int64)])
        self.ev_arc = np.concatenate([np.arange(e), np.arange(e), np.full(nb, -1)]).astype(np.int64)
        self.ev_delta = np.concatenate(
            [np.ones(e, dtype=np.int64), -np.ones(e, dtype=np.int64), np.zeros(nb, dtype=np.int64)]
        )
        self.ev_bound = np.concatenate([np.zeros(2 * e, dtype=np.int64), np.ones(nb, dtype=np.int64)])
        self.order = self._exact_order()
        # fields permuted into sweep order
        o = self.order
        self.s_a, self.s_s, self.s_den = self.ev_a[o], self.ev_s[o], self.ev_den[o]
        self.s_arc, self.s_delta = self.ev_arc[o], self.ev_delta[o]
        self.seg_bucket = np.cumsum(self.ev_bound[o]) - 1  # partition index of the segment after each event

    def _exact_key(self, i: int) -> tuple[Fraction, int]:
        # at equal positions arc ends precede arc starts, so touching open arcs stay apart
        a, s, d = int(self.ev_a[i]), int(self.ev_s[i]), int(self.ev_den[i])
        if s == 0:
            return Fraction(a, d), int(self.ev_delta[i])
        k = self.arcs.k_of_den[d]
        return Fraction(a * SCALE + s * k, d * SCALE), int(self.ev_delta[i])

    def _exact_order(self) -> np.ndarray:
        kf = _float_k(self.arcs.k_of_den, self.ev_den)
        kf = np.where(self.ev_bound == 1, 0.0, kf)
        key = self.ev_a / self.ev_den + self.ev_s * kf / self.ev_den
        order = np.argsort(key, kind="stable")
        sk = key[order]
        close = np.diff(sk) <= _CLUSTER_TOL
        if not close.any():
            return order
        # runs of consecutive near-equal keys: positions i..j with close[i..j-1]
        edges = np.diff(np.concatenate([[0], close.astype(np.int8), [0]]))
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1)  # exclusive end in close-index space -> inclusive in key space
        order = order.copy()
        for st, en in zip(starts.tolist(), ends.tolist()):
            run = order[st : en + 1].tolist()
            run.sort(key=self._exact_key)
            order[st : en + 1] = run
        return order

    def moments(
        self,
        upto: int | None = None,
        weights: np.ndarray | None = None,
        want: tuple[str, ...] = ("first", "second", "support"),
    ) -> list[SweepMoments]:
        """Coverage moments per partition arc, using arcs with band <= upto.

        ``weights`` (one integer per arc) defaults to 1; pass an object array
        for weights too large for int64.  Moments not in ``want`` come back as 0.
        """
        arc = self.s_arc
        is_arc = arc >= 0
        arc_idx = np.where(is_arc, arc, 0)
        if weights is None:
            w = self.s_delta.copy()
        else:
            wa = np.asarray(weights)
            w = np.where(is_arc, wa[arc_idx] if wa.size else 0, 0)
            w = (w * self.s_delta).astype(wa.dtype if wa.dtype == object else np.int64)
        if upto is not None:
            band = self.arcs.band
            active = np.where(is_arc, band[arc_idx] <= upto if band.size else False, False)
            w = np.where(active, w, 0)
            if weights is not None and np.asarray(weights).dtype == object:
                w = w.astype(object)
        f = np.cumsum(w)
        valid = (self.seg_bucket >= 0) & (self.seg_bucket < self.m)
        bucket = np.where(valid, self.seg_bucket, 0)
        values = {
            "first": lambda: f,
            "second": lambda: f * f,
            "support": lambda: (f > 0).astype(np.int64),
        }
        out = {name: [Fraction(0)] * self.m for name in values}
        for name in want:
            v = np.where(valid, values[name](), 0)
            if v.dtype != object:
                v = v.astype(np.int64)
            out[name] = self._integrate(v, bucket)
        return [SweepMoments(out["first"][j], out["second"][j], out["support"][j]) for j in range(self.m)]

    def _integrate(self, v: np.ndarray, bucket: np.ndarray) -> list[Fraction]:
        """Σ_segments len * v per bucket, by parts: Σ_i x_i (v_{i-1} - v_i)."""
        m = self.m
        prev_v = np.concatenate([np.zeros(1, dtype=v.dtype), v[:-1]])
        prev_b = np.concatenate([[0], bucket[:-1]])
        # each event contributes +x*v_{i-1} to the previous segment's bucket and -x*v_i to its own
        coef = np.concatenate([prev_v, -v])
        bkt = np.concatenate([prev_b, bucket])
        a = np.concatenate([self.s_a, self.s_a])
        s = np.concatenate([self.s_s, self.s_s])
        den = np.concatenate([self.s_den, self.s_den])
        nz = coef != 0
        coef, bkt, a, s, den = coef[nz], bkt[nz], a[nz], s[nz], den[nz]
        totals = [Fraction(0)] * m
        if coef.size == 0:
            return totals
        key = bkt * (int(den.max()) + 1) + den
        order = np.argsort(key, kind="stable")
        key, bkt, coef, a, s, den = key[order], bkt[order], coef[order], a[order], s[order], den[order]
        starts = np.flatnonzero(np.concatenate([[True], key[1:] != key[:-1]]))
        sum_a = np.add.reduceat(coef * a, starts)
        sum_s = np.add.reduceat(coef * s, starts)
        g_b = bkt[starts].tolist()
        g_d = den[starts].tolist()
        # one common denominator per bucket: lcm(dens) * 2^64
        per_bucket: dict[int, list[tuple[int, int, int]]] = {}
        for b, d, sa, ss in zip(g_b, g_d, sum_a.tolist(), sum_s.tolist()):
            per_bucket.setdefault(b, []).append((d, int(sa), int(ss)))
        for b, rows in per_bucket.items():
            big = lcm(*[d for d, _, _ in rows])
            num = 0
            for d, sa, ss in rows:
                term = sa * SCALE
                if ss:
                    term += ss * self.arcs.k_of_den[d]
                num += term * (big // d)
            totals[b] = Fraction(num, big * SCALE)
        return totals


def union_measure(arcs: ArcBatch) -> Fraction:
    return Sweep(arcs, 1).moments()[0].support


def union_components(arcs: ArcBatch) -> int:
    """Number of maximal open arcs in the union, counted on [0, 1) (a piece
    crossing 0 counts twice)."""
    sw = Sweep(arcs, 1)
    f = np.cumsum(sw.s_delta)
    prev = np.concatenate([[0], f[:-1]])
    return int(np.count_nonzero((prev == 0) & (f > 0)))
