"""Finite unions of open arcs on the circle R/Z with exact rational endpoints.

Canonical form: arcs are stored as ``(lo, hi)`` pairs with ``0 <= lo < hi <= 1``,
sorted by ``lo`` and pairwise disjoint.  An arc crossing 0 is split into
``(lo, 1)`` and ``(0, hi - 1)``.  Touching open arcs such as ``(0, 1/2)`` and
``(1/2, 1)`` are *not* merged, since the shared endpoint is not in the union;
a consequence is that the point 0 is never a member, even of a split arc.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Iterable, Sequence, Union

from .errors import InputError

Rational = Union[int, Fraction]
RawArc = Union["Arc", tuple]


@dataclass(frozen=True)
class Arc:
    """A single arc of the circle.

    ``lo`` is reduced into [0, 1); ``hi`` may exceed 1 for an arc that wraps.
    ``half_open`` selects [lo, hi) semantics (partition arcs, which tile the
    circle) instead of the open (lo, hi) used for approximation intervals.
    """

    lo: Fraction
    hi: Fraction
    half_open: bool = False

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        length = hi - lo
        if not 0 < length <= 1:
            raise InputError(f"arc length must lie in (0, 1], got {length} for ({lo}, {hi})")
        shift = floor(lo)
        object.__setattr__(self, "lo", lo - shift)
        object.__setattr__(self, "hi", hi - shift)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: Rational) -> bool:
        x = Fraction(x) % 1
        # a wrapping arc also covers [0, hi - 1)
        for y in (x, x + 1):
            if self.half_open:
                if self.lo <= y < self.hi:
                    return True
            elif self.lo < y < self.hi:
                return True
        return False

    @classmethod
    def partition(cls, m: int) -> list["Arc"]:
        """The half-open arcs [i/m, (i+1)/m), i = 0..m-1, tiling the circle."""
        if m < 1:
            raise InputError(f"partition size must be >= 1, got {m}")
        return [cls(Fraction(i, m), Fraction(i + 1, m), half_open=True) for i in range(m)]


def _split(lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
    length = hi - lo
    if not 0 < length <= 1:
        raise InputError(f"arc length must lie in (0, 1], got {length} for ({lo}, {hi})")
    shift = floor(lo)
    lo, hi = lo - shift, hi - shift
    if hi <= 1:
        return [(lo, hi)]
    return [(lo, Fraction(1)), (Fraction(0), hi - 1)]


class IntervalUnion:
    """Immutable canonical union of open arcs; use :func:`normalize` to build one."""

    __slots__ = ("arcs", "_measure")

    def __init__(self, arcs: Sequence[tuple[Fraction, Fraction]] = (), _trusted: bool = False):
        if not _trusted:
            arcs = normalize(arcs).arcs
        self.arcs: tuple[tuple[Fraction, Fraction], ...] = tuple(arcs)
        self._measure = None

    def __len__(self) -> int:
        return len(self.arcs)

    def __iter__(self):
        return iter(self.arcs)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalUnion) and self.arcs == other.arcs

    def __hash__(self) -> int:
        return hash(self.arcs)

    def __repr__(self) -> str:
        body = ", ".join(f"({lo}, {hi})" for lo, hi in self.arcs[:6])
        more = ", ..." if len(self.arcs) > 6 else ""
        return f"IntervalUnion([{body}{more}])"

    @property
    def measure(self) -> Fraction:
        if self._measure is None:
            self._measure = sum((hi - lo for lo, hi in self.arcs), Fraction(0))
        return self._measure

    def to_json(self) -> str:
        return json.dumps(
            [[lo.numerator, lo.denominator, hi.numerator, hi.denominator] for lo, hi in self.arcs]
        )

    @classmethod
    def from_json(cls, text: str) -> "IntervalUnion":
        return normalize((Fraction(a, b), Fraction(c, d)) for a, b, c, d in json.loads(text))


EMPTY = IntervalUnion((), _trusted=True)


def normalize(raw: Iterable[RawArc]) -> IntervalUnion:
    """Canonical union of the given open arcs (Arc objects or (lo, hi) pairs)."""
    pieces: list[tuple[Fraction, Fraction]] = []
    for arc in raw:
        if isinstance(arc, Arc):
            lo, hi = arc.lo, arc.hi
        else:
            lo, hi = Fraction(arc[0]), Fraction(arc[1])
        pieces.extend(_split(lo, hi))
    pieces.sort()
    merged: list[tuple[Fraction, Fraction]] = []
    for lo, hi in pieces:
        # strict overlap only: touching open arcs keep their shared endpoint out
        if merged and lo < merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return IntervalUnion(merged, _trusted=True)


def measure(u: IntervalUnion) -> Fraction:
    return u.measure


def intersect(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    a, b = u.arcs, v.arcs
    out: list[tuple[Fraction, Fraction]] = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo < hi:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return IntervalUnion(out, _trusted=True)


def union(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    return normalize(list(u.arcs) + list(v.arcs))


def clip(u: IntervalUnion, j: Arc) -> IntervalUnion:
    """Intersection with a single arc; J's boundary points carry no measure."""
    return intersect(u, normalize([(j.lo, j.hi)]))


def contains(u: IntervalUnion, x: Rational) -> bool:
    """Point membership.  The canonical form splits arcs at 0, so pieces (0, .)
    and (., 1) are read as one arc through 0 and 0 counts as covered."""
    x = Fraction(x) % 1
    if x == 0:
        return bool(u.arcs) and u.arcs[0][0] == 0 and u.arcs[-1][1] == 1
    # arcs are sorted by lo, so the candidate is the last arc starting below x
    lo_idx, hi_idx = 0, len(u.arcs)
    while lo_idx < hi_idx:
        mid = (lo_idx + hi_idx) // 2
        if u.arcs[mid][0] < x:
            lo_idx = mid + 1
        else:
            hi_idx = mid
    return lo_idx > 0 and x < u.arcs[lo_idx - 1][1]


def rotate(u: IntervalUnion, r: Rational) -> IntervalUnion:
    r = Fraction(r)
    return normalize((lo + r, hi + r) for lo, hi in u.arcs)
