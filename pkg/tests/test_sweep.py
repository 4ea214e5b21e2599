from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randapprox.circle import Arc, clip, intersect, measure, normalize
from randapprox.errors import InputError
from randapprox.sequences import SCALE
from randapprox.sweep import ArcBatch, Sweep, union_components, union_measure


@st.composite
def families(draw):
    N = draw(st.integers(1, 12))
    ns, mems, ks = [], [], []
    for n in range(1, N + 1):
        k = draw(st.sampled_from([0, SCALE // 4, SCALE // 2, SCALE // 3, SCALE // 7 * 3]) | st.integers(1, SCALE // 2))
        mem = draw(st.lists(st.integers(1, n), unique=True, max_size=n).map(sorted))
        ns.append(n)
        mems.append(np.array(mem, dtype=np.int64))
        ks.append(k)
    return ns, mems, ks


def _unions(ns, mems, ks, upto=None):
    out = []
    for n, mem, k in zip(ns, mems, ks):
        if upto is not None and n > upto:
            continue
        psi = F(k, SCALE)
        out.append(normalize([(F(a, n) - psi / n, F(a, n) + psi / n) for a in mem.tolist()]) if k else normalize([]))
    return out


@settings(max_examples=60, deadline=None)
@given(families(), st.integers(1, 5), st.booleans())
def test_moments_match_interval_algebra(fam, M, cut):
    ns, mems, ks = fam
    upto = max(1, len(ns) // 2) if cut else None
    res = Sweep(ArcBatch.from_centers(ns, mems, ks), M).moments(upto=upto)
    Es = _unions(ns, mems, ks, upto)
    for j, J in enumerate(Arc.partition(M)):
        assert res[j].first == sum(measure(clip(E, J)) for E in Es)
        assert res[j].second == sum(measure(clip(intersect(A, B), J)) for A in Es for B in Es)
        assert res[j].support == measure(clip(normalize([x for E in Es for x in E.arcs]), J))


@settings(max_examples=40, deadline=None)
@given(families())
def test_union_measure_and_components(fam):
    ns, mems, ks = fam
    arcs = ArcBatch.from_centers(ns, mems, ks)
    u = normalize([x for E in _unions(ns, mems, ks) for x in E.arcs])
    assert union_measure(arcs) == measure(u)
    # counted on [0, 1), like the canonical form: a piece crossing 0 counts twice
    assert union_components(arcs) == len(u)


@settings(max_examples=40, deadline=None)
@given(families(), st.lists(st.integers(0, 5), min_size=12, max_size=12))
def test_weighted_first_moment(fam, w):
    ns, mems, ks = fam
    arcs = ArcBatch.from_centers(ns, mems, ks)
    per_arc = np.array([w[b - 1] for b in arcs.band.tolist()], dtype=np.int64)
    got = Sweep(arcs, 1).moments(weights=per_arc, want=("first",))[0].first
    assert got == sum(w[n - 1] * E.measure for n, E in zip(ns, _unions(ns, mems, ks)))


def test_touching_arcs_stay_apart():
    # psi = 1/2 at n = 2: arcs (1/4, 3/4) and (3/4, 5/4) touch at 3/4 and at 1/4
    arcs = ArcBatch.from_centers([2], [np.array([1])], [SCALE // 2])
    assert union_measure(arcs) == F(1, 2)
    arcs = ArcBatch.from_centers([2], [np.array([1, 2])], [SCALE // 2])
    assert union_measure(arcs) == 1
    assert union_components(arcs) == 3


def test_conflicting_half_widths():
    with pytest.raises(InputError):
        ArcBatch.from_centers([3, 3], [np.array([1]), np.array([2])], [1, 2])


def test_empty_batch():
    res = Sweep(ArcBatch.empty(), 3).moments()
    assert all(r.first == 0 and r.second == 0 and r.support == 0 for r in res)
