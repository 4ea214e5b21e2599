from __future__ import annotations

import warnings
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import brute
from randapprox.approxsets import build_E, e_s, expected_overlap_Q
from randapprox.circle import Arc, clip, intersect
from randapprox.errors import InputError
from randapprox.numtheory import s_set
from randapprox.randmodel import MembershipOracle, trial_seed
from randapprox.sequences import ProbSpec, PsiSpec, eval_p, eval_psi
from randapprox.stats import (
    bounded_trend,
    build_pair_atoms,
    expected_overlap_sums,
    frozen_block,
    frozen_value,
    mc_estimate,
    qia_from_sums,
    qia_ratio,
    run_pair_mc,
    verify_lemma_S,
    verify_overlap_bound,
    verify_var_subadditivity,
    verify_vartwo_bound,
)

SEED = 20261015
QUARTER = PsiSpec("constant", ["1/4"])
INV_LOG = PsiSpec("log-power", ["1"])
INV_LOG_Q = PsiSpec("log-power", ["1"], clamp_quarter=True)
LOG_P = ProbSpec("log-power", ["1/2"])
ONE_P = ProbSpec("constant", ["1"])
HALF_P = ProbSpec("constant", ["1/2"])


# -- QIA ratio ---------------------------------------------------------------------


@pytest.mark.parametrize("N", [1, 2, 5, 9])
def test_qia_identical_sets(N):
    meas = [F(1, 2)] * N
    over = [[F(1, 2)] * N for _ in range(N)]
    assert qia_ratio(meas, over) == F(1, 2)


def test_qia_disjoint_sets():
    meas = [F(1, 10), F(1, 5), F(1, 7)]
    over = [[meas[i] if i == j else F(0) for j in range(3)] for i in range(3)]
    assert qia_ratio(meas, over) == sum(meas)
    assert qia_ratio(meas, over, N=2) == meas[0] + meas[1]


def test_qia_degenerate_and_invalid():
    assert qia_ratio([F(0)], [[F(0)]]) is None
    with pytest.raises(InputError):
        qia_ratio([F(1, 2)], [[F(1, 3)]])
    with pytest.raises(InputError):
        qia_ratio([F(1, 2), F(1, 2)], [[F(1, 2), F(1, 4)], [F(0), F(1, 2)]])
    with pytest.raises(InputError):
        qia_from_sums(F(1), F(0))


@st.composite
def synthetic(draw):
    N = draw(st.integers(1, 6))
    meas = [F(draw(st.integers(1, 40)), 64) for _ in range(N)]
    over = [[F(0)] * N for _ in range(N)]
    for i in range(N):
        over[i][i] = meas[i]
        for j in range(i):
            v = F(draw(st.integers(0, 40)), 64) * min(meas[i], meas[j])
            over[i][j] = over[j][i] = v
    return meas, over


@settings(max_examples=80, deadline=None)
@given(synthetic(), st.fractions(min_value=F(1, 100), max_value=10))
def test_qia_scaling_law(data, c):
    meas, over = data
    scaled = qia_ratio([c * x for x in meas], [[c * x for x in row] for row in over])
    assert scaled == c * qia_ratio(meas, over)


def test_qia_of_q_family_reversed_summation():
    from randapprox.experiments import ExperimentConfig, qia_experiment

    cfg = ExperimentConfig(SEED, F(1, 2), INV_LOG, LOG_P, window=(1, 120), M=3, exact_bound=120)
    series = qia_experiment(cfg)
    o = cfg.oracle()
    Es = {n: build_E(o.sample_Q(n), eval_psi(INV_LOG, n)) for n in range(1, 121)}
    for r in series.reports:
        J = Arc.partition(3)[r.j_index]
        ns = list(range(r.N, 0, -1))
        first = sum((clip(Es[n].union, J).measure for n in ns), F(0))
        second = sum((clip(intersect(Es[m].union, Es[n].union), J).measure for m in ns for n in ns), F(0))
        assert r.numerator == first * first and r.denominator == second
        assert r.ratio == qia_from_sums(first, second)
        # Cauchy-Schwarz on J: ratio never exceeds λ(J)
        assert r.ratio is None or r.ratio <= J.length


# -- generic Monte Carlo ------------------------------------------------------------


def test_mc_constant():
    est = mc_estimate(lambda s: F(3, 7), 50, SEED)
    assert est.mean == F(3, 7) and est.variance == 0 and est.stderr == 0


def test_mc_indicator():
    est = mc_estimate(lambda s: int(s >> 63), 10**4, SEED)
    assert abs(est.mean - F(1, 2)) <= F(4, 2 * 100)
    assert est.stderr == pytest.approx((float(est.variance) / 10**4) ** 0.5)


def test_mc_concatenation():
    stat = lambda s: s % 97  # noqa: E731
    a = mc_estimate(stat, 300, SEED)
    b = mc_estimate(stat, 200, SEED, start=300)
    both = mc_estimate(stat, 500, SEED)
    assert both.mean == (300 * a.mean + 200 * b.mean) / 500


def test_mc_float_path_deterministic():
    stat = lambda s: (s % 1000) / 7.0  # noqa: E731
    assert mc_estimate(stat, 100, SEED) == mc_estimate(stat, 100, SEED)


def test_mc_needs_two_trials():
    with pytest.raises(InputError):
        mc_estimate(lambda s: 1, 1, SEED)


# -- S counts ------------------------------------------------------------------------


def test_lemma_s_full_arc():
    rep = verify_lemma_S((100, 100), 1, Arc(0, 1, half_open=True))
    assert rep.table[0][2] == F(60, 100)


def test_lemma_s_upper_bound_and_tiling():
    eps = F(1, 2)
    full = verify_lemma_S((2, 400), eps, Arc(0, 1, half_open=True))
    parts = [verify_lemma_S((2, 400), eps, J) for J in Arc.partition(4)]
    for i, (n, c, r) in enumerate(full.table):
        assert r * eps <= 1
        assert sum(p.table[i][1] for p in parts) == c == len(brute.s_list(n, eps))


def test_lemma_s_frozen_small_range_status():
    J = Arc(0, F(1, 4), half_open=True)
    rep = verify_lemma_S((100, 300), F(1, 2), J, frozen=F(0))
    assert rep.status == "pass" and rep.onset is not None
    assert rep.min_ratio == min(r for n, c, r in rep.table if n >= rep.onset)


# -- overlap-sum bound ----------------------------------------------------------------


def test_overlap_bound_n1():
    row = expected_overlap_sums([1], INV_LOG, LOG_P, F(1, 2))[0]
    assert row.lhs == eval_p(LOG_P, 1).value * e_s(1, INV_LOG, F(1, 2)).measure


def test_overlap_bound_zero_psi():
    rows = expected_overlap_sums([5, 20], PsiSpec("constant", ["0"]), LOG_P, F(1, 2))
    assert all(r.lhs == 0 and r.C is None for r in rows)


@pytest.mark.parametrize("psi, p", [(INV_LOG, LOG_P), (QUARTER, HALF_P)])
def test_overlap_sums_match_pairwise_closed_forms(psi, p):
    N = 25
    rows = expected_overlap_sums([10, N], psi, p, F(1, 2))
    for row in rows:
        brute_sum = sum(
            (expected_overlap_Q(m, n, psi, p, F(1, 2)) for m in range(1, row.N + 1) for n in range(1, row.N + 1)),
            F(0),
        )
        assert row.lhs == brute_sum


def test_overlap_bound_frozen_prefix():
    frozen = frozen_value("overlap_bound_C")
    rep = verify_overlap_bound([100, 200, 300], INV_LOG, LOG_P, F(1, 2), frozen=frozen[:3])
    assert [r.C for r in rep.rows] == frozen[:3]
    assert rep.status == "pass"


def test_bounded_trend():
    ns = [100, 200, 400, 800]
    assert bounded_trend(ns, [1.0, 1.0, 1.0, 1.0], 0.1) == (0.0, True)
    slope, ok = bounded_trend(ns, [1.0, 2.0, 3.0, 4.0], 0.1)
    assert slope > 0 and not ok


# -- pair Monte Carlo -------------------------------------------------------------------


def _direct_trials(N, psi, p, eps, M, trials):
    """Per-trial λ(E_m^Q ∩ E_n^Q ∩ J) computed through the interval algebra."""
    parts = Arc.partition(M)
    rows = []
    for t in range(trials):
        seed = trial_seed(SEED, t)
        j = (brute.prf(seed, 0, 0) * M) >> 64
        o = MembershipOracle(seed, p, eps)
        Es = {n: build_E(o.sample_Q(n), eval_psi(psi, n)) for n in range(1, N + 1)}
        rows.append(
            {
                (m, n): (clip(Es[n].union, parts[j]).measure if m == n else clip(intersect(Es[m].union, Es[n].union), parts[j]).measure)
                for n in range(1, N + 1)
                for m in range(1, n + 1)
            }
        )
    return rows


@pytest.mark.parametrize("psi, p, M", [(INV_LOG, LOG_P, 2), (QUARTER, HALF_P, 3)])
def test_pair_mc_matches_direct_trials(psi, p, M):
    N, trials = 7, 120
    atoms = build_pair_atoms(N, psi, p, F(1, 2), M)
    res = run_pair_mc(atoms, trials, SEED, batch=32)
    rows = _direct_trials(N, psi, p, F(1, 2), M, trials)
    for i, pr in enumerate(res.pairs):
        vals = [r[pr] for r in rows]
        assert res.mean[i] == sum(vals, F(0)) / trials
        assert res.var[i] == pytest.approx(np.var([float(v) for v in vals], ddof=1), rel=1e-9, abs=1e-15)
    x = [float(sum(r[(m, n)] * (1 if m == n else 2) for m, n in res.pairs)) for r in rows]
    assert res.total_var == pytest.approx(np.var(x, ddof=1), rel=1e-9)


def test_pair_atoms_overlap_s():
    atoms = build_pair_atoms(12, QUARTER, HALF_P, 1, 4)
    over = atoms.overlap_S()
    for (m, n), v in over.items():
        expect = e_s(n, QUARTER, 1).measure if m == n else intersect(e_s(m, QUARTER, 1).union, e_s(n, QUARTER, 1).union).measure
        assert v == expect


# -- variance verifiers -------------------------------------------------------------------


def test_var_subadd_single_term():
    rep = verify_var_subadditivity(1, 1, 2000, INV_LOG, HALF_P, 1, SEED)
    assert rep.lhs_var == pytest.approx(rep.rhs_sum_var, rel=1e-9)
    assert rep.status == "pass"


def test_var_subadd_deterministic_sets():
    rep = verify_var_subadditivity(10, 1, 1000, INV_LOG, ONE_P, F(1, 2), SEED)
    assert rep.lhs_var == 0 and rep.rhs_sum_var == 0 and rep.status == "pass"


def test_var_subadd_warns_on_few_trials():
    with pytest.warns(UserWarning):
        rep = verify_var_subadditivity(5, 2, 50, INV_LOG, LOG_P, F(1, 2), SEED)
    assert rep.status == "warning"


def test_vartwo_zero_probability():
    p = ProbSpec("table", ["0"] * 5 + ["1/2"] * 10)
    rep = verify_vartwo_bound(12, INV_LOG_Q, p, F(1, 2), 1, 500, SEED)
    assert all(r.var == 0 for r in rep.rows if r.m <= 5)


def test_vartwo_disjoint_sets():
    tiny = PsiSpec("constant", [F(1, 1 << 30)])
    rep = verify_vartwo_bound(10, tiny, HALF_P, 1, 2, 500, SEED)
    over = build_pair_atoms(10, tiny, HALF_P, 1, 2).overlap_S()
    for r in rep.rows:
        if over[(r.m, r.n)] == 0:
            assert r.var == 0
    assert rep.zero_rhs_nonzero_var == []


def test_vartwo_rejects_wide_psi():
    with pytest.raises(InputError):
        verify_vartwo_bound(10, INV_LOG, LOG_P, F(1, 2), 1, 100, SEED)


# -- frozen values ------------------------------------------------------------------------


def test_frozen_table():
    assert frozen_value("lemma_S_min_ratio") == F(32, 77)
    assert len(frozen_value("overlap_bound_C")) == 20
    block = frozen_block("lemma_S_min_ratio", "missing")
    assert list(block) == ["lemma_S_min_ratio"]
    assert block["lemma_S_min_ratio"]["oracle"].startswith("scripts/oracles/")
