from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import brute
from randapprox.errors import ConfigError, InsufficientDivergence
from randapprox.sequences import (
    SCALE,
    ProbSpec,
    PsiSpec,
    WeightedSeries,
    check_decay,
    eval_p,
    eval_psi,
    format_rational,
    parse_rational,
    partial_sum,
    psi_scaled,
    sparse_sequence,
    tail_sum,
)

INV_LOG = PsiSpec("log-power", ["1"])
LOG_P = ProbSpec("log-power", ["1/2"])
HALF = ProbSpec("constant", ["1/2"])
ONE = ProbSpec("constant", ["1"])

PSI_FAMILIES = [
    PsiSpec("constant", ["1/4"]),
    PsiSpec("constant", ["3"]),
    PsiSpec("power", ["3/2"]),
    PsiSpec("power", ["2", "1/3"]),
    INV_LOG,
    PsiSpec("log-power", ["5", "2"], clamp_quarter=True),
    PsiSpec("table", ["1/3", "0", "7/8"]),
]
P_FAMILIES = [HALF, ONE, LOG_P, ProbSpec("log-power", ["3", "1/3"]), ProbSpec("totient-ratio"), ProbSpec("table", ["1", "1/5"])]


@pytest.mark.parametrize(
    "text, value",
    [("1/3", Fraction(1, 3)), ("0.25", Fraction(1, 4)), (2, Fraction(2)), ("-7/14", Fraction(-1, 2))],
)
def test_parse_rational(text, value):
    assert parse_rational(text) == value
    assert parse_rational(format_rational(value)) == value


@pytest.mark.parametrize("bad", ["abc", "1/0", None, 0.1])
def test_parse_rational_rejects(bad):
    with pytest.raises(ConfigError):
        parse_rational(bad)


def test_power_family_example():
    assert eval_psi(PsiSpec("power", ["3/2"]), 4) == Fraction(1, 8)


def test_zero_constant():
    assert eval_psi(PsiSpec("constant", ["0"]), 17) == 0


def test_inverse_log_at_55_matches_high_precision():
    exact = 1 / mpmath.log(55)
    got = eval_psi(INV_LOG, 55)
    assert abs(mpmath.mpf(got.numerator) / got.denominator - exact) < mpmath.mpf(2) ** -64
    assert psi_scaled(INV_LOG, 55) == brute.inv_log_scaled(55)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 55, 1000, 99991])
def test_inverse_log_floor_exact(n):
    assert psi_scaled(INV_LOG, n) == brute.inv_log_scaled(n)


@pytest.mark.parametrize(
    "spec, n, value, threshold",
    [
        (HALF, 9, Fraction(1, 2), 1 << 63),
        (LOG_P, 2, Fraction(1), SCALE),
        (ProbSpec("constant", ["0"]), 5, Fraction(0), 0),
    ],
)
def test_eval_p_examples(spec, n, value, threshold):
    pv = eval_p(spec, n)
    assert pv.value == value
    assert pv.threshold == threshold


def test_log_p_matches_oracle():
    for n in (3, 10, 1000, 54321):
        v = mpmath.log(n) ** mpmath.mpf(-0.5)
        expect = SCALE if v >= 1 else brute.dyadic_floor(v)
        assert eval_p(LOG_P, n).threshold == expect


def test_totient_ratio():
    assert eval_p(ProbSpec("totient-ratio"), 12).value == Fraction(4, 12)


@pytest.mark.parametrize(
    "bad",
    [
        {"family": "nope"},
        {"family": "constant", "params": []},
        {"family": "power", "params": ["1", "2", "3"]},
        {"family": "table", "params": []},
        {"params": ["1"]},
    ],
)
def test_bad_psi_spec(bad):
    with pytest.raises(ConfigError):
        PsiSpec.from_dict(bad)


@pytest.mark.parametrize(
    "bad",
    [{"family": "log-power", "params": ["0"]}, {"family": "constant", "params": ["3/2"]}, {"family": "x"}],
)
def test_bad_p_spec(bad):
    with pytest.raises(ConfigError):
        s = ProbSpec.from_dict(bad)
        eval_p(s, 2)


@pytest.mark.parametrize("spec", PSI_FAMILIES)
def test_psi_spec_round_trip(spec):
    assert PsiSpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize("spec", P_FAMILIES)
def test_p_spec_round_trip(spec):
    assert ProbSpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize("spec", PSI_FAMILIES)
def test_psi_range_sweep(spec):
    cap = spec.cap
    for n in range(1, 20001):
        assert 0 <= eval_psi(spec, n) <= cap


@pytest.mark.parametrize("spec", P_FAMILIES)
def test_p_range_sweep(spec):
    for n in range(1, 20001):
        assert 0 <= eval_p(spec, n).value <= 1


@pytest.mark.slow
@pytest.mark.parametrize("spec", [INV_LOG, PsiSpec("power", ["3/2"])])
def test_psi_range_sweep_to_a_million(spec):
    from randapprox.sequences import psi_scaled_range

    ks = psi_scaled_range(spec, 1, 10**6)
    assert min(ks) >= 0 and max(ks) <= SCALE // 2


@pytest.mark.slow
def test_log_p_range_sweep_to_a_million():
    from randapprox.sequences import p_range

    vals = p_range(LOG_P, 1, 10**6)
    assert all(0 <= v.threshold <= SCALE for v in vals)


@pytest.mark.parametrize("spec", [LOG_P, ProbSpec("log-power", ["3", "1/3"])])
def test_declared_decay(spec):
    assert check_decay(spec, 3000) == []


@pytest.mark.parametrize(
    "psi, p, N, value",
    [
        (PsiSpec("constant", ["1/2"]), ONE, 10, Fraction(5)),
        (PsiSpec("constant", ["0"]), LOG_P, 100, Fraction(0)),
    ],
)
def test_partial_sum_examples(psi, p, N, value):
    assert partial_sum(psi, p, N) == value


def test_partial_sum_power_family_oracle():
    terms = [Fraction(1, 2)] + [Fraction(brute.dyadic_floor(mpmath.mpf(n) ** mpmath.mpf(-1.5)), SCALE) for n in (2, 3)]
    assert partial_sum(PsiSpec("power", ["3/2"]), HALF, 3) == sum(t / 2 for t in terms)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 400), st.sampled_from(PSI_FAMILIES), st.sampled_from(P_FAMILIES))
def test_partial_sum_increments(N, psi, p):
    a, b = partial_sum(psi, p, N - 1), partial_sum(psi, p, N)
    assert b - a == eval_p(p, N).value * eval_psi(psi, N)
    assert b >= a


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 300), st.integers(0, 300))
def test_tail_sum_splits_partial_sum(n0, extra):
    n1 = n0 + extra
    head = partial_sum(INV_LOG, LOG_P, n0 - 1) if n0 > 1 else Fraction(0)
    assert head + tail_sum(INV_LOG, LOG_P, n0, n1) == partial_sum(INV_LOG, LOG_P, n1)


def test_weighted_series_matches_partial_sum():
    ws = WeightedSeries.build(INV_LOG, LOG_P, 50)
    for n in (1, 17, 50, 80):
        assert ws.at(n) == partial_sum(INV_LOG, LOG_P, n)
    assert ws.reaches(50, ws.at(50)) and not ws.reaches(49, ws.at(50))


def test_sparse_sequence_constant_half():
    assert sparse_sequence(PsiSpec("constant", ["1/2"]), ONE, 6, 10**4) == [2 * t * t for t in range(1, 7)]


def test_sparse_sequence_single_checkpoint():
    # weights 0, 0, 1/2, 1/2, ... so the sum first reaches 1 at n = 4
    psi = PsiSpec("table", ["0", "0"] + ["1/2"] * 10)
    assert sparse_sequence(psi, ONE, 1, 100) == [4]


def test_sparse_sequence_prefix_scan_oracle():
    got = sparse_sequence(INV_LOG, LOG_P, 3, 10**6)
    s, t, out = Fraction(0), 1, []
    for n in range(1, 10**6):
        s += Fraction(brute.inv_log_scaled(n), SCALE) * (
            1 if n < 3 else Fraction(min(SCALE, brute.dyadic_floor(mpmath.log(n) ** mpmath.mpf(-0.5))), SCALE)
        )
        while s >= t * t and t <= 3:
            out.append(n)
            t += 1
        if t > 3:
            break
    assert got == out


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 12))
def test_sparse_sequence_invariants(t_max):
    cps = sparse_sequence(INV_LOG, LOG_P, t_max, 5000)
    assert all(a < b for a, b in zip(cps, cps[1:]))
    for t, N in enumerate(cps, start=1):
        assert partial_sum(INV_LOG, LOG_P, N) >= t * t
        assert N == 1 or partial_sum(INV_LOG, LOG_P, N - 1) < t * t


def test_insufficient_divergence_names_sum():
    with pytest.raises(InsufficientDivergence) as err:
        sparse_sequence(PsiSpec("power", ["2"]), HALF, 3, 100)
    assert err.value.achieved == partial_sum(PsiSpec("power", ["2"]), HALF, 100)
    assert "partial sum only reached" in str(err.value)
