import json
import math

import mpmath
import numpy as np
import pytest
from scipy import stats

from maxbounds.bounds import (
    UNSPECIFIED_NOTE,
    BoundReport,
    fbm_marginal_tail,
    fbm_sup_bound,
    fbm_sup_bound_general,
    fbm_sup_constant,
    fbm_traced_spec,
    lemma1_sup_moment_bound,
    marginal_moment_bound,
    prop1_lq_bound,
    recompute,
    series_sup_constants,
    series_tail_bounds,
    theorem_tail_bound,
    union_tail_bound,
    upcross_moment_bound,
    upcross_random_time_bound,
)
from maxbounds.constants import HolderSpec, TailDecaySpec, a_p_fbm, c_ph_theta
from maxbounds.errors import DomainError, OutOfRegimeError, RangeError
from maxbounds.estimators import CrossingBand
from maxbounds.processes import SeriesSpec, series_sigma_sq

FBM4 = HolderSpec(4.0, 0.5, a_p_fbm(4.0))


def rel(a, b):
    return abs(a - b) / abs(b)


def test_report_invariants_and_serialization():
    with pytest.raises(RangeError):
        BoundReport("x", math.inf, {})
    with pytest.raises(DomainError):
        BoundReport("x", -1.0, {})
    r = lemma1_sup_moment_bound(FBM4, None, 0.0, 1.0)
    d = json.loads(r.to_json())
    assert d["name"] == "lemma1_sup_moment_bound" and d["params"]["theta"] == 4 / 3
    row = r.to_csv_row()
    assert row.startswith("lemma1_sup_moment_bound,") and "spec.p=4" in row


def test_lemma1_examples():
    assert lemma1_sup_moment_bound(HolderSpec(2, 1, 0), 2, 0, 1).value == 0
    a = lemma1_sup_moment_bound(FBM4, None, 0, 1).value
    b = lemma1_sup_moment_bound(FBM4, None, 0, 2).value
    assert rel(b, a * 2 ** FBM4.ph) < 1e-14
    assert rel(lemma1_sup_moment_bound(HolderSpec(2, 1, 1), 2, 0, 1).value, math.pi ** 2 / 3 * 512) < 1e-13


def test_prop1_doob_reduction_and_monotone():
    r = prop1_lq_bound(HolderSpec(4, 0.5, 0), None, 2.0, 0, 1, 0.8)
    assert r.value == 2 * 0.8
    for q in (1.1, 1.5, 3.0):
        assert prop1_lq_bound(HolderSpec(4, 0.5, 0), None, q, 0, 1, 1.0).value == pytest.approx(q / (q - 1))
    vals = [prop1_lq_bound(FBM4, None, q, 0, 1, math.sqrt(0.5)).value for q in (1.2, 2, 3, 4)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        prop1_lq_bound(FBM4, None, 1.0, 0, 1, 1.0)
    with pytest.raises(DomainError):
        prop1_lq_bound(FBM4, None, 4.5, 0, 1, 1.0)


def test_marginal_moment_examples():
    assert marginal_moment_bound(TailDecaySpec(2, 3, 1.5), 2).value == pytest.approx(2.0)
    assert marginal_moment_bound(TailDecaySpec(2, 1, 1), 2).value == pytest.approx(1.0)
    assert marginal_moment_bound(TailDecaySpec(2, 1, 0.5), 4).value == pytest.approx(8.0)


def test_theorem_tail_bound():
    tail = TailDecaySpec(2.0, 1.0, 1.0, delta0=0.5)
    vals = [theorem_tail_bound(FBM4, tail, None, 1.0, lam).value for lam in (2, 3, 4, 6)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    r = theorem_tail_bound(FBM4, tail, None, 1.0, 3.0)
    assert r.derived["clamped"] == min(r.value, 1.0)
    assert isinstance(r.derived["n_opt"], int) and r.derived["n_opt"] >= 1
    with pytest.raises(OutOfRegimeError):
        theorem_tail_bound(FBM4, tail, None, 1.0, 0.4)


def test_fbm_marginal_tail():
    assert rel(fbm_marginal_tail(0.5, 1.0, 1.0).value, math.exp(-1) / (2 * math.sqrt(math.pi))) < 1e-15
    for lam in (0.5, 1.0, 3.0):
        r = fbm_marginal_tail(0.7, 1.0, lam)
        assert rel(r.value, r.derived["phi"]) < 1e-15
    vals = [fbm_marginal_tail(0.5, 0.5, lam).value for lam in np.linspace(0.5 ** 0.5 / 2 ** 0.5, 4, 30)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_fbm_marginal_two_sided_is_a_valid_bound():
    # exact P(|B_t| >= lam) with Var B_t = t^(2h)/2
    for t, lam in [(1.0, 0.5), (1.0, 2.0), (0.3, 1.0), (1.0, 4.0)]:
        exact = 2 * stats.norm.sf(math.sqrt(2) * lam / t ** 0.5)
        assert fbm_marginal_tail(0.5, t, lam, two_sided=True).value >= exact
    # the one-sided form undershoots the two-sided probability
    exact = 2 * stats.norm.sf(math.sqrt(2) * 2.0)
    assert fbm_marginal_tail(0.5, 1.0, 2.0).value < exact


def test_fbm_sup_bound_scaling_and_constant():
    for T, lam in [(2.0, 1.5), (0.3, 0.7)]:
        for h in (0.5, 0.75):
            a = fbm_sup_bound(h, T, lam).value
            b = fbm_sup_bound(h, 1.0, lam / T ** h).value
            assert rel(a, b) < 1e-12
    h = 0.5
    p = 2 / h
    theta = p / (p - 1)
    c = mpmath.mpf(c_ph_theta(HolderSpec(p, h, 1.0), theta))
    oracle = 2 * (c * mpmath.mpf(a_p_fbm(p))) ** (1 / (p * h)) * (2 * mpmath.sqrt(mpmath.pi)) ** -(1 - 1 / (p * h))
    assert rel(fbm_sup_constant(h), float(oracle)) < 1e-12
    assert fbm_sup_bound(0.5, 1.0, 1e-3).value > 1e3


def test_traced_form_matches_union_bound_at_optimal_blocks():
    h, p = 0.5, 4.0
    spec = fbm_traced_spec(h, p)
    for lam in np.linspace(0.8, 5.0, 20):
        phi = math.exp(-lam * lam) / (2 * math.sqrt(math.pi) * lam)
        union = union_tail_bound(spec, None, 1.0, lam, lambda x: math.exp(-x * x) / (2 * math.sqrt(math.pi) * x))
        assert rel(union.value, fbm_sup_bound_general(h, lam, p).value) < 1e-9
        assert union.derived["marginal"] == pytest.approx(phi)


def test_union_bound_minimized_at_reported_blocks():
    spec = fbm_traced_spec(0.5)
    marg = lambda x: fbm_marginal_tail(0.5, 1.0, x).value
    best = union_tail_bound(spec, None, 1.0, 2.0, marg)
    n = best.params["n_blocks"]
    for f in (0.5, 0.9, 1.1, 2.0):
        assert union_tail_bound(spec, None, 1.0, 2.0, marg, n * f).value > best.value


def test_series_bounds():
    spec = SeriesSpec(2.0, 1, 0.5, tail_tol=None)
    r = series_tail_bounds(spec, 0.0, 2.0, 0.5)
    assert r.value == 2.0
    assert series_sigma_sq(spec) == pytest.approx(1 + 4 * math.pi)
    lam = 3.0
    full = series_tail_bounds(spec, lam, 1.0, 0.5).value
    half = series_tail_bounds(SeriesSpec(2.0, 1, 0.5, scale=math.sqrt(0.5), tail_tol=None), lam, 1.0, 0.5).value
    assert rel(half, full ** 2) < 1e-12
    d = series_tail_bounds(SeriesSpec(2.0, 1000, 0.5, tail_tol=None), 10.0)
    assert math.isfinite(d.value) and UNSPECIFIED_NOTE in d.notes[0]
    c_h, d_h = series_sup_constants(0.5)
    assert d_h == 0.25 and c_h > 0


def test_random_time_bound_examples():
    assert upcross_random_time_bound(FBM4, None, 1.0, 0.2, 1.0, 0.0).value == 0.0
    r = upcross_random_time_bound(FBM4, None, 1.0, 0.2, 1.0, 1.0)
    k = r.derived["k_q_alpha"]
    c = r.derived["c_ph_theta"]
    assert rel(r.value, k * (c * FBM4.a_ph) ** 0.25) < 1e-14
    with pytest.raises(DomainError):
        upcross_random_time_bound(FBM4, None, 1.0, 0.4, 1.0, 0.5)


def test_upcross_moment_bound():
    band = CrossingBand(-0.1, 0.1)
    a = upcross_moment_bound(FBM4, None, 0.25, band, 1.0, 1.5, 0.5).value
    b = upcross_moment_bound(FBM4, None, 0.25, CrossingBand(-0.2, 0.2), 1.0, 1.5, 0.5).value
    assert rel(b, a / 2) < 1e-14
    c = upcross_moment_bound(FBM4, None, 0.25, band, 4.0, 1.5, 0.5).value
    assert rel(c, a * 4.0 ** 0.5) < 1e-14
    with pytest.raises(DomainError):
        upcross_moment_bound(FBM4, None, 0.25, band, 1.0, 1.5, 0.6)
    # growth as delta approaches its upper limit 1 - 1/(ph)
    vals = []
    for delta in (0.1, 0.2, 0.3, 0.4, 0.45):
        q = 0.5 * (delta / 0.25 + 2.0)
        lo, hi = delta / (1 - q / 4), 0.25 / (1 / q - 0.25)
        vals.append(upcross_moment_bound(FBM4, None, delta, band, 1.0, q, 0.5 * (lo + hi)).value)
    assert all(x < y for x, y in zip(vals, vals[1:]))


@pytest.mark.parametrize("report", [
    lambda: lemma1_sup_moment_bound(FBM4, None, 0.0, 1.0),
    lambda: prop1_lq_bound(FBM4, 1.7, 2.0, 0.0, 1.0, 0.7),
    lambda: marginal_moment_bound(TailDecaySpec(2, 2, 1), 3.0),
    lambda: theorem_tail_bound(FBM4, TailDecaySpec(2, 2, 1), None, 1.0, 2.5),
    lambda: fbm_marginal_tail(0.3, 0.7, 1.1, True),
    lambda: fbm_sup_bound(0.75, 2.0, 2.0),
    lambda: fbm_sup_bound_general(0.5, 2.0, 6.0),
    lambda: series_tail_bounds(SeriesSpec(2.0, 50, 0.5, tail_tol=None), 4.0),
    lambda: upcross_random_time_bound(FBM4, None, 1.0, 0.2, 1.0, 0.6),
    lambda: upcross_moment_bound(FBM4, None, 0.25, CrossingBand(-0.1, 0.1), 1.0, 1.5, 0.5),
])
def test_reports_recompute_bit_for_bit(report):
    r = report()
    again = recompute(json.loads(r.to_json()))
    assert again.value == r.value
    assert recompute(r).to_json() == r.to_json()


def test_union_bound_is_not_recomputable():
    r = union_tail_bound(FBM4, None, 1.0, 2.0, lambda x: 0.01)
    with pytest.raises(DomainError):
        recompute(r)
