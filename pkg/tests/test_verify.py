import json
import math

import pytest
from scipy import stats

from maxbounds.bounds import BoundReport
from maxbounds.errors import ConfigError
from maxbounds.estimators import EmpiricalEstimate
from maxbounds.verify import (
    ExperimentConfig,
    Verdict,
    report_to_csv,
    report_to_json,
    run_all,
    run_doob_lq,
    run_marginal_tail_fbm,
    run_random_times,
    run_suites,
    run_sup_tail_fbm,
    run_sup_tail_series,
    run_upcross,
)


def small(**kw):
    base = dict(n_paths=2000, n_steps=128, suite_samples=300)
    base.update(kw)
    return ExperimentConfig(**base)


def non_strict_counter(values, band):
    """Deliberately broken: treats values equal to a level as crossing it."""
    times, low = [], True
    for i, v in enumerate(values):
        if low and v <= band.a:
            times.append(i)
            low = False
        elif not low and v >= band.b:
            times.append(i)
            low = True
    return times, len(times) // 2


@pytest.mark.parametrize("kw", [
    dict(n_paths=99),
    dict(confidence=0.5),
    dict(confidence=1.0),
    dict(experiment="nope"),
    dict(process="ou"),
    dict(band=(0.1, -0.1)),
    dict(lambdas=()),
    dict(t_marginal=2.0),
])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kw)


def test_verdict_pass_is_upper_limit_comparison():
    bound = BoundReport("b", 0.5, {})
    at = Verdict("x", EmpiricalEstimate(0.1, 0.0, 0.5, 10, 0.99), bound, 0)
    above = Verdict("x", EmpiricalEstimate(0.1, 0.0, 0.5000001, 10, 0.99), bound, 0)
    assert at.passed and at.margin == 0.0
    assert not above.passed and above.margin < 0


@pytest.mark.parametrize("q", [2.0, 1.1])
def test_doob_passes(q):
    v = run_doob_lq(small(q=q, n_paths=20_000, n_steps=256))
    assert v.passed and v.margin > 0
    assert v.bound.derived["doob_constant"] == pytest.approx(q / (q - 1))


def test_sup_tail_fbm_vacuous_and_h075():
    (v,) = run_sup_tail_fbm(small(lambdas=(0.1,)))
    assert v.passed and v.vacuous
    vs = run_sup_tail_fbm(small(hurst=0.75))
    assert all(v.passed for v in vs)


def test_sup_tail_series_degenerate_and_scaling():
    vs = run_sup_tail_series(small(series_k_max=1, lambdas=(0.01, 0.1, 0.2)))
    assert all(v.passed for v in vs)
    # same absolute levels, doubled variance: tail and bound both rise
    lams = (0.05, 0.1, 0.15)
    base = run_sup_tail_series(small(series_k_max=50, lambdas=lams))
    sigma1 = base[0].bound.derived["sigma_sq"] ** 0.5
    doubled = run_sup_tail_series(small(series_k_max=50, series_scale=math.sqrt(2),
                                        lambdas=tuple(x / math.sqrt(2) for x in lams)))
    for a, b in zip(base, doubled):
        assert b.lam == pytest.approx(a.lam) and a.lam == pytest.approx(sigma1 * lams[base.index(a)])
        assert b.empirical.point >= a.empirical.point
        assert b.bound.value > a.bound.value


def test_marginal_tail_matches_exact_law():
    cfg = small(n_paths=20_000, marginal_lambdas=(0.25, 0.5, 1.0))
    for v in run_marginal_tail_fbm(cfg):
        exact = 2 * stats.norm.sf(math.sqrt(2) * v.lam)
        assert v.empirical.ci_low <= exact <= v.empirical.ci_high
        assert v.passed
    # no exceedances: the point estimate is 0 <= bound, but the verdict still
    # uses the upper limit, which no finite sample pushes below a bound of ~0
    (v,) = run_marginal_tail_fbm(small(marginal_lambdas=(50.0,)))
    assert v.empirical.point == 0 <= v.bound.value
    assert not v.passed and v.empirical.ci_high > 0


def test_upcross_default_and_wide_band():
    v = run_upcross(small(n_steps=512))
    assert v.passed and "pathwise inequality held" in v.notes[1]
    assert v.bound.params["q"] == pytest.approx(1.5) and v.bound.params["alpha"] == pytest.approx(0.5)
    wide = run_upcross(small(band=(-2.0, 2.0)))
    assert wide.passed and wide.empirical.point < 0.05


def test_upcross_near_delta_limit_still_passes():
    v = run_upcross(small(delta=0.49))
    assert v.passed


def test_upcross_series_process():
    v = run_upcross(small(process="series", series_k_max=100, band=(-0.5, 0.5)))
    assert v.passed


def test_upcross_infeasible_chain_suggests_parameters():
    with pytest.raises(ConfigError, match="feasible choice is q=1.5, alpha=0.5"):
        run_upcross(small(q=1.5, alpha=0.6, delta=0.25))
    with pytest.raises(ConfigError, match="delta"):
        run_upcross(small(delta=0.6))


def test_random_times():
    v = run_random_times(small(n_paths=20_000))
    assert v.passed
    eq = run_random_times(small(random_times_equal=True))
    assert eq.empirical.point == 0 and eq.bound.value == 0 and eq.passed
    degenerate = run_random_times(small(q=4.0, alpha=3.0))
    assert degenerate.passed
    assert degenerate.bound.derived["k_q_alpha"] == pytest.approx(4.0 ** 4 / (1 - 2.0 ** -1))


def test_suites_default_and_mutation():
    out = run_suites(small(suite_samples=2000))
    assert out["failures"] == 0 and {s["name"] for s in out["suites"]} == {"dyadic_suite", "counter_suite", "lemma3_suite"}
    broken = run_suites(small(suite_samples=500), counter=non_strict_counter)
    assert broken["failures"] >= 1
    ex = next(s for s in broken["suites"] if s["failures"])["examples"][0]
    assert "values" in ex and "band" in ex
    assert run_suites()["failures"] == 0


def test_run_all_reproducible_and_thread_invariant():
    cfg = small(seed=42)
    a = report_to_json(run_all(cfg))
    b = report_to_json(run_all(ExperimentConfig(**{**cfg.to_dict(), "threads": 4})))
    assert a == b
    report = json.loads(a)
    assert report["seed"] == 42 and report["summary"]["all_passed"]
    assert "threads" not in report["config"]


def test_csv_summary_format():
    report = run_all(small(experiment="marginal_tail_fbm"))
    lines = report_to_csv(report).split("\n")
    assert lines[0] == "experiment,lambda,empirical,ci_high,bound,pass,margin"
    row = lines[1].split(",")
    assert row[0] == "marginal_tail_fbm" and row[5] in ("true", "false")
    assert float(row[4]) == report["verdicts"][0]["bound"]["value"]
