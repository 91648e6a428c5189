"""End-to-end experiments: simulate, estimate, bound, and compare.

Every experiment turns an :class:`ExperimentConfig` into one or more
:class:`Verdict` objects.  A verdict passes exactly when the upper confidence
limit of the empirical quantity is at most the bound, so Monte Carlo noise
cannot produce a false alarm at the stated confidence.

Paths are streamed block by block through :func:`processes.map_paths`, so
``n_paths = 1e5`` on a 1024-point grid never holds the full ensemble in
memory.  All randomness is keyed by the experiment seed; reports do not
depend on the thread count.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .bounds import (
    BoundReport,
    fbm_marginal_tail,
    fbm_sup_bound,
    fbm_traced_spec,
    prop1_lq_bound,
    series_tail_bounds,
    upcross_moment_bound,
    upcross_random_time_bound,
)
from .constants import HolderSpec, a_ph_series, check_upcross_chain
from .errors import ConfigError, DomainError
from .estimators import (
    CrossingBand,
    EmpiricalEstimate,
    bootstrap_mean_ci,
    count_upcrossings,
    count_upcrossings_literal,
    dyadic_decompose,
    empirical_tail,
    lemma3_pathwise_check,
    upcross_moment_estimate,
)
from .processes import (
    FbmSampler,
    RandomWalkSampler,
    SeriesSampler,
    SeriesSpec,
    TimeGrid,
    map_paths,
    required_k_max,
    series_weight_sum,
)
from .streams import aux_generator, derive_seed, normalize_seed

__all__ = [
    "EXPERIMENTS",
    "DEFAULT_SEED",
    "ExperimentConfig",
    "Verdict",
    "run_doob_lq",
    "run_sup_tail_fbm",
    "run_sup_tail_series",
    "run_marginal_tail_fbm",
    "run_upcross",
    "run_random_times",
    "run_suites",
    "run_experiment",
    "run_all",
    "report_to_json",
    "report_to_csv",
    "feasible_upcross_parameters",
    "series_spec_for",
]

DEFAULT_SEED = 0xC0FFEE

EXPERIMENTS = (
    "doob_lq",
    "sup_tail_fbm",
    "sup_tail_series",
    "marginal_tail_fbm",
    "upcross",
    "random_times",
    "lemma3_suite",
    "dyadic_suite",
)
_PROCESSES = ("fbm", "random_walk", "series")


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment (or of the whole suite with ``experiment='all'``).

    ``None`` for ``p``, ``theta``, ``q``, ``delta`` or ``alpha`` selects the
    experiment's own default.  For the series experiment the lambda grid is in
    units of the series standard deviation ``sigma``.
    """

    experiment: str = "all"
    process: str | None = None
    n_paths: int = 10_000
    n_steps: int = 512
    horizon: float = 1.0
    seed: int = DEFAULT_SEED
    confidence: float = 0.99
    hurst: float = 0.5
    p: float | None = None
    theta: float | None = None
    q: float | None = None
    delta: float | None = None
    alpha: float | None = None
    lambdas: tuple = (1.5, 2.0, 2.5, 3.0)
    marginal_lambdas: tuple = (0.5, 1.0, 1.25)
    band: tuple = (-0.1, 0.1)
    series_gamma: float = 2.0
    series_k_max: int | None = None
    series_scale: float = 1.0
    t_marginal: float = 1.0
    marginal_two_sided: bool = True
    random_times_equal: bool = False
    suite_samples: int = 10_000
    threads: int = 1

    def __post_init__(self):
        if self.experiment != "all" and self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from all, {', '.join(EXPERIMENTS)}")
        if self.process is not None and self.process not in _PROCESSES:
            raise ConfigError(f"unknown process {self.process!r}; choose from {', '.join(_PROCESSES)}")
        if int(self.n_paths) < 100:
            raise ConfigError(f"n_paths must be >= 100, got {self.n_paths}")
        if int(self.n_steps) < 1:
            raise ConfigError(f"n_steps must be >= 1, got {self.n_steps}")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ConfigError(f"horizon must be positive, got {self.horizon}")
        if not 0.5 < self.confidence < 1:
            raise ConfigError(f"confidence must lie in (0.5, 1), got {self.confidence}")
        if not 0 < self.hurst < 1:
            raise ConfigError(f"hurst must lie in (0, 1), got {self.hurst}")
        if len(self.lambdas) == 0 or any(not (lam > 0 and math.isfinite(lam)) for lam in self.lambdas):
            raise ConfigError(f"lambda grid must be nonempty and positive, got {self.lambdas}")
        if len(self.marginal_lambdas) == 0 or any(not (lam > 0 and math.isfinite(lam))
                                                  for lam in self.marginal_lambdas):
            raise ConfigError(f"marginal lambda grid must be nonempty and positive, got {self.marginal_lambdas}")
        if len(self.band) != 2 or not self.band[0] < self.band[1]:
            raise ConfigError(f"band needs two levels a < b, got {self.band}")
        if not 0 < self.t_marginal <= self.horizon:
            raise ConfigError(f"t_marginal must lie in (0, horizon], got {self.t_marginal}")
        if int(self.suite_samples) < 1:
            raise ConfigError(f"suite_samples must be >= 1, got {self.suite_samples}")
        if int(self.threads) < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        object.__setattr__(self, "seed", normalize_seed(self.seed))
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))
        object.__setattr__(self, "marginal_lambdas", tuple(float(x) for x in self.marginal_lambdas))
        object.__setattr__(self, "band", tuple(float(x) for x in self.band))

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.uniform(self.horizon, int(self.n_steps))

    def with_experiment(self, name: str) -> "ExperimentConfig":
        return replace(self, experiment=name)

    def to_dict(self) -> dict:
        """Everything that determines the output; ``threads`` is left out on purpose."""
        d = asdict(self)
        d.pop("threads")
        d["lambdas"] = list(self.lambdas)
        d["marginal_lambdas"] = list(self.marginal_lambdas)
        d["band"] = list(self.band)
        return d

    @classmethod
    def field_names(cls) -> tuple:
        return tuple(f.name for f in fields(cls))


@dataclass
class Verdict:
    experiment: str
    empirical: EmpiricalEstimate
    bound: BoundReport
    seed: int
    lam: float | None = None
    vacuous: bool = False
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.empirical.ci_high <= self.bound.value

    @property
    def margin(self) -> float:
        return self.bound.value - self.empirical.ci_high

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "lambda": self.lam,
            "pass": self.passed,
            "margin": self.margin,
            "vacuous": self.vacuous,
            "seed": self.seed,
            "empirical": self.empirical.to_dict(),
            "bound": self.bound.to_dict(),
            "notes": list(self.notes),
        }


# --- helpers -------------------------------------------------------------------


def _exp_seed(cfg: ExperimentConfig, name: str) -> int:
    return derive_seed(cfg.seed, name)


def _mean_estimate(samples: np.ndarray, cfg: ExperimentConfig, seed: int) -> EmpiricalEstimate:
    point = float(np.mean(samples))
    low, high = bootstrap_mean_ci(samples, cfg.confidence, seed)
    return EmpiricalEstimate(point, min(low, point), max(high, point), int(samples.size), cfg.confidence)


def _tail_verdicts(name: str, stats: np.ndarray, levels: Sequence[float], bounds: Sequence[BoundReport],
                   cfg: ExperimentConfig, seed: int, lams: Sequence[float], notes=()) -> list[Verdict]:
    out = []
    for level, bound, lam in zip(levels, bounds, lams):
        est = empirical_tail(stats, level, cfg.confidence)
        vac = bound.value >= 1.0
        n = list(notes) + (["vacuous: bound >= 1"] if vac else [])
        out.append(Verdict(name, est, bound, seed, lam, vac, n))
    return out


def _sup_stats(sampler, cfg: ExperimentConfig, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Grid suprema on the full grid and on every other grid point."""

    def fn(start, block):
        return kernels.abs_max_rows(block), kernels.abs_max_rows(np.ascontiguousarray(block[:, ::2]))

    parts = map_paths(sampler, cfg.n_paths, seed, fn, threads=cfg.threads)
    return np.concatenate([a for a, _ in parts]), np.concatenate([b for _, b in parts])


def _refinement_note(fine: np.ndarray, coarse: np.ndarray) -> str:
    return f"grid refinement: mean sup {float(np.mean(coarse)):.6g} at half resolution, {float(np.mean(fine)):.6g} at full"


# --- experiments -------------------------------------------------------------


def run_doob_lq(cfg: ExperimentConfig) -> Verdict:
    """Random-walk martingale: ``||max|M|||_q`` against the Doob-type bound with ``A = 0``.

    The terminal norm ``||M_T||_q`` entering the bound is the empirical point
    estimate from the same ensemble.
    """
    if cfg.process not in (None, "random_walk"):
        raise ConfigError("doob_lq runs on the random walk martingale")
    q = 2.0 if cfg.q is None else float(cfg.q)
    spec = HolderSpec(max(q, 2.0), 1.0, 0.0)
    if not 1 < q <= spec.p:
        raise ConfigError(f"doob_lq needs 1 < q <= p, got q={q}")
    seed = _exp_seed(cfg, "doob_lq")
    grid = cfg.grid

    def fn(start, block):
        return kernels.abs_max_rows(block), np.abs(block[:, -1])

    parts = map_paths(RandomWalkSampler(grid), cfg.n_paths, seed, fn, threads=cfg.threads)
    sups = np.concatenate([a for a, _ in parts])
    terminal = np.concatenate([b for _, b in parts])
    powered = sups ** q
    point = float(np.mean(powered)) ** (1.0 / q)
    low, high = bootstrap_mean_ci(powered, cfg.confidence, derive_seed(seed, "bootstrap"))
    est = EmpiricalEstimate(point, min(low ** (1 / q), point), max(high ** (1 / q), point), sups.size, cfg.confidence)
    terminal_lq = float(np.mean(terminal ** q)) ** (1.0 / q)
    bound = prop1_lq_bound(spec, cfg.theta, q, 0.0, grid.horizon, terminal_lq)
    return Verdict("doob_lq", est, bound, seed, None, False,
                   ["martingale case: increment constant A = 0; terminal norm is the empirical point estimate"])


def run_sup_tail_fbm(cfg: ExperimentConfig) -> list[Verdict]:
    """``P(sup |B| >= 2 lam)`` for each lambda against the traced fBm bound."""
    if cfg.process not in (None, "fbm"):
        raise ConfigError("sup_tail_fbm runs on fBm")
    seed = _exp_seed(cfg, "sup_tail_fbm")
    sampler = FbmSampler(cfg.hurst, cfg.grid)
    fine, coarse = _sup_stats(sampler, cfg, seed)
    bounds = [fbm_sup_bound(cfg.hurst, cfg.horizon, lam) for lam in cfg.lambdas]
    notes = [_refinement_note(fine, coarse)]
    if sampler.jitter:
        notes.append(f"covariance jitter {sampler.jitter:.3e}")
    return _tail_verdicts("sup_tail_fbm", fine, [2 * lam for lam in cfg.lambdas], bounds, cfg, seed,
                          cfg.lambdas, notes)


def series_spec_for(cfg: ExperimentConfig) -> SeriesSpec:
    """Series of the config; ``series_k_max=None`` picks the truncation from the tail rule."""
    if cfg.series_k_max is None:
        k_max = required_k_max(cfg.series_gamma, cfg.hurst, cfg.series_scale)
        return SeriesSpec(cfg.series_gamma, k_max, cfg.hurst, scale=cfg.series_scale)
    return SeriesSpec(cfg.series_gamma, int(cfg.series_k_max), cfg.hurst, scale=cfg.series_scale, tail_tol=None)


def run_sup_tail_series(cfg: ExperimentConfig) -> list[Verdict]:
    """``P(sup |X| >= 2 lam sigma)`` of the Rademacher series against its default tail bound."""
    if cfg.process not in (None, "series"):
        raise ConfigError("sup_tail_series runs on the Rademacher series")
    seed = _exp_seed(cfg, "sup_tail_series")
    spec = series_spec_for(cfg)
    sampler = SeriesSampler(spec, cfg.grid)
    sigma = math.sqrt(sampler.sigma_sq)
    fine, coarse = _sup_stats(sampler, cfg, seed)
    lams = [lam * sigma for lam in cfg.lambdas]
    bounds = [series_tail_bounds(spec, lam, t_horizon=cfg.horizon) for lam in lams]
    notes = [
        "series constants C_h, D_h are defaults traced through the tail theorem, not given in closed form",
        f"lambda grid in units of sigma = {sigma:.17g}",
        _refinement_note(fine, coarse),
    ]
    return _tail_verdicts("sup_tail_series", fine, [2 * lam for lam in lams], bounds, cfg, seed, lams, notes)


def run_marginal_tail_fbm(cfg: ExperimentConfig) -> list[Verdict]:
    """``P(|B_t| >= lam)`` at the grid point nearest ``t_marginal``, for each of ``marginal_lambdas``.

    The Gaussian bound is within about 10% of the exact tail once ``lam >= 2``
    (at ``t = 1``), which no feasible sample size resolves at 99% confidence;
    hence the separate, smaller default grid.
    """
    if cfg.process not in (None, "fbm"):
        raise ConfigError("marginal_tail_fbm runs on fBm")
    seed = _exp_seed(cfg, "marginal_tail_fbm")
    grid = cfg.grid
    j = int(np.argmin(np.abs(grid.points - cfg.t_marginal)))
    if j == 0:
        raise ConfigError("t_marginal snaps to t = 0, where B_t = 0")
    t = float(grid.points[j])

    def fn(start, block):
        return np.abs(block[:, j])

    vals = np.concatenate(map_paths(FbmSampler(cfg.hurst, grid), cfg.n_paths, seed, fn, threads=cfg.threads))
    lams = cfg.marginal_lambdas
    bounds = [fbm_marginal_tail(cfg.hurst, t, lam, two_sided=cfg.marginal_two_sided) for lam in lams]
    notes = [f"t = {t:.17g}"]
    return _tail_verdicts("marginal_tail_fbm", vals, lams, bounds, cfg, seed, lams, notes)


def feasible_upcross_parameters(spec: HolderSpec, delta: float) -> tuple[float, float]:
    """Midpoint ``(q, alpha)`` of the admissible region for a given ``delta``.

    ``q`` is the midpoint of ``(delta/(h-1/p), min(1/h, p))`` and ``alpha`` the
    midpoint of the resulting alpha interval.
    """
    p, h = spec.p, spec.h
    if not 0 < delta < 1.0 - 1.0 / spec.ph:
        raise ConfigError(f"delta must lie in (0, {1.0 - 1.0 / spec.ph:.6g}) for p*h = {spec.ph:.6g}, got {delta}")
    q_lo = delta / (h - 1.0 / p)
    q_hi = min(1.0 / h, p)
    q = 0.5 * (q_lo + q_hi)
    a_lo = delta / (1.0 - q / p)
    a_hi = (h - 1.0 / p) / (1.0 / q - 1.0 / p)
    return q, 0.5 * (a_lo + a_hi)


def _upcross_spec(cfg: ExperimentConfig):
    process = cfg.process or "fbm"
    if process == "fbm":
        return process, fbm_traced_spec(cfg.hurst, cfg.p), FbmSampler(cfg.hurst, cfg.grid)
    if process == "series":
        sspec = series_spec_for(cfg)
        p = 2.0 / cfg.hurst if cfg.p is None else float(cfg.p)
        spec = HolderSpec(p, cfg.hurst, a_ph_series(p, series_weight_sum(sspec)))
        return process, spec, SeriesSampler(sspec, cfg.grid)
    raise ConfigError("upcross runs on fBm or the Rademacher series")


def run_upcross(cfg: ExperimentConfig) -> Verdict:
    """``E[U^delta]`` against ``K_delta T^h / (b-a)``, plus the pathwise up-crossing inequality.

    The pathwise inequality is evaluated on every path for ``k = 1 .. U + 2``;
    any violation raises, since it can only come from a defective counter.
    """
    process, spec, sampler = _upcross_spec(cfg)
    delta = 0.25 if cfg.delta is None else float(cfg.delta)
    if cfg.q is None or cfg.alpha is None:
        q_mid, a_mid = feasible_upcross_parameters(spec, delta)
        q = q_mid if cfg.q is None else float(cfg.q)
        alpha = a_mid if cfg.alpha is None else float(cfg.alpha)
    else:
        q, alpha = float(cfg.q), float(cfg.alpha)
    try:
        check_upcross_chain(spec, delta, q, alpha)
    except DomainError as exc:
        try:
            q_ok, a_ok = feasible_upcross_parameters(spec, delta)
            hint = f"; a feasible choice is q={q_ok:.6g}, alpha={a_ok:.6g}"
        except ConfigError:
            hint = ""
        raise ConfigError(f"{exc}{hint}") from exc
    band = CrossingBand(*cfg.band)
    seed = _exp_seed(cfg, "upcross")

    def fn(start, block):
        counts = kernels.upcross_counts(block, band.a, band.b)
        checks, bad, first = kernels.lemma3_check_rows(block, band.a, band.b, 2)
        return counts, checks, bad, (start + first if first >= 0 else -1)

    parts = map_paths(sampler, cfg.n_paths, seed, fn, threads=cfg.threads)
    counts = np.concatenate([c for c, *_ in parts])
    checks = sum(p[1] for p in parts)
    bad = sum(p[2] for p in parts)
    if bad:
        first = next(p[3] for p in parts if p[3] >= 0)
        raise AssertionError(f"pathwise up-crossing inequality failed {bad} times; first at path {first}, seed {seed}")
    est = upcross_moment_estimate(counts, delta, cfg.confidence, derive_seed(seed, "bootstrap"))
    bound = upcross_moment_bound(spec, cfg.theta, delta, band, cfg.horizon, q, alpha)
    notes = [f"process {process}", f"pathwise inequality held in all {checks} checks",
             f"mean up-crossings {float(np.mean(counts)):.6g}"]
    return Verdict("upcross", est, bound, seed, None, False, notes)


def run_random_times(cfg: ExperimentConfig) -> Verdict:
    """``E|X_tau - X_sigma|^q`` for uniform random times against the random-time bound.

    ``sigma = T U1`` and ``tau = sigma + (T - sigma) U2``, both snapped to the
    grid; ``E((tau - sigma)/T)^alpha`` is the empirical mean over the same pairs.
    """
    if cfg.process not in (None, "fbm"):
        raise ConfigError("random_times runs on fBm")
    spec = fbm_traced_spec(cfg.hurst, cfg.p)
    q = 1.0 if cfg.q is None else float(cfg.q)
    alpha = 0.2 if cfg.alpha is None else float(cfg.alpha)
    seed = _exp_seed(cfg, "random_times")
    grid = cfg.grid
    n = grid.n_steps
    u = aux_generator(seed, slot=2).random((cfg.n_paths, 2))
    i_sigma = np.rint(u[:, 0] * n).astype(np.int64)
    if cfg.random_times_equal:
        i_tau = i_sigma.copy()
    else:
        i_tau = i_sigma + np.rint((n - i_sigma) * u[:, 1]).astype(np.int64)
    gaps = (grid.points[i_tau] - grid.points[i_sigma]) / grid.horizon
    gap_moment = float(np.mean(gaps ** alpha))

    def fn(start, block):
        rows = np.arange(block.shape[0])
        stop = start + block.shape[0]
        return np.abs(block[rows, i_tau[start:stop]] - block[rows, i_sigma[start:stop]]) ** q

    powered = np.concatenate(map_paths(FbmSampler(cfg.hurst, grid), cfg.n_paths, seed, fn, threads=cfg.threads))
    est = _mean_estimate(powered, cfg, derive_seed(seed, "bootstrap"))
    try:
        bound = upcross_random_time_bound(spec, cfg.theta, q, alpha, grid.horizon, min(gap_moment, 1.0))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    notes = ["uniform random times snapped to the grid",
             f"empirical E((tau-sigma)/T)^alpha = {gap_moment:.17g}"]
    return Verdict("random_times", est, bound, seed, None, False, notes)


# --- property suites -------------------------------------------------------------


Counter = Callable[[Sequence[float], CrossingBand], tuple]


def _kernel_counter(values, band):
    rep = count_upcrossings(values, band)
    return list(rep.crossing_indices), rep.count


def _dyadic_suite(n: int, seed: int) -> dict:
    rng = aux_generator(seed, slot=0)
    failures = []
    for i in range(n):
        level = int(rng.integers(1, 13))
        s0 = float(rng.integers(-4, 4))
        t0 = s0 + float(rng.integers(1, 5))
        lo, hi = sorted(int(x) for x in rng.choice((1 << level) + 1, size=2, replace=False))
        width = t0 - s0
        s = s0 + width * lo / (1 << level)
        t = s0 + width * hi / (1 << level)
        parts = dyadic_decompose(s, t, s0, t0, level)
        ok = math.isclose(parts[0].left, s, abs_tol=1e-12) and math.isclose(parts[-1].right, t, abs_tol=1e-12)
        ok = ok and all(math.isclose(x.right, y.left, abs_tol=1e-12) for x, y in zip(parts, parts[1:]))
        ok = ok and abs(sum(x.right - x.left for x in parts) - (t - s)) <= 1e-12
        levels = [x.level for x in parts]
        ok = ok and all(levels.count(m) <= 2 for m in set(levels) if m >= 1)
        for x in parts:
            size = width / (1 << x.level)
            ok = ok and 1 <= x.index <= (1 << x.level)
            ok = ok and math.isclose(x.left, s0 + (x.index - 1) * size, abs_tol=1e-12)
            ok = ok and math.isclose(x.right, s0 + x.index * size, abs_tol=1e-12)
        if not ok:
            failures.append({"case": i, "s": s, "t": t, "s0": s0, "t0": t0, "max_level": level})
    return {"name": "dyadic_suite", "cases": n, "failures": len(failures), "seed": seed, "examples": failures[:5]}


def _random_int_sequence(rng, max_len=50):
    length = int(rng.integers(1, max_len + 1))
    return rng.integers(-3, 4, size=length).astype(np.float64)


def _random_int_band(rng):
    a, b = sorted(int(x) for x in rng.choice(np.arange(-3, 4), size=2, replace=False))
    return CrossingBand(float(a), float(b))


def _counter_suite(n: int, seed: int, counter: Counter) -> dict:
    rng = aux_generator(seed, slot=0)
    failures = []
    for i in range(n):
        y = _random_int_sequence(rng)
        band = _random_int_band(rng)
        times, u = counter(y, band)
        ref_times, ref_u = count_upcrossings_literal(y, band)
        ok = list(times) == ref_times and u == ref_u
        # widening the band never adds crossings
        wide = CrossingBand(band.a - float(rng.integers(0, 2)), band.b + float(rng.integers(0, 2)))
        ok = ok and counter(y, wide)[1] <= u
        # thinning the sample set never adds crossings
        keep = rng.random(y.size) < 0.5
        if keep.any():
            ok = ok and counter(y[keep], band)[1] <= u
        if not ok:
            failures.append({"case": i, "values": y.tolist(), "band": [band.a, band.b]})
    return {"name": "counter_suite", "cases": n, "failures": len(failures), "seed": seed, "examples": failures[:5]}


def _lemma3_suite(n: int, seed: int, counter: Counter) -> dict:
    rng = aux_generator(seed, slot=0)
    failures = []
    for i in range(n):
        length = int(rng.integers(2, 65))
        y = np.concatenate([[0.0], np.cumsum(rng.standard_normal(length - 1))])
        a = float(rng.uniform(-2.0, 1.0))
        band = CrossingBand(a, a + float(rng.uniform(0.05, 2.0)))
        u = counter(y, band)[1]
        k = int(rng.integers(1, u + 3))
        if not lemma3_pathwise_check(y, None, band, k):
            failures.append({"case": i, "values": y.tolist(), "band": [band.a, band.b], "k": k})
    return {"name": "lemma3_suite", "cases": n, "failures": len(failures), "seed": seed, "examples": failures[:5]}


def run_suites(cfg: ExperimentConfig | None = None, counter: Counter | None = None,
               which: Sequence[str] = ("dyadic_suite", "lemma3_suite")) -> dict:
    """Property suites for the dyadic cover and the up-crossing counter.

    ``lemma3_suite`` covers exact agreement of ``counter`` with the literal
    hitting-time evaluation, band and sampling monotonicity, and the pathwise
    up-crossing inequality.  Passing a deliberately broken ``counter`` must
    produce failures.
    """
    cfg = ExperimentConfig() if cfg is None else cfg
    counter = _kernel_counter if counter is None else counter
    n = int(cfg.suite_samples)
    results = []
    if "dyadic_suite" in which:
        results.append(_dyadic_suite(n, _exp_seed(cfg, "dyadic_suite")))
    if "lemma3_suite" in which:
        results.append(_counter_suite(n, _exp_seed(cfg, "counter_suite"), counter))
        results.append(_lemma3_suite(n, _exp_seed(cfg, "lemma3_suite"), counter))
    return {"suites": results, "failures": sum(r["failures"] for r in results)}


# --- drivers -------------------------------------------------------------------


_RUNNERS = {
    "doob_lq": run_doob_lq,
    "sup_tail_fbm": run_sup_tail_fbm,
    "sup_tail_series": run_sup_tail_series,
    "marginal_tail_fbm": run_marginal_tail_fbm,
    "upcross": run_upcross,
    "random_times": run_random_times,
}


def run_experiment(cfg: ExperimentConfig) -> list[Verdict]:
    """Verdicts of one non-suite experiment, always as a list."""
    try:
        runner = _RUNNERS[cfg.experiment]
    except KeyError:
        raise ConfigError(f"{cfg.experiment!r} is not a verdict-producing experiment") from None
    out = runner(cfg)
    return out if isinstance(out, list) else [out]


def run_all(cfg: ExperimentConfig | None = None) -> dict:
    """Run ``cfg.experiment`` (or every experiment for ``'all'``) and assemble a report."""
    cfg = ExperimentConfig() if cfg is None else cfg
    names = EXPERIMENTS if cfg.experiment == "all" else (cfg.experiment,)
    verdicts = []
    for name in names:
        if name in _RUNNERS:
            verdicts.extend(run_experiment(cfg.with_experiment(name)))
    suite_names = [n for n in names if n.endswith("_suite")]
    suites = run_suites(cfg, which=suite_names) if suite_names else {"suites": [], "failures": 0}
    failed = sum(not v.passed for v in verdicts)
    return {
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "verdicts": [v.to_dict() for v in verdicts],
        "suites": suites,
        "summary": {
            "verdicts": len(verdicts),
            "failed_verdicts": failed,
            "vacuous_verdicts": sum(v.vacuous for v in verdicts),
            "suite_failures": suites["failures"],
            "all_passed": failed == 0 and suites["failures"] == 0,
        },
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _g(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def report_to_csv(report: dict) -> str:
    """Summary table ``experiment,lambda,empirical,ci_high,bound,pass,margin``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["experiment", "lambda", "empirical", "ci_high", "bound", "pass", "margin"])
    for v in report["verdicts"]:
        w.writerow([v["experiment"], _g(v["lambda"]), _g(v["empirical"]["point"]), _g(v["empirical"]["ci_high"]),
                    _g(v["bound"]["value"]), "true" if v["pass"] else "false", _g(v["margin"])])
    return buf.getvalue()
