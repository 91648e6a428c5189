"""Pathwise and ensemble statistics.

Up-crossing counts follow the hitting-time construction on a finite grid
with strict inequalities (``Y < a`` starts a crossing, ``Y > b`` completes
it).  Suprema are grid maxima and therefore under-estimate the continuous-time
supremum, which is the safe direction when checking upper bounds.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import stats

from . import kernels
from .errors import DomainError
from .processes import PathEnsemble, TimeGrid
from .streams import aux_generator

__all__ = [
    "CrossingBand",
    "UpcrossingReport",
    "EmpiricalEstimate",
    "DyadicInterval",
    "dyadic_decompose",
    "path_supremum",
    "empirical_tail",
    "clopper_pearson",
    "empirical_lq_norm",
    "bootstrap_mean_ci",
    "empirical_increment_coefficient",
    "count_upcrossings",
    "count_upcrossings_literal",
    "lemma3_pathwise_check",
    "empirical_upcross_delta_moment",
    "upcross_moment_estimate",
    "BOOTSTRAP_RESAMPLES",
]

BOOTSTRAP_RESAMPLES = 2000


@dataclass(frozen=True)
class CrossingBand:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError("band levels must be finite")
        if not self.a < self.b:
            raise DomainError(f"band needs a < b, got a={self.a}, b={self.b}")

    @property
    def width(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class UpcrossingReport:
    band: CrossingBand
    crossing_indices: tuple
    crossing_times: tuple
    count: int

    def to_dict(self) -> dict:
        return {
            "band": {"a": self.band.a, "b": self.band.b},
            "crossing_indices": list(self.crossing_indices),
            "crossing_times": list(self.crossing_times),
            "count": self.count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class EmpiricalEstimate:
    point: float
    ci_low: float
    ci_high: float
    n: int
    confidence: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("an estimate needs at least one sample")
        if not self.ci_low <= self.point <= self.ci_high:
            raise DomainError(
                f"interval [{self.ci_low}, {self.ci_high}] does not contain point {self.point}"
            )

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class DyadicInterval:
    level: int
    index: int
    left: float
    right: float

    @property
    def endpoints(self) -> tuple[float, float]:
        return (self.left, self.right)


# --- dyadic cover ------------------------------------------------------------


def _mesh_position(x: float, s0: float, t0: float, max_level: int) -> int:
    pos = (x - s0) / (t0 - s0) * 2 ** max_level
    k = round(pos)
    if abs(pos - k) > 1e-9 * max(1.0, abs(pos)):
        raise DomainError(f"{x!r} is not on the level-{max_level} dyadic mesh of [{s0}, {t0}]")
    return int(k)


def dyadic_decompose(s: float, t: float, s0: float, t0: float, max_level: int) -> list[DyadicInterval]:
    """Cover ``[s, t]`` by disjoint dyadic subintervals of ``[s0, t0]``.

    Walks left to right, each time taking the largest aligned dyadic interval
    that starts at the current point and fits.  Sizes first grow strictly and
    then shrink strictly, so each level appears at most twice.
    """
    max_level = int(max_level)
    if max_level < 0:
        raise DomainError("max_level must be non-negative")
    if not (s0 <= s < t <= t0):
        raise DomainError(f"need s0 <= s < t <= t0, got s={s}, t={t}, s0={s0}, t0={t0}")
    lo = _mesh_position(s, s0, t0, max_level)
    hi = _mesh_position(t, s0, t0, max_level)
    full = 1 << max_level
    width = t0 - s0
    out = []
    pos = lo
    while pos < hi:
        size = full if pos == 0 else pos & -pos
        while pos + size > hi:
            size >>= 1
        level = max_level - (size.bit_length() - 1)
        index = pos // size + 1
        frac_l = Fraction(pos, full)
        frac_r = Fraction(pos + size, full)
        out.append(
            DyadicInterval(
                level,
                index,
                s0 + width * frac_l.numerator / frac_l.denominator,
                s0 + width * frac_r.numerator / frac_r.denominator,
            )
        )
        pos += size
    return out


# --- suprema and tails --------------------------------------------------------


def path_supremum(values: Sequence[float]) -> float:
    """``max_j |X_{t_j}|``."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise DomainError("supremum of an empty path")
    return float(np.max(np.abs(arr)))


def clopper_pearson(successes: int, n: int, confidence: float) -> tuple[float, float]:
    """Exact two-sided binomial interval."""
    if not 0 < confidence < 1:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence}")
    if n < 1 or not 0 <= successes <= n:
        raise DomainError(f"need 0 <= successes <= n and n >= 1, got {successes}/{n}")
    tail = 0.5 * (1.0 - confidence)
    low = 0.0 if successes == 0 else float(stats.beta.ppf(tail, successes, n - successes + 1))
    high = 1.0 if successes == n else float(stats.beta.ppf(1.0 - tail, successes + 1, n - successes))
    return low, high


def empirical_tail(suprema: Sequence[float], lam: float, confidence: float) -> EmpiricalEstimate:
    """Fraction of samples ``>= lam`` with a Clopper-Pearson interval."""
    arr = np.asarray(suprema, dtype=np.float64)
    if arr.size == 0:
        raise DomainError("empirical tail of an empty sample")
    k = int(np.count_nonzero(arr >= lam))
    n = int(arr.size)
    low, high = clopper_pearson(k, n, confidence)
    point = k / n
    return EmpiricalEstimate(point, min(low, point), max(high, point), n, float(confidence))


def bootstrap_mean_ci(samples: np.ndarray, confidence: float, seed: int,
                      resamples: int = BOOTSTRAP_RESAMPLES) -> tuple[float, float]:
    """Percentile bootstrap interval of the sample mean.

    Resampling indices come from the auxiliary stream of ``seed``, so the
    interval is reproducible.
    """
    x = np.asarray(samples, dtype=np.float64)
    n = x.size
    rng = aux_generator(seed, slot=1)
    means = np.empty(resamples)
    # batch size keeps the index matrix around 8 MB
    batch = max(1, min(resamples, 1_000_000 // max(n, 1)))
    for start in range(0, resamples, batch):
        stop = min(start + batch, resamples)
        idx = rng.integers(0, n, size=(stop - start, n))
        means[start:stop] = x[idx].mean(axis=1)
    tail = 0.5 * (1.0 - confidence)
    low, high = np.quantile(means, [tail, 1.0 - tail])
    return float(low), float(high)


def empirical_lq_norm(samples: Sequence[float], q: float, confidence: float, seed: int = 0,
                      resamples: int = BOOTSTRAP_RESAMPLES) -> EmpiricalEstimate:
    """``(mean x^q)^(1/q)`` with a percentile-bootstrap interval."""
    x = np.abs(np.asarray(samples, dtype=np.float64))
    if x.size == 0:
        raise DomainError("L^q norm of an empty sample")
    if not q >= 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if not 0 < confidence < 1:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence}")
    powered = x ** q
    point = float(np.mean(powered)) ** (1.0 / q)
    low, high = bootstrap_mean_ci(powered, confidence, seed, resamples)
    low, high = low ** (1.0 / q), high ** (1.0 / q)
    return EmpiricalEstimate(point, min(low, point), max(high, point), int(x.size), float(confidence))


def empirical_increment_coefficient(ensemble: PathEnsemble, p: float, h: float) -> float:
    """Largest ratio ``mean|X_t - X_s|^p / |t - s|^(p h)`` over all grid pairs.

    Only ``p, h > 0`` is required; the bounds themselves need ``p h > 1``.
    """
    if not (p > 0 and h > 0):
        raise DomainError(f"need p > 0 and h > 0, got p={p}, h={h}")
    means = kernels.pair_moment_means(ensemble.values, float(p))
    t = ensemble.grid.points
    gap = np.abs(t[:, None] - t[None, :])
    iu = np.triu_indices(t.size, k=1)
    return float(np.max(means[iu] / gap[iu] ** (p * h)))


# --- up-crossings --------------------------------------------------------------


def count_upcrossings(values: Sequence[float], band: CrossingBand,
                      grid: TimeGrid | None = None) -> UpcrossingReport:
    """Hitting indices ``T_0, T_1, ...`` and the up-crossing count of one path."""
    y = np.ascontiguousarray(values, dtype=np.float64)
    if y.size == 0:
        raise DomainError("up-crossings of an empty path")
    idx = kernels.upcross_times(y, band.a, band.b)
    if grid is not None:
        times = tuple(float(grid.points[i]) for i in idx)
    else:
        times = tuple(float(i) for i in idx)
    return UpcrossingReport(band, tuple(int(i) for i in idx), times, len(idx) // 2)


def count_upcrossings_literal(values: Sequence[float], band: CrossingBand) -> tuple[list[int], int]:
    """Reference evaluation straight from the hitting-time definition.

    Every ``T_j`` is recomputed from ``T_0`` on, and ``U`` is the largest ``k``
    with ``T_(2k-1)`` defined.  Quadratic or worse in the path length; for
    testing only.
    """
    y = [float(v) for v in values]
    n = len(y)

    def hitting(j):
        prev = -1
        for i in range(j + 1):
            if i % 2 == 0:
                nxt = next((t for t in range(prev + 1, n) if y[t] < band.a), None)
            else:
                nxt = next((t for t in range(prev + 1, n) if y[t] > band.b), None)
            if nxt is None:
                return None
            prev = nxt
        return prev

    times = []
    while (t := hitting(len(times))) is not None:
        times.append(t)
    u = 0
    k = 1
    while 2 * k - 1 < len(times):
        u = k
        k += 1
    return times, u


def lemma3_pathwise_check(values: Sequence[float], grid: TimeGrid | None, band: CrossingBand, k: int) -> bool:
    """Whether ``(b-a) 1{U>=k}`` is dominated by the hitting-time increment bound.

    Undefined hitting times count as infinite; a time capped at the horizon
    reads the terminal value.  ``grid`` is accepted for symmetry with
    :func:`count_upcrossings` and does not affect the result.
    """
    if int(k) < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    y = np.ascontiguousarray(values, dtype=np.float64)
    times = kernels.upcross_times(y, band.a, band.b)
    count = len(times)
    u = count // 2
    lo, hi = 2 * k - 2, 2 * k - 1
    y_end = y[-1]
    y_lo = y[times[lo]] if lo < count else y_end
    y_hi = y[times[hi]] if hi < count else y_end
    lhs = band.width if u >= k else 0.0
    rhs = y_hi - y_lo
    if lo < count and hi >= count:
        rhs = -(y_end - y_lo) + rhs
    return bool(lhs <= rhs)


def empirical_upcross_delta_moment(ensemble: PathEnsemble | np.ndarray, band: CrossingBand, delta: float,
                                   confidence: float, seed: int = 0) -> EmpiricalEstimate:
    """Sample mean of ``U^delta`` with a percentile-bootstrap interval."""
    values = ensemble.values if isinstance(ensemble, PathEnsemble) else np.asarray(ensemble, dtype=np.float64)
    counts = kernels.upcross_counts(np.ascontiguousarray(values), band.a, band.b)
    return upcross_moment_estimate(counts, delta, confidence, seed)


def upcross_moment_estimate(counts: np.ndarray, delta: float, confidence: float, seed: int = 0) -> EmpiricalEstimate:
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    counts = np.asarray(counts)
    if counts.size == 0:
        raise DomainError("empty ensemble")
    powered = counts.astype(np.float64) ** delta
    point = float(np.mean(powered))
    low, high = bootstrap_mean_ci(powered, confidence, seed)
    return EmpiricalEstimate(point, min(low, point), max(high, point), int(counts.size), float(confidence))
