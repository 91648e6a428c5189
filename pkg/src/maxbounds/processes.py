"""Sampling of the example processes on finite time grids.

Three families are provided: fractional Brownian motion (exact, via a dense
Cholesky factor of the grid covariance), a Rademacher random-walk martingale,
and truncated Rademacher cosine series.  Paths are generated in fixed-size
blocks; every path draws from its own keyed stream (see
:mod:`maxbounds.streams`), so ensembles are bit-identical for any number of
worker threads.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import ConfigError, DomainError, GenerationError
from .streams import PathStreams, normalize_seed

__all__ = [
    "TimeGrid",
    "PathEnsemble",
    "SeriesSpec",
    "BLOCK_SIZE",
    "fbm_covariance",
    "fbm_cholesky",
    "simulate_fbm",
    "simulate_random_walk_martingale",
    "simulate_rademacher_series",
    "series_sigma_sq",
    "series_weight_sum",
    "series_holder_constants",
    "series_tail_integral",
    "required_k_max",
    "FbmSampler",
    "RandomWalkSampler",
    "SeriesSampler",
    "map_paths",
]

BLOCK_SIZE = 1024


class TimeGrid:
    """Strictly increasing grid ``0 = t_0 < ... < t_N = horizon``."""

    __slots__ = ("points",)

    def __init__(self, points):
        pts = np.array(points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < 2:
            raise DomainError("a time grid needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise DomainError("time grid points must be finite")
        if pts[0] != 0.0:
            raise DomainError(f"time grid must start at 0, got {pts[0]}")
        if not np.all(np.diff(pts) > 0):
            raise DomainError("time grid must be strictly increasing")
        pts.setflags(write=False)
        self.points = pts

    @classmethod
    def uniform(cls, horizon: float, n_steps: int) -> "TimeGrid":
        if not horizon > 0:
            raise DomainError(f"horizon must be positive, got {horizon}")
        if int(n_steps) < 1:
            raise DomainError(f"n_steps must be >= 1, got {n_steps}")
        n_steps = int(n_steps)
        pts = horizon * (np.arange(n_steps + 1) / n_steps)
        pts[-1] = horizon
        return cls(pts)

    @property
    def horizon(self) -> float:
        return float(self.points[-1])

    @property
    def n_steps(self) -> int:
        return self.points.size - 1

    def __len__(self):
        return self.points.size

    def __eq__(self, other):
        return isinstance(other, TimeGrid) and np.array_equal(self.points, other.points)

    def __repr__(self):
        return f"TimeGrid(horizon={self.horizon!r}, n_steps={self.n_steps})"

    def to_dict(self) -> dict:
        return {"horizon": self.horizon, "points": self.points.tolist()}


@dataclass(frozen=True)
class SeriesSpec:
    """Truncated series ``sum_k scale * k^-gamma * xi_k * cos(2 pi k t)``.

    ``tail_tol`` bounds the neglected tail of ``sum a_k^2 (f_k(0)^2 + L_k^2)``
    relative to the retained part; ``None`` accepts the finite series as is.
    """

    coeff_gamma: float
    k_max: int
    holder_h: float
    family: str = "cosine"
    scale: float = 1.0
    tail_tol: float | None = 1e-6

    def __post_init__(self):
        if self.family != "cosine":
            raise DomainError(f"unknown series family {self.family!r}; only 'cosine' is supported")
        if not 0 < self.holder_h < 1:
            raise DomainError(f"series Holder index must lie in (0, 1), got {self.holder_h}")
        if not 2 * self.coeff_gamma - 2 * self.holder_h > 1:
            raise DomainError("series needs 2*gamma - 2*h > 1 for sum a_k^2 L_k^2 to converge")
        if int(self.k_max) < 1 or int(self.k_max) != self.k_max:
            raise DomainError(f"k_max must be a positive integer, got {self.k_max}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DomainError(f"scale must be positive, got {self.scale}")

    def coefficients(self) -> np.ndarray:
        k = np.arange(1, int(self.k_max) + 1, dtype=np.float64)
        return self.scale * k ** (-self.coeff_gamma)

    def lipschitz_base(self) -> float:
        """``2^(1-h) (2 pi)^h``: ``L_k`` is this times ``k^h``."""
        h = self.holder_h
        return 2.0 ** (1.0 - h) * (2.0 * math.pi) ** h

    def to_dict(self) -> dict:
        return {
            "coeff_gamma": self.coeff_gamma,
            "k_max": int(self.k_max),
            "holder_h": self.holder_h,
            "family": self.family,
            "scale": self.scale,
            "tail_tol": self.tail_tol,
        }


def series_holder_constants(spec: SeriesSpec) -> np.ndarray:
    """``L_k = 2^(1-h) (2 pi k)^h`` for the cosine family."""
    k = np.arange(1, int(spec.k_max) + 1, dtype=np.float64)
    return spec.lipschitz_base() * k ** spec.holder_h


def series_weight_sum(spec: SeriesSpec) -> float:
    """``sum_k a_k^2 L_k^2`` over the retained terms."""
    a = spec.coefficients()
    return math.fsum((a * series_holder_constants(spec)) ** 2)


def series_sigma_sq(spec: SeriesSpec) -> float:
    """``sum_k a_k^2 (f_k(0)^2 + L_k^2)`` over the retained terms (``f_k(0) = 1``)."""
    a2 = spec.coefficients() ** 2
    l2 = series_holder_constants(spec) ** 2
    return math.fsum(a2 * (1.0 + l2))


def series_tail_integral(spec: SeriesSpec, k_max: int | None = None) -> float:
    """Integral upper bound of the neglected tail ``sum_{k > K} a_k^2 (1 + L_k^2)``."""
    big_k = float(spec.k_max if k_max is None else k_max)
    g, h = spec.coeff_gamma, spec.holder_h
    c2 = spec.lipschitz_base() ** 2
    return spec.scale ** 2 * (
        big_k ** (1.0 - 2.0 * g) / (2.0 * g - 1.0)
        + c2 * big_k ** (1.0 + 2.0 * h - 2.0 * g) / (2.0 * g - 2.0 * h - 1.0)
    )


def required_k_max(coeff_gamma: float, holder_h: float, scale: float = 1.0, tail_tol: float = 1e-6) -> int:
    """Smallest ``K`` whose integral tail bound is below ``tail_tol`` times the retained sum."""
    def ok(k: int) -> bool:
        s = SeriesSpec(coeff_gamma, k, holder_h, scale=scale, tail_tol=None)
        return series_tail_integral(s) < tail_tol * series_sigma_sq(s)

    if ok(1):
        return 1
    hi = 2
    while not ok(hi):
        hi *= 2
        if hi > 1 << 26:
            raise ConfigError("series tail decays too slowly; no k_max below 2^26 meets the tolerance")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class PathEnsemble:
    """``M`` sampled paths on a shared grid plus what is needed to regenerate them."""

    grid: TimeGrid
    values: np.ndarray
    seed: int
    generator_id: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.grid):
            raise DomainError(
                f"values must have shape (M, {len(self.grid)}), got {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise DomainError("ensemble values must be finite")

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    def regenerate(self, threads: int = 1) -> "PathEnsemble":
        try:
            fn = _GENERATORS[self.generator_id]
        except KeyError:
            raise ConfigError(f"cannot regenerate unknown generator {self.generator_id!r}") from None
        return fn(self.grid, self.n_paths, self.seed, self.params, threads)

    # --- serialization -------------------------------------------------

    def to_csv(self, fh=None) -> str | None:
        """Header of grid times, then one row per path; 17 significant digits, LF endings."""
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([format(t, ".17g") for t in self.grid.points])
        for row in self.values:
            w.writerow([format(v, ".17g") for v in row])
        return buf.getvalue() if fh is None else None

    @classmethod
    def from_csv(cls, source, seed: int = 0, generator_id: str = "csv", params: dict | None = None):
        text = source.read() if hasattr(source, "read") else str(source)
        rows = list(csv.reader(io.StringIO(text)))
        rows = [r for r in rows if r]
        if len(rows) < 2:
            raise ConfigError("ensemble CSV needs a header row and at least one path")
        grid = TimeGrid([float(x) for x in rows[0]])
        values = np.array([[float(x) for x in r] for r in rows[1:]], dtype=np.float64)
        return cls(grid, values, seed, generator_id, dict(params or {}))

    def to_json(self) -> str:
        return json.dumps(
            {
                "generator_id": self.generator_id,
                "seed": self.seed,
                "params": self.params,
                "grid": self.grid.to_dict(),
                "values": self.values.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PathEnsemble":
        d = json.loads(text)
        return cls(TimeGrid(d["grid"]["points"]), np.array(d["values"]), d["seed"], d["generator_id"], d["params"])


# --- samplers -------------------------------------------------------------


def map_paths(sampler, n_paths: int, seed: int, fn: Callable[[int, np.ndarray], Any] | None = None,
              threads: int = 1, block_size: int = BLOCK_SIZE) -> list:
    """Generate paths block by block and apply ``fn(start, block)`` to each.

    Returns the per-block results in path order.  Block boundaries depend only
    on ``block_size``, never on ``threads``.
    """
    n_paths = int(n_paths)
    if n_paths < 1:
        raise DomainError(f"n_paths must be >= 1, got {n_paths}")
    seed = normalize_seed(seed)
    starts = list(range(0, n_paths, block_size))

    def task(start):
        stop = min(start + block_size, n_paths)
        block = sampler.block(PathStreams(seed), start, stop)
        return block if fn is None else fn(start, block)

    threads = max(1, int(threads))
    if threads == 1 or len(starts) == 1:
        return [task(s) for s in starts]
    out = []
    with ThreadPoolExecutor(max_workers=threads) as ex:
        # bounded window keeps at most `threads` blocks alive at once
        for i in range(0, len(starts), threads):
            out.extend(ex.map(task, starts[i:i + threads]))
    return out


def fbm_covariance(h: float, grid: TimeGrid) -> np.ndarray:
    """``Cov(B_t, B_s) = (t^2h + s^2h - |t-s|^2h) / 4`` on the positive grid points.

    This is the normalization with ``Var(B_t - B_s) = |t-s|^2h / 2``.
    """
    t = grid.points[1:]
    t2h = t ** (2.0 * h)
    return 0.25 * (t2h[:, None] + t2h[None, :] - np.abs(t[:, None] - t[None, :]) ** (2.0 * h))


def fbm_cholesky(h: float, grid: TimeGrid) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of :func:`fbm_covariance`, with bounded diagonal jitter.

    Returns ``(factor, jitter)``.  Up to three retries add ``1e-12``, ``1e-11``
    and ``1e-10`` times the largest diagonal entry.
    """
    cov = fbm_covariance(h, grid)
    scale = float(np.max(np.diag(cov)))
    jitter = 0.0
    for attempt in range(4):
        try:
            mat = cov if jitter == 0.0 else cov + jitter * np.eye(cov.shape[0])
            return np.linalg.cholesky(mat), jitter
        except np.linalg.LinAlgError:
            jitter = 1e-12 * scale * 10.0 ** attempt
    min_eig = float(np.linalg.eigvalsh(cov)[0])
    raise GenerationError(
        f"fBm covariance (h={h}, N={grid.n_steps}) is not positive definite after jitter; "
        f"minimum eigenvalue estimate {min_eig:.3e}"
    )


class FbmSampler:
    generator_id = "fbm"

    def __init__(self, h: float, grid: TimeGrid):
        if not 0 < h < 1:
            raise DomainError(f"Hurst index must lie in (0, 1), got {h}")
        self.h = float(h)
        self.grid = grid
        self.factor, self.jitter = fbm_cholesky(self.h, grid)
        self._factor_t = np.ascontiguousarray(self.factor.T)

    def params(self) -> dict:
        return {"h": self.h, "jitter": self.jitter}

    def normals(self, streams: PathStreams, start: int, stop: int) -> np.ndarray:
        n = self.grid.n_steps
        z = np.empty((stop - start, n))
        for r, i in enumerate(range(start, stop)):
            z[r] = streams.stream(i).standard_normal(n)
        return z

    def block(self, streams: PathStreams, start: int, stop: int) -> np.ndarray:
        out = np.zeros((stop - start, len(self.grid)))
        out[:, 1:] = self.normals(streams, start, stop) @ self._factor_t
        return out


class RandomWalkSampler:
    generator_id = "random_walk"

    def __init__(self, grid: TimeGrid):
        self.grid = grid
        self._steps = np.sqrt(np.diff(grid.points))

    def params(self) -> dict:
        return {}

    def block(self, streams: PathStreams, start: int, stop: int) -> np.ndarray:
        n = self.grid.n_steps
        signs = np.empty((stop - start, n))
        for r, i in enumerate(range(start, stop)):
            signs[r] = streams.stream(i).integers(0, 2, size=n)
        signs = 2.0 * signs - 1.0
        out = np.zeros((stop - start, n + 1))
        np.cumsum(signs * self._steps, axis=1, out=out[:, 1:])
        return out


class SeriesSampler:
    generator_id = "rademacher_series"

    def __init__(self, spec: SeriesSpec, grid: TimeGrid):
        self.spec = spec
        self.grid = grid
        self.sigma_sq = series_sigma_sq(spec)
        if spec.tail_tol is not None:
            tail = series_tail_integral(spec)
            if not tail < spec.tail_tol * self.sigma_sq:
                need = required_k_max(spec.coeff_gamma, spec.holder_h, spec.scale, spec.tail_tol)
                raise ConfigError(
                    f"series truncated at k_max={spec.k_max} leaves a tail bound {tail:.3e} "
                    f">= {spec.tail_tol:g} * sigma^2; use k_max >= {need}"
                )
        k = np.arange(1, int(spec.k_max) + 1, dtype=np.float64)
        self._coef = spec.coefficients()
        self._basis = np.cos(2.0 * np.pi * k[:, None] * grid.points[None, :])

    def params(self) -> dict:
        d = self.spec.to_dict()
        d["sigma_sq"] = self.sigma_sq
        return d

    def block(self, streams: PathStreams, start: int, stop: int) -> np.ndarray:
        k_max = int(self.spec.k_max)
        signs = np.empty((stop - start, k_max))
        for r, i in enumerate(range(start, stop)):
            signs[r] = streams.stream(i).integers(0, 2, size=k_max)
        signs = 2.0 * signs - 1.0
        return (signs * self._coef) @ self._basis


def _ensemble(sampler, n_paths, seed, threads) -> PathEnsemble:
    blocks = map_paths(sampler, n_paths, seed, threads=threads)
    return PathEnsemble(sampler.grid, np.vstack(blocks), normalize_seed(seed), sampler.generator_id, sampler.params())


def simulate_fbm(h: float, grid: TimeGrid, n_paths: int, seed: int, threads: int = 1) -> PathEnsemble:
    """Exact fractional Brownian motion paths with ``B_0 = 0``."""
    return _ensemble(FbmSampler(h, grid), n_paths, seed, threads)


def simulate_random_walk_martingale(grid: TimeGrid, n_paths: int, seed: int, threads: int = 1) -> PathEnsemble:
    """``M_{t_j} = sum_{i <= j} sqrt(t_i - t_{i-1}) xi_i`` with Rademacher ``xi_i``."""
    return _ensemble(RandomWalkSampler(grid), n_paths, seed, threads)


def simulate_rademacher_series(spec: SeriesSpec, grid: TimeGrid, n_paths: int, seed: int,
                               threads: int = 1) -> PathEnsemble:
    return _ensemble(SeriesSampler(spec, grid), n_paths, seed, threads)


def _regen_fbm(grid, n, seed, params, threads):
    return simulate_fbm(params["h"], grid, n, seed, threads)


def _regen_rw(grid, n, seed, params, threads):
    return simulate_random_walk_martingale(grid, n, seed, threads)


def _regen_series(grid, n, seed, params, threads):
    keys = ("coeff_gamma", "k_max", "holder_h", "family", "scale", "tail_tol")
    return simulate_rademacher_series(SeriesSpec(**{k: params[k] for k in keys}), grid, n, seed, threads)


_GENERATORS = {
    "fbm": _regen_fbm,
    "random_walk": _regen_rw,
    "rademacher_series": _regen_series,
}
