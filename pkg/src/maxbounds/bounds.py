"""Theorem-level bounds, each returned as a recomputable :class:`BoundReport`.

A report's ``params`` hold exactly the keyword arguments of the function that
produced it (specs as nested dicts), so :func:`recompute` can replay it.
Derived quantities (constants, optimal block counts, clamped values) live in
``derived``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

from .constants import (
    HolderSpec,
    TailDecaySpec,
    a_p_fbm,
    a_ph_series,
    c_ph_theta,
    default_theta,
    gamma_fn,
    k_delta,
    k_q_alpha,
    k_theorem,
    log_c_ph_theta,
)
from .errors import DomainError, OutOfRegimeError, RangeError
from .estimators import CrossingBand
from .processes import SeriesSpec, series_sigma_sq, series_weight_sum

__all__ = [
    "BoundReport",
    "lemma1_sup_moment_bound",
    "prop1_lq_bound",
    "marginal_moment_bound",
    "theorem_tail_bound",
    "union_tail_bound",
    "fbm_marginal_tail",
    "fbm_sup_bound",
    "fbm_sup_bound_general",
    "fbm_sup_constant",
    "fbm_traced_spec",
    "series_sup_constants",
    "series_tail_bounds",
    "upcross_random_time_bound",
    "upcross_moment_bound",
    "recompute",
]

UNSPECIFIED_NOTE = "universal constant left unspecified by the source result; artifact default used"
_SQRT_PI = math.sqrt(math.pi)


@dataclass
class BoundReport:
    name: str
    value: float
    params: dict
    derived: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise RangeError(f"{self.name} evaluated to a non-finite value")
        if self.value < 0:
            raise DomainError(f"{self.name} evaluated to a negative value {self.value}")

    @property
    def clamped(self) -> float:
        return min(self.value, 1.0)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "params": self.params,
            "derived": self.derived,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv_row(self) -> str:
        """``name,value,key=value,...`` with nested keys dotted, 17 significant digits."""
        cells = [self.name, _fmt(self.value)]
        for key, val in _flatten(self.params):
            cells.append(f"{key}={_fmt(val)}")
        return ",".join(cells)


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _flatten(d: dict, prefix: str = ""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, v


def _theta(spec: HolderSpec, theta):
    return default_theta(spec.p) if theta is None else float(theta)


def _positive(x: float, what: str) -> float:
    x = float(x)
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"{what} must be positive and finite, got {x}")
    return x


def lemma1_sup_moment_bound(spec: HolderSpec, theta: float | None, s0: float, t0: float) -> BoundReport:
    """``C_(p,h,theta) A_(p,h) (t0 - s0)^(p h)`` for the sup of conditional increments."""
    if not s0 < t0:
        raise DomainError(f"need s0 < t0, got {s0}, {t0}")
    theta = _theta(spec, theta)
    c = c_ph_theta(spec, theta)
    value = c * spec.a_ph * (t0 - s0) ** spec.ph
    return BoundReport(
        "lemma1_sup_moment_bound",
        value,
        {"spec": spec.to_dict(), "theta": theta, "s0": s0, "t0": t0},
        {"c_ph_theta": c},
    )


def prop1_lq_bound(spec: HolderSpec, theta: float | None, q: float, s0: float, t0: float,
                   terminal_lq: float) -> BoundReport:
    """Doob-type bound ``q/(q-1) [C^(1/p) A^(1/p) (t0-s0)^h + ||X_t0||_q]``."""
    if not 1 < q <= spec.p:
        raise DomainError(f"need 1 < q <= p = {spec.p}, got q={q}")
    if not s0 < t0:
        raise DomainError(f"need s0 < t0, got {s0}, {t0}")
    if not (terminal_lq >= 0 and math.isfinite(terminal_lq)):
        raise DomainError(f"terminal_lq must be finite and >= 0, got {terminal_lq}")
    theta = _theta(spec, theta)
    c = c_ph_theta(spec, theta)
    drift = (c * spec.a_ph) ** (1.0 / spec.p) * (t0 - s0) ** spec.h
    doob = q / (q - 1.0)
    value = doob * (drift + terminal_lq)
    return BoundReport(
        "prop1_lq_bound",
        value,
        {"spec": spec.to_dict(), "theta": theta, "q": q, "s0": s0, "t0": t0, "terminal_lq": terminal_lq},
        {"c_ph_theta": c, "doob_constant": doob, "drift_term": drift},
    )


def marginal_moment_bound(tail: TailDecaySpec, q: float) -> BoundReport:
    """``E|X_t|^q <= C D^(-q/alpha) Gamma(q/alpha + 1)``."""
    q = _positive(q, "q")
    r = q / tail.alpha
    value = tail.c * tail.d ** (-r) * gamma_fn(r + 1.0)
    return BoundReport("marginal_moment_bound", value, {"tail": tail.to_dict(), "q": q})


def theorem_tail_bound(spec: HolderSpec, tail: TailDecaySpec, theta: float | None, t_horizon: float,
                       lam: float) -> BoundReport:
    """``P(sup|X| >= 2 lam) <= K lam^(-1/h) exp(-(1 - 1/(ph)) D lam^alpha)``, ``lam >= delta0``."""
    lam = _positive(lam, "lambda")
    if lam < tail.delta0:
        raise OutOfRegimeError(f"bound holds for lambda >= delta0 = {tail.delta0}, got {lam}")
    theta = _theta(spec, theta)
    t_horizon = _positive(t_horizon, "t_horizon")
    k = k_theorem(spec, tail, theta, t_horizon)
    e = 1.0 - 1.0 / spec.ph
    value = k * lam ** (-1.0 / spec.h) * math.exp(-e * tail.d * lam ** tail.alpha)
    derived = {"K": k, "clamped": min(value, 1.0)}
    if spec.a_ph > 0:
        log_n = (log_c_ph_theta(spec, theta) + math.log(spec.a_ph) + spec.ph * math.log(t_horizon)
                 - spec.p * math.log(lam) + tail.d * lam ** tail.alpha) / spec.ph
        derived["n_opt"] = math.floor(math.exp(log_n)) if log_n < 700 else None
    else:
        derived["n_opt"] = None
    return BoundReport(
        "theorem_tail_bound",
        value,
        {"spec": spec.to_dict(), "tail": tail.to_dict(), "theta": theta, "t_horizon": t_horizon, "lam": lam},
        derived,
    )


def union_tail_bound(spec: HolderSpec, theta: float | None, t_horizon: float, lam: float,
                     marginal: Callable[[float], float], n_blocks: float | None = None) -> BoundReport:
    """Block union bound behind the supremum tail theorem.

    ``C A N (T/N)^(ph) / lam^p + N m(lam)`` where ``m`` bounds the marginal
    tail ``P(|X_t| >= lam)``.  With ``n_blocks=None`` the real-valued
    minimizing ``N`` is used, at which the two terms are equal.
    """
    lam = _positive(lam, "lambda")
    t_horizon = _positive(t_horizon, "t_horizon")
    theta = _theta(spec, theta)
    c = c_ph_theta(spec, theta)
    m = float(marginal(lam))
    if not (m > 0 and math.isfinite(m)):
        raise DomainError(f"marginal tail bound must be positive, got {m}")
    ca = c * spec.a_ph
    if n_blocks is None:
        n_blocks = (ca * t_horizon ** spec.ph * lam ** (-spec.p) / m) ** (1.0 / spec.ph)
    n_blocks = float(n_blocks)
    first = ca * n_blocks * (t_horizon / n_blocks) ** spec.ph / lam ** spec.p
    second = n_blocks * m
    return BoundReport(
        "union_tail_bound",
        first + second,
        {"spec": spec.to_dict(), "theta": theta, "t_horizon": t_horizon, "lam": lam, "n_blocks": n_blocks},
        {"increment_term": first, "marginal_term": second, "marginal": m},
        ["not recomputable from params alone: the marginal tail is a callable"],
    )


def fbm_marginal_tail(h: float, t: float, lam: float, two_sided: bool = False) -> BoundReport:
    """``(t^h / (2 sqrt(pi) lam)) exp(-lam^2 / t^(2h))`` for fBm with ``Var B_t = t^(2h)/2``.

    This is the Gaussian one-sided Mills bound.  ``P(|B_t| >= lam)`` is
    two-sided and can exceed it by up to a factor 2; ``two_sided=True``
    doubles the value, which then is a valid bound for ``P(|B_t| >= lam)``.
    """
    t = _positive(t, "t")
    lam = _positive(lam, "lambda")
    if not 0 < h < 1:
        raise DomainError(f"h must lie in (0, 1), got {h}")
    th = t ** h
    one_sided = th / (2.0 * _SQRT_PI * lam) * math.exp(-(lam * lam) / (th * th))
    value = 2.0 * one_sided if two_sided else one_sided
    derived = {"one_sided": one_sided, "two_sided": 2.0 * one_sided, "clamped": min(value, 1.0)}
    if t <= 1:
        derived["phi"] = math.exp(-lam * lam) / (2.0 * _SQRT_PI * lam)
    notes = [] if two_sided else ["one-sided Gaussian tail bound; two-sided probability needs factor 2"]
    return BoundReport("fbm_marginal_tail", value, {"h": h, "t": t, "lam": lam, "two_sided": two_sided},
                       derived, notes)


def fbm_traced_spec(h: float, p: float | None = None) -> HolderSpec:
    """Holder spec of fBm with ``p = 2/h`` by default and ``A = Gamma((p+1)/2)/sqrt(pi)``."""
    if not 0 < h < 1:
        raise DomainError(f"h must lie in (0, 1), got {h}")
    p = 2.0 / h if p is None else float(p)
    return HolderSpec(p, h, a_p_fbm(p))


def fbm_sup_constant(h: float, p: float | None = None, theta: float | None = None) -> float:
    """``2 [C_(p,h,theta) A_p]^(1/(ph)) (2 sqrt(pi))^-(1 - 1/(ph))``."""
    spec = fbm_traced_spec(h, p)
    theta = _theta(spec, theta)
    inv = 1.0 / spec.ph
    log_c = (math.log(2.0) + inv * (log_c_ph_theta(spec, theta) + math.log(spec.a_ph))
             - (1.0 - inv) * math.log(2.0 * _SQRT_PI))
    return math.exp(log_c)


def fbm_sup_bound(h: float, t_horizon: float, lam: float) -> BoundReport:
    """``P(sup_[0,T] |B| >= 2 lam) <= (C_h T^h / lam) exp(-lam^2 / (2 T^(2h)))``."""
    lam = _positive(lam, "lambda")
    t_horizon = _positive(t_horizon, "t_horizon")
    spec = fbm_traced_spec(h)
    theta = default_theta(spec.p)
    c_h = fbm_sup_constant(h)
    th = t_horizon ** h
    value = c_h * th / lam * math.exp(-(lam * lam) / (2.0 * th * th))
    return BoundReport(
        "fbm_sup_bound",
        value,
        {"h": h, "t_horizon": t_horizon, "lam": lam},
        {"c_h": c_h, "p": spec.p, "theta": theta, "a_p": spec.a_ph, "clamped": min(value, 1.0)},
    )


def fbm_sup_bound_general(h: float, lam: float, p: float, theta: float | None = None) -> BoundReport:
    """``2 [C_(p,h,theta) A_p]^(1/(ph)) lam^(-1/h) phi(lam)^(1 - 1/(ph))`` on ``[0, 1]``.

    ``phi(lam) = exp(-lam^2) / (2 sqrt(pi) lam)``; any ``p > 1/h`` is allowed.
    """
    lam = _positive(lam, "lambda")
    spec = fbm_traced_spec(h, p)
    theta = _theta(spec, theta)
    inv = 1.0 / spec.ph
    log_phi = -lam * lam - math.log(2.0 * _SQRT_PI * lam)
    log_v = (math.log(2.0) + inv * (log_c_ph_theta(spec, theta) + math.log(spec.a_ph))
             - math.log(lam) / h + (1.0 - inv) * log_phi)
    value = math.exp(log_v)
    return BoundReport(
        "fbm_sup_bound_general",
        value,
        {"h": h, "lam": lam, "p": spec.p, "theta": theta},
        {"a_p": spec.a_ph, "phi": math.exp(log_phi), "clamped": min(value, 1.0)},
    )


def series_sup_constants(h: float, t_horizon: float = 1.0) -> tuple[float, float]:
    """Default ``(C_h, D_h)`` for the series supremum bound, traced through the theorem.

    Uses ``p = 2/h``, ``theta = p/(p-1)``, the marginal decay ``2 exp(-lam^2/(2 sigma^2))``
    and ``A`` of the unit-weight series.  ``D_h = (1 - 1/(ph))/2``.  The factor
    ``(sqrt(sum a^2 L^2)/lam)^(1/h)`` is dropped, which is only conservative
    when ``lam >= sigma``.
    """
    if not 0 < h < 1:
        raise DomainError(f"h must lie in (0, 1), got {h}")
    p = 2.0 / h
    spec = HolderSpec(p, h, a_ph_series(p, 1.0))
    tail = TailDecaySpec(alpha=2.0, c=2.0, d=1.0)
    c_h = k_theorem(spec, tail, default_theta(p), t_horizon)
    d_h = 0.5 * (1.0 - 1.0 / spec.ph)
    return c_h, d_h


def series_tail_bounds(spec: SeriesSpec, lam: float, prefactor_k: float | None = None,
                       rate_d: float | None = None, t_horizon: float = 1.0) -> BoundReport:
    """``prefactor * exp(-rate * lam^2 / sigma^2)``.

    With ``prefactor_k`` and ``rate_d`` left as ``None`` the supremum defaults
    of :func:`series_sup_constants` are used; ``(2, 1/2)`` gives the marginal
    form.
    """
    lam = float(lam)
    if not (lam >= 0 and math.isfinite(lam)):
        raise DomainError(f"lambda must be >= 0, got {lam}")
    notes = []
    k, d = prefactor_k, rate_d
    if k is None or d is None:
        c_h, d_h = series_sup_constants(spec.holder_h, t_horizon)
        k = c_h if k is None else k
        d = d_h if d is None else d
        notes.append(UNSPECIFIED_NOTE + "; default traced through the tail theorem")
    k = _positive(k, "prefactor_k")
    d = _positive(d, "rate_d")
    sigma_sq = series_sigma_sq(spec)
    value = k * math.exp(-d * lam * lam / sigma_sq)
    return BoundReport(
        "series_tail_bounds",
        value,
        {"spec": spec.to_dict(), "lam": lam, "prefactor_k": prefactor_k, "rate_d": rate_d,
         "t_horizon": t_horizon},
        {"prefactor_k": k, "rate_d": d, "sigma_sq": sigma_sq, "weight_sum": series_weight_sum(spec),
         "clamped": min(value, 1.0)},
        notes,
    )


def upcross_random_time_bound(spec: HolderSpec, theta: float | None, q: float, alpha: float,
                              t_horizon: float, time_gap_moment: float) -> BoundReport:
    """``E|X_tau - X_sigma|^q <= K_(q,alpha) (C A)^(q/p) T^(qh) [E((tau-sigma)/T)^alpha]^(1-q/p)``."""
    if not 0 <= time_gap_moment <= 1:
        raise DomainError(f"time_gap_moment must lie in [0, 1], got {time_gap_moment}")
    t_horizon = _positive(t_horizon, "t_horizon")
    theta = _theta(spec, theta)
    kqa = k_q_alpha(q, alpha, spec)
    c = c_ph_theta(spec, theta)
    value = kqa * (c * spec.a_ph) ** (q / spec.p) * t_horizon ** (q * spec.h) \
        * time_gap_moment ** (1.0 - q / spec.p)
    return BoundReport(
        "upcross_random_time_bound",
        value,
        {"spec": spec.to_dict(), "theta": theta, "q": q, "alpha": alpha, "t_horizon": t_horizon,
         "time_gap_moment": time_gap_moment},
        {"k_q_alpha": kqa, "c_ph_theta": c},
    )


def upcross_moment_bound(spec: HolderSpec, theta: float | None, delta: float, band: CrossingBand,
                         t_horizon: float, q: float, alpha: float) -> BoundReport:
    """``E[U^delta] < K_delta T^h / (b - a)``."""
    t_horizon = _positive(t_horizon, "t_horizon")
    theta = _theta(spec, theta)
    kd = k_delta(delta, spec, theta, q, alpha)
    value = kd * t_horizon ** spec.h / band.width
    return BoundReport(
        "upcross_moment_bound",
        value,
        {"spec": spec.to_dict(), "theta": theta, "delta": delta, "band": {"a": band.a, "b": band.b},
         "t_horizon": t_horizon, "q": q, "alpha": alpha},
        {"k_delta": kd},
    )


def _holder(d):
    return HolderSpec(**d)


def _rebuild(name: str, params: dict) -> dict:
    kw = dict(params)
    if "spec" in kw:
        kw["spec"] = SeriesSpec(**kw["spec"]) if name == "series_tail_bounds" else _holder(kw["spec"])
    if "tail" in kw:
        kw["tail"] = TailDecaySpec(**kw["tail"])
    if "band" in kw:
        kw["band"] = CrossingBand(**kw["band"])
    return kw


_REGISTRY = {
    "lemma1_sup_moment_bound": lemma1_sup_moment_bound,
    "prop1_lq_bound": prop1_lq_bound,
    "marginal_moment_bound": marginal_moment_bound,
    "theorem_tail_bound": theorem_tail_bound,
    "fbm_marginal_tail": fbm_marginal_tail,
    "fbm_sup_bound": fbm_sup_bound,
    "fbm_sup_bound_general": fbm_sup_bound_general,
    "series_tail_bounds": series_tail_bounds,
    "upcross_random_time_bound": upcross_random_time_bound,
    "upcross_moment_bound": upcross_moment_bound,
}


def recompute(report: BoundReport | dict) -> BoundReport:
    """Re-evaluate a report (or its dict form) from its recorded parameters."""
    d = report.to_dict() if isinstance(report, BoundReport) else report
    try:
        fn = _REGISTRY[d["name"]]
    except KeyError:
        raise DomainError(f"bound {d['name']!r} cannot be recomputed from params") from None
    return fn(**_rebuild(d["name"], d["params"]))
