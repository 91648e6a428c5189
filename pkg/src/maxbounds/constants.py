"""Special functions and the closed-form constants of the maximal inequalities.

All routines are pure float64 functions.  Overflow is never silent: a result
that does not fit in a double raises :class:`~maxbounds.errors.RangeError`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, RangeError

__all__ = [
    "HolderSpec",
    "TailDecaySpec",
    "gamma_fn",
    "log_gamma_fn",
    "zeta_fn",
    "default_theta",
    "c_ph_theta",
    "log_c_ph_theta",
    "k_theorem",
    "k_q_alpha",
    "k_delta",
    "check_upcross_chain",
    "a_p_fbm",
    "c_p_khintchine",
    "a_ph_series",
]

_LOG_MAX = math.log(1.7976931348623157e308)
_SQRT_PI = math.sqrt(math.pi)

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class HolderSpec:
    """Increment control ``E|X_t - X_s|^p <= a_ph |t - s|^(p h)``."""

    p: float
    h: float
    a_ph: float

    def __post_init__(self):
        for name in ("p", "h", "a_ph"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"HolderSpec.{name} must be finite")
        if not self.p > 1:
            raise DomainError(f"HolderSpec needs p > 1, got p={self.p}")
        if not 0 < self.h <= 1:
            raise DomainError(f"HolderSpec needs 0 < h <= 1, got h={self.h}")
        if not self.p * self.h > 1:
            raise DomainError(f"HolderSpec needs p*h > 1, got p*h={self.p * self.h}")
        if self.a_ph < 0:
            raise DomainError(f"HolderSpec needs a_ph >= 0, got {self.a_ph}")

    @property
    def ph(self) -> float:
        return self.p * self.h

    def to_dict(self) -> dict:
        return {"p": self.p, "h": self.h, "a_ph": self.a_ph}


@dataclass(frozen=True)
class TailDecaySpec:
    """Uniform marginal decay ``P(|X_t| >= lam) <= c exp(-d lam^alpha)`` for ``lam >= delta0``."""

    alpha: float
    c: float
    d: float
    delta0: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"TailDecaySpec needs alpha > 0, got {self.alpha}")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise DomainError(f"TailDecaySpec needs c > 0, got {self.c}")
        if not (self.d > 0 and math.isfinite(self.d)):
            raise DomainError(f"TailDecaySpec needs d > 0, got {self.d}")
        if not (self.delta0 >= 0 and math.isfinite(self.delta0)):
            raise DomainError(f"TailDecaySpec needs delta0 >= 0, got {self.delta0}")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "c": self.c, "d": self.d, "delta0": self.delta0}


def _check_positive_finite(x: float, what: str) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"{what} must be a positive finite number, got {x}")
    return x


def _lanczos_sum(z: float) -> float:
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    return acc


def gamma_fn(x: float) -> float:
    """Gamma function for positive real ``x``.

    Lanczos approximation with the reflection formula below ``x = 1/2``.
    Relative error is around 1e-13 or better on ``(0, 171]``.
    """
    x = _check_positive_finite(x, "gamma_fn argument")
    if x < 0.5:
        s = math.sin(math.pi * x)
        # Gamma(1 - x) is bounded here, so only 1/(x * ...) can overflow.
        denom = s * gamma_fn(1.0 - x)
        out = math.pi / denom if denom != 0.0 else math.inf
        if not math.isfinite(out):
            raise RangeError(f"gamma_fn({x!r}) overflows")
        return out
    if x == math.floor(x) and x <= 23:
        return float(math.factorial(int(x) - 1))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    half = 0.5 * (z + 0.5)
    try:
        # the power is split in two so that t**(z+1/2) alone cannot overflow
        th = t ** half
        out = 2.5066282746310002 * th * math.exp(-t) * th * _lanczos_sum(z)
    except OverflowError:
        raise RangeError(f"gamma_fn({x!r}) overflows") from None
    if not math.isfinite(out):
        raise RangeError(f"gamma_fn({x!r}) overflows")
    return out


def log_gamma_fn(x: float) -> float:
    """Natural log of Gamma for positive ``x``, same Lanczos series."""
    x = _check_positive_finite(x, "log_gamma_fn argument")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma_fn(1.0 - x)
    if x < 20.0:
        return math.log(gamma_fn(x))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


# B_2, B_4, ... B_16
_BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)
_ZETA_HEAD = 20


def zeta_fn(theta: float) -> float:
    """Riemann zeta for real ``theta > 1``.

    Direct sum of the first terms plus an Euler-Maclaurin tail (integral term,
    half term and eight Bernoulli corrections).  Accurate to a few ulps on the
    whole half-line, including close to the pole.
    """
    s = float(theta)
    if not math.isfinite(s) and s != math.inf:
        raise DomainError(f"zeta_fn argument must be a real number, got {theta}")
    if not s > 1.0:
        raise DomainError(f"zeta_fn needs theta > 1 (pole at 1), got {theta}")
    if s == math.inf:
        return 1.0
    n = _ZETA_HEAD
    head = math.fsum(k ** -s for k in range(1, n))
    tail = [n ** (1.0 - s) / (s - 1.0), 0.5 * n ** -s]
    # rising factorial s (s+1) ... (s+2j-2) / (2j)!
    coef = s / 2.0
    npow = n ** (-s - 1.0)
    for j, b2j in enumerate(_BERNOULLI_EVEN, start=1):
        tail.append(b2j * coef * npow)
        coef *= (s + 2 * j - 1) * (s + 2 * j) / ((2 * j + 1) * (2 * j + 2))
        npow /= n * n
    return head + math.fsum(tail)


def default_theta(p: float) -> float:
    """The conventional choice ``theta = p / (p - 1)``."""
    if not p > 1:
        raise DomainError(f"default theta needs p > 1, got {p}")
    return p / (p - 1.0)


def _resolve_theta(spec: HolderSpec, theta: float | None) -> float:
    if theta is None:
        return default_theta(spec.p)
    theta = float(theta)
    if not (theta > 1 and math.isfinite(theta)):
        raise DomainError(f"theta must be > 1, got {theta}")
    return theta


def _exp_checked(log_value: float, what: str) -> float:
    if log_value > _LOG_MAX:
        raise RangeError(f"{what} overflows float64 (log value {log_value:.6g})")
    return math.exp(log_value)


def log_c_ph_theta(spec: HolderSpec, theta: float | None = None) -> float:
    p, ph = spec.p, spec.ph
    theta = _resolve_theta(spec, theta)
    if not ph > 1:
        raise DomainError(f"C_(p,h,theta) needs p*h > 1, got {ph}")
    m = theta * (p - 1.0) + 1.0
    return (
        (p - 1.0) * math.log(2.0 * zeta_fn(theta))
        + p * math.log(p / (p - 1.0))
        + m * math.log(4.0 / (ph - 1.0))
        + log_gamma_fn(m)
    )


def c_ph_theta(spec: HolderSpec, theta: float | None = None) -> float:
    """Constant of the sup-moment lemma.

    ``[2 zeta(theta)]^(p-1) (p/(p-1))^p (4/(ph-1))^(theta(p-1)+1) Gamma(theta(p-1)+1)``
    """
    return _exp_checked(log_c_ph_theta(spec, theta), "C_(p,h,theta)")


def k_theorem(spec: HolderSpec, tail: TailDecaySpec, theta: float | None, t_horizon: float) -> float:
    """Prefactor ``K`` of the supremum tail theorem (linear in the horizon)."""
    t_horizon = _check_positive_finite(t_horizon, "t_horizon")
    c = c_ph_theta(spec, theta)
    if spec.a_ph == 0:
        return 0.0
    inv = 1.0 / spec.ph
    log_k = (
        math.log(4.0 * t_horizon)
        + inv * (math.log(c) + math.log(spec.a_ph))
        + (1.0 - inv) * math.log1p(tail.c * (spec.p / (spec.p - 1.0)) ** spec.p)
    )
    return _exp_checked(log_k, "K")


def _alpha_upper(q: float, spec: HolderSpec) -> float:
    return (spec.h - 1.0 / spec.p) / (1.0 / q - 1.0 / spec.p)


def k_q_alpha(q: float, alpha: float, spec: HolderSpec) -> float:
    """``4^q [1 - 2^(-q(h-1/p) + (1-q/p) alpha)]^-1``.

    For ``q == p`` the alpha term drops out and any ``alpha > 0`` is admissible.
    """
    p, h = spec.p, spec.h
    if not 0 < q <= p:
        raise DomainError(f"K_(q,alpha) needs 0 < q <= p, got q={q}, p={p}")
    if not alpha > 0:
        raise DomainError(f"K_(q,alpha) needs alpha > 0, got {alpha}")
    if q == p:
        expo = 1.0 - spec.ph
    else:
        upper = _alpha_upper(q, spec)
        if not alpha < upper:
            raise DomainError(
                f"K_(q,alpha) needs alpha < (h-1/p)/(1/q-1/p) = {upper!r}, got {alpha!r}"
            )
        expo = -q * (h - 1.0 / p) + (1.0 - q / p) * alpha
    if not expo < 0:
        raise DomainError(f"K_(q,alpha): exponent of 2 is {expo!r}, must be negative")
    denom = -math.expm1(expo * math.log(2.0))
    out = 4.0 ** q / denom
    if not math.isfinite(out):
        raise RangeError("K_(q,alpha) overflows")
    return out


def check_upcross_chain(spec: HolderSpec, delta: float, q: float, alpha: float) -> None:
    """Raise :class:`DomainError` naming the first violated parameter inequality."""
    p, h = spec.p, spec.h
    top = 1.0 - 1.0 / spec.ph
    if not 0 < delta < top:
        raise DomainError(f"need 0 < delta < 1 - 1/(ph) = {top!r}, got delta={delta!r}")
    q_lo = delta / (h - 1.0 / p)
    if not q_lo < q:
        raise DomainError(f"need delta/(h-1/p) = {q_lo!r} < q, got q={q!r}")
    if not q < 1.0 / h:
        raise DomainError(f"need q < 1/h = {1.0 / h!r}, got q={q!r}")
    if not q < p:
        raise DomainError(f"need q < p = {p!r}, got q={q!r}")
    a_lo = delta / (1.0 - q / p)
    if not a_lo < alpha:
        raise DomainError(f"need delta/(1-q/p) = {a_lo!r} < alpha, got alpha={alpha!r}")
    a_hi = _alpha_upper(q, spec)
    # the product form catches alpha that equals the limit but rounds below it
    if not (alpha < a_hi and -q * (h - 1.0 / p) + (1.0 - q / p) * alpha < 0):
        raise DomainError(f"need alpha < (h-1/p)/(1/q-1/p) = {a_hi!r}, got alpha={alpha!r}")


def k_delta(delta: float, spec: HolderSpec, theta: float | None, q: float, alpha: float) -> float:
    """Constant of the up-crossing moment bound."""
    check_upcross_chain(spec, delta, q, alpha)
    p = spec.p
    r = 1.0 - alpha * (1.0 - q / p)
    z = (1.0 - delta) / r
    if not z > 1:
        raise DomainError(f"zeta argument (1-delta)/(1-alpha(1-q/p)) = {z!r} must exceed 1")
    c = c_ph_theta(spec, theta)
    ca = c * spec.a_ph
    if ca == 0:
        return 0.0
    out = 2.0 * (ca ** (1.0 / p) + k_q_alpha(q, alpha, spec) * zeta_fn(z) ** r * ca ** (q / p))
    if not math.isfinite(out):
        raise RangeError("K_delta overflows")
    return out


def a_p_fbm(p: float) -> float:
    """``Gamma((p+1)/2)/sqrt(pi)``: p-th absolute moment of N(0, 1/2)."""
    p = _check_positive_finite(p, "p")
    return gamma_fn(0.5 * (p + 1.0)) / _SQRT_PI


def c_p_khintchine(p: float) -> float:
    p = _check_positive_finite(p, "p")
    return max(math.sqrt(2.0 ** p / math.pi) * gamma_fn(0.5 * (p + 1.0)), 1.0)


def a_ph_series(p: float, weight_sum: float) -> float:
    """Increment constant of a Rademacher series; ``weight_sum`` is ``sum a_k^2 L_k^2``."""
    p = _check_positive_finite(p, "p")
    if not (weight_sum >= 0 and math.isfinite(weight_sum)):
        raise DomainError(f"weight_sum must be finite and >= 0, got {weight_sum}")
    if weight_sum == 0:
        return 0.0
    log_v = (
        p * math.log(2.0)
        - math.log(_SQRT_PI)
        + log_gamma_fn(0.5 * (p + 1.0))
        + 0.5 * p * math.log(weight_sum)
    )
    return _exp_checked(log_v, "A_(p,h)")
