"""Closed-form false-alarm and conditional detection predictors.

Under H0 the largest sample eigenvalue of white Gaussian noise, scaled as
``(N l_1/sigma^2 - (sqrt N + sqrt p)^2) / ((sqrt N + sqrt p)(1/sqrt N + 1/sqrt p)^(1/3))``,
is approximately Tracy-Widom (beta = 2). The ITC decision depends only on
``x = p - l_1/sigma^2`` through the polynomial

    f(x) = x^p - p x^(p-1) + (p-1)^(p-1) / gamma,

which has exactly two roots in (0, p) straddling p - 1. P_f is the TW mass of
l_1/sigma^2 outside ``[p - alpha_2, p - alpha_1]`` (restricted to (0, p)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError, UnattainableTargetError
from .itc import Criterion, criterion_threshold
from .model import ChannelRealization, ModelDims, build_channel_matrix
from .tracy_widom import tw2_cdf

ROOT_RTOL = 1e-12


def johnstone_transform(u, N: int, p: int):
    """Centre and scale ``u = l_1/sigma^2`` onto the Tracy-Widom axis."""
    if N < 1 or p < 1:
        raise DomainError("N and p must be positive")
    a = math.sqrt(N) + math.sqrt(p)
    scale = a * (1.0 / math.sqrt(N) + 1.0 / math.sqrt(p)) ** (1.0 / 3.0)
    s = (np.asarray(u, dtype=float) * N - a * a) / scale
    return float(s) if s.ndim == 0 else s


@dataclass(frozen=True)
class RootPair:
    alpha1: float
    alpha2: float

    def __iter__(self):
        return iter((self.alpha1, self.alpha2))


def _log_const(p: int, gamma: float) -> float:
    return (p - 1) * math.log(p - 1) - math.log(gamma)


def polynomial_log_gap(x: float, p: int, gamma: float) -> float:
    """``g(x)`` with sign(g) == sign(f) on (0, p), evaluated in the log domain.

    On (0, p) the polynomial is ``C - x^(p-1) (p - x)`` with
    ``C = (p-1)^(p-1)/gamma``, so ``g = log C - (p-1) log x - log(p - x)``.
    """
    if x <= 0.0 or x >= p:
        return math.inf
    return _log_const(p, gamma) - (p - 1) * math.log(x) - math.log(p - x)


def scaled_residual(x: float, p: int, gamma: float) -> float:
    """|f(x)| / ((p-1)^(p-1)/gamma), overflow-free."""
    g = polynomial_log_gap(x, p, gamma)
    if math.isinf(g):
        return 1.0
    return abs(math.expm1(-g))


def _bisect(lo: float, hi: float, p: int, gamma: float) -> float:
    # g is +inf at 0 and p, so only the finite sign at p - 1 matters for bracketing
    return optimize.bisect(polynomial_log_gap, lo, hi, args=(p, gamma),
                           xtol=1e-300, rtol=ROOT_RTOL, maxiter=2000)


def itc_polynomial_roots(p: int, gamma: float) -> RootPair:
    """The two roots of f in (0, p), by bisection on (0, p-1] and [p-1, p)."""
    if p < 2:
        raise DomainError("p must be at least 2")
    if not gamma >= 1.0:
        raise DomainError(f"gamma must be >= 1 for the roots to bracket p-1, got {gamma!r}")
    if gamma == 1.0:
        return RootPair(float(p - 1), float(p - 1))
    a1 = _bisect(0.0, float(p - 1), p, gamma)
    a2 = _bisect(float(p - 1), float(p), p, gamma)
    return RootPair(a1, a2)


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, float(x)))


def _four_term(p: int, N: int, lo_edge: float, hi_edge: float) -> float:
    """F2(t(p)) - F2(t(lo_edge)) + F2(t(hi_edge)) - F2(t(0))."""
    s = johnstone_transform(np.array([p, lo_edge, hi_edge, 0.0]), N, p)
    F = tw2_cdf(s)
    return _clamp01(F[0] - F[1] + F[2] - F[3])


def pf_analytic(p: int, N: int, gamma: float) -> float:
    """Tracy-Widom approximation of the GITC false-alarm probability."""
    a1, a2 = itc_polynomial_roots(p, gamma)
    return _four_term(p, N, p - a1, p - a2)


def pf_analytic_criterion(crit: Criterion, p: int, N: int) -> float:
    return pf_analytic(p, N, criterion_threshold(crit, p, N))


@dataclass(frozen=True)
class AnalyticContext:
    p: int
    n_obs: int
    gamma: float
    sigma2: float
    epsilon: float
    deltas: np.ndarray = field(repr=False)

    @classmethod
    def from_channel(cls, ch: ChannelRealization, dims: ModelDims, sigma2: float,
                     gamma: float) -> "AnalyticContext":
        # source covariance is the identity for i.i.d. unit-power BPSK
        H = build_channel_matrix(ch, dims)
        deltas = np.linalg.eigvalsh(H @ H.conj().T)[::-1]
        deltas = np.maximum(deltas, 0.0)
        epsilon = float(np.sum(np.abs(H) ** 2)) / dims.p + sigma2
        return cls(dims.p, dims.N, gamma, sigma2, epsilon, deltas)


def q_function(delta: float, ctx: AnalyticContext, roots: RootPair | None = None) -> float:
    """Conditional detection probability for a given Weyl interpolation point."""
    if roots is None:
        roots = itc_polynomial_roots(ctx.p, ctx.gamma)
    pi1, pi2 = roots
    lo_edge = ((ctx.p - pi1) * ctx.epsilon - delta) / ctx.sigma2
    hi_edge = ((ctx.p - pi2) * ctx.epsilon - delta) / ctx.sigma2
    return _four_term(ctx.p, ctx.n_obs, lo_edge, hi_edge)


RHO_FACTOR = {Criterion.AIC: 0.5, Criterion.MDL: 0.75}


@dataclass(frozen=True)
class PdEstimate:
    estimate: float
    lower: float
    upper: float
    rho: float
    rho_rule: str
    ordered: bool
    sensitivity: tuple[float, float]


def pd_conditional(ch: ChannelRealization, dims: ModelDims, sigma2: float,
                   crit_or_gamma: Criterion | str | float) -> PdEstimate:
    """P_d given the channel: Q(rho) with the bracket [Q(delta_p), Q(delta_1)].

    ``crit_or_gamma`` is a criterion (threshold and rho rule follow from it)
    or an explicit GITC gamma, which uses the AIC rho rule.
    ``sensitivity`` holds Q at 0.9 rho and 1.1 rho.
    """
    if not sigma2 > 0:
        raise DomainError("sigma2 must be positive")
    if isinstance(crit_or_gamma, (Criterion, str)):
        crit = Criterion(crit_or_gamma)
        gamma = criterion_threshold(crit, dims.p, dims.N)
        factor, rule = RHO_FACTOR[crit], crit.value
    else:
        gamma = float(crit_or_gamma)
        factor, rule = RHO_FACTOR[Criterion.AIC], "gitc-default(AIC)"
    ctx = AnalyticContext.from_channel(ch, dims, sigma2, gamma)
    roots = itc_polynomial_roots(dims.p, gamma)
    d1, dp = float(ctx.deltas[0]), float(ctx.deltas[-1])
    rho = factor * (dp + d1)
    est = q_function(rho, ctx, roots)
    lower = q_function(dp, ctx, roots)
    upper = q_function(d1, ctx, roots)
    ordered = lower <= est <= upper
    if not ordered:
        lower, upper = min(lower, est, upper), max(lower, est, upper)
    sens = (q_function(0.9 * rho, ctx, roots), q_function(1.1 * rho, ctx, roots))
    return PdEstimate(est, lower, upper, rho, rule, ordered, sens)


LOG_GAMMA_MAX = 50.0


def pf_attainable(p: int, N: int) -> tuple[float, float]:
    return pf_analytic(p, N, math.exp(LOG_GAMMA_MAX)), pf_analytic(p, N, 1.0)


def calibrate_gamma(target_pf: float, p: int, N: int) -> float:
    """Smallest-error gamma with pf_analytic(p, N, gamma) == target_pf.

    Bisects on log gamma; pf_analytic is non-increasing in gamma.
    """
    if not 0.0 < target_pf < 1.0:
        raise DomainError("target_pf must lie in (0, 1)")
    low, high = pf_attainable(p, N)
    if not low <= target_pf <= high:
        raise UnattainableTargetError(target_pf, low, high)
    lo, hi = 0.0, LOG_GAMMA_MAX
    # shrink the upper end first; most useful thresholds sit close to 1
    while hi > 1e-6 and pf_analytic(p, N, math.exp(hi / 2)) <= target_pf:
        hi /= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or hi - lo <= 1e-15 * hi:
            break
        if pf_analytic(p, N, math.exp(mid)) > target_pf:
            lo = mid
        else:
            hi = mid
    gamma_lo, gamma_hi = math.exp(lo), math.exp(hi)
    err_lo = abs(pf_analytic(p, N, gamma_lo) - target_pf)
    err_hi = abs(pf_analytic(p, N, gamma_hi) - target_pf)
    return gamma_lo if err_lo <= err_hi else gamma_hi
