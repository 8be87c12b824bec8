"""Information-theoretic-criteria detectors.

AIC and MDL are evaluated on the descending spectrum of the sample
covariance. Three decision rules are provided:

* OITC: estimate the source count as the criterion's argmin, decide H1 if it
  is positive;
* SITC: compare only the criterion at k = 0 and k = 1;
* GITC: threshold the statistic
  ``T = AM(l_1..l_p)^p / (AM(l_2..l_p)^(p-1) * l_1)`` at an arbitrary gamma.

SITC is GITC with ``gamma = criterion_threshold(crit, p, N)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError, DomainError
from .model import Hypothesis
from .spectrum import EigSpectrum


class Criterion(str, enum.Enum):
    AIC = "AIC"
    MDL = "MDL"


class Detector(str, enum.Enum):
    OITC = "OITC"
    SITC = "SITC"
    GITC = "GITC"


@dataclass(frozen=True)
class SensingDecision:
    hypothesis: Hypothesis
    statistic: float
    threshold: float
    detector: str

    @property
    def present(self) -> bool:
        return self.hypothesis is Hypothesis.H1


def _check_k(k: int, p: int) -> None:
    if not 0 <= k <= p - 1:
        raise DomainError(f"k must lie in [0, {p - 1}], got {k}")


def log_gm_am_ratio(values: np.ndarray) -> float:
    """log(GM / AM) of a positive vector, computed in the log domain (<= 0)."""
    mean_log = float(np.mean(np.log(values)))
    return min(0.0, mean_log - math.log(float(np.mean(values))))


def data_term(k: int, spec: EigSpectrum, weight: float = 2.0) -> float:
    """Likelihood part ``-weight * N (p-k) log(GM/AM)`` over l_{k+1..p}.

    ``weight`` is 2 for AIC and 1 for MDL.
    """
    _check_k(k, spec.p)
    tail = spec.values[k:]
    return -weight * spec.n_obs * (spec.p - k) * log_gm_am_ratio(tail)


def aic(k: int, spec: EigSpectrum) -> float:
    p = spec.p
    return data_term(k, spec, 2.0) + 2.0 * k * (2 * p - k) + 2.0


def mdl(k: int, spec: EigSpectrum) -> float:
    p = spec.p
    return data_term(k, spec, 1.0) + (0.5 * k * (2 * p - k) + 0.5) * math.log(spec.n_obs)


def criterion_value(crit: Criterion, k: int, spec: EigSpectrum) -> float:
    return aic(k, spec) if Criterion(crit) is Criterion.AIC else mdl(k, spec)


def oitc_estimate(spec: EigSpectrum, crit: Criterion) -> int:
    """Source count minimising the criterion; ties go to the smallest k."""
    values = [criterion_value(crit, k, spec) for k in range(spec.p)]
    return int(np.argmin(values))


def oitc_decide(spec: EigSpectrum, crit: Criterion) -> SensingDecision:
    k_hat = oitc_estimate(spec, crit)
    hyp = Hypothesis.H1 if k_hat > 0 else Hypothesis.H0
    return SensingDecision(hyp, float(k_hat), 0.0, Detector.OITC.value)


def log_gitc_statistic(spec: EigSpectrum) -> float:
    l = spec.values
    p = spec.p
    if l[0] <= 0:
        raise DegenerateSpectrumError("zero spectrum")
    am_all = float(np.mean(l))
    am_tail = float(np.mean(l[1:]))
    if am_tail <= 0:
        # l_2 = ... = l_p = 0: T is unbounded
        return math.inf
    log_t = p * math.log(am_all) - (p - 1) * math.log(am_tail) - math.log(l[0])
    return max(0.0, log_t)


def gitc_statistic(spec: EigSpectrum) -> float:
    """The generalized ITC statistic T (always >= 1 by AM-GM)."""
    return math.exp(log_gitc_statistic(spec))


def log_criterion_threshold(crit: Criterion, p: int, N: int) -> float:
    if p < 2 or N < 2:
        raise DomainError("criterion threshold needs p >= 2 and N >= 2")
    if Criterion(crit) is Criterion.AIC:
        return (2 * p - 1) / N
    return (p - 0.5) * math.log(N) / N


def criterion_threshold(crit: Criterion, p: int, N: int) -> float:
    """gamma that makes GITC coincide with the AIC/MDL SITC rule."""
    return math.exp(log_criterion_threshold(crit, p, N))


def _decide(log_t: float, log_gamma: float, detector: str) -> SensingDecision:
    hyp = Hypothesis.H1 if log_t > log_gamma else Hypothesis.H0
    return SensingDecision(hyp, math.exp(log_t), math.exp(log_gamma), detector)


def sitc_decide(spec: EigSpectrum, crit: Criterion) -> SensingDecision:
    """H1 iff criterion(0) > criterion(1).

    Compared through log T against log gamma, which is the same inequality
    with the constant penalty difference moved to the right-hand side.
    """
    gamma = criterion_threshold(crit, spec.p, spec.n_obs)
    return _decide(log_gitc_statistic(spec), math.log(gamma), Detector.SITC.value)


def gitc_decide(spec: EigSpectrum, gamma: float) -> SensingDecision:
    if not gamma >= 1.0:
        raise DomainError(f"gamma must be >= 1, got {gamma!r}")
    log_gamma = math.log(gamma)
    return _decide(log_gitc_statistic(spec), log_gamma, Detector.GITC.value)
