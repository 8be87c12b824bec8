"""Reference detectors: energy detection and four eigenvalue-based tests.

Statistics follow their conventional definitions:

* ED: ``sum ||x_i||^2 / (p N sigma^2)`` with the detector's nominal noise power;
* EV-MME: ``l_1 / l_p``;
* EV-EME: ``sum ||x_i||^2 / (p N l_p)``, i.e. mean eigenvalue over the smallest;
* EV-BCED: ``l_1 / mean(l)``, the energy captured by the leading eigenvector
  relative to the average per-dimension energy;
* EV-AGM: ``mean(l) / geomean(l)``.

Thresholds are calibrated empirically on noise-only trials.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateSpectrumError, DomainError
from .itc import SensingDecision
from .model import Hypothesis, ObservationBlock
from .spectrum import EigSpectrum


class BaselineKind(str, enum.Enum):
    ED = "ED"
    ED_UNCERTAIN = "ED-UNC"
    EV_MME = "EV-MME"
    EV_EME = "EV-EME"
    EV_BCED = "EV-BCED"
    EV_AGM = "EV-AGM"


@dataclass(frozen=True)
class Baseline:
    kind: BaselineKind
    x_db: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", BaselineKind(self.kind))
        if self.x_db < 0:
            raise DomainError("noise uncertainty x_db must be non-negative")

    @property
    def name(self) -> str:
        if self.kind is BaselineKind.ED_UNCERTAIN:
            return f"ED-UNC:{self.x_db:g}"
        return self.kind.value


def _min_eig(spec: EigSpectrum) -> float:
    lp = float(spec.values[-1])
    if lp <= 0:
        raise DegenerateSpectrumError("smallest eigenvalue is not positive")
    return lp


def baseline_statistic(kind: BaselineKind | Baseline, spec: EigSpectrum,
                       block_energy: float | None = None,
                       sigma2_nominal: float | None = None) -> float:
    """Test statistic of a baseline detector (larger means more signal).

    ``block_energy`` defaults to ``N * sum(l)``, which equals the block energy
    whenever ``spec`` comes from that block's sample covariance.
    """
    kind = kind.kind if isinstance(kind, Baseline) else BaselineKind(kind)
    l = spec.values
    p, N = spec.p, spec.n_obs
    energy = float(N * np.sum(l)) if block_energy is None else float(block_energy)
    if kind in (BaselineKind.ED, BaselineKind.ED_UNCERTAIN):
        if sigma2_nominal is None or not sigma2_nominal > 0:
            raise DomainError("energy detection needs a positive nominal noise power")
        return energy / (p * N * sigma2_nominal)
    if kind is BaselineKind.EV_MME:
        return float(l[0]) / _min_eig(spec)
    if kind is BaselineKind.EV_EME:
        return energy / (p * N * _min_eig(spec))
    if kind is BaselineKind.EV_BCED:
        return float(l[0]) / float(np.mean(l))
    if kind is BaselineKind.EV_AGM:
        return math.exp(max(0.0, math.log(float(np.mean(l))) - float(np.mean(np.log(l)))))
    raise DomainError(f"unknown baseline {kind!r}")


def empirical_threshold(statistic: Callable[[np.random.Generator], float],
                        target_pf: float, trials: int,
                        rng_for_trial: Callable[[int], np.random.Generator]) -> float:
    """(1 - target_pf) empirical quantile of a noise-only statistic.

    ``statistic`` draws one H0 trial from the generator it is handed;
    ``rng_for_trial(i)`` supplies the generator for trial ``i``.
    """
    if not 0.0 < target_pf < 1.0:
        raise DomainError("target_pf must lie in (0, 1)")
    if trials < math.ceil(20.0 / target_pf):
        raise DomainError(
            f"{trials} trials cannot resolve the {1 - target_pf:g} quantile; "
            f"need at least {math.ceil(20.0 / target_pf)}"
        )
    values = np.array([statistic(rng_for_trial(i)) for i in range(trials)])
    return quantile_threshold(values, target_pf)


def quantile_threshold(h0_values: np.ndarray, target_pf: float) -> float:
    """Threshold t with mean(h0_values > t) as close to target_pf as the sample allows."""
    v = np.sort(np.asarray(h0_values, dtype=float))
    n = v.size
    n_exceed = int(round(target_pf * n))
    if n_exceed <= 0:
        return float(v[-1])
    if n_exceed >= n:
        return float(np.nextafter(v[0], -np.inf))
    return float(v[n - n_exceed - 1])


def uncertainty_factor(x_db: float, rng: np.random.Generator) -> float:
    """Ratio of true to nominal noise power, 10^(U/10) with U ~ Uniform[-x, x] dB."""
    if x_db < 0:
        raise DomainError("x_db must be non-negative")
    if x_db == 0:
        return 1.0
    return 10.0 ** (rng.uniform(-x_db, x_db) / 10.0)


def ed_uncertain_decide(block: ObservationBlock, x_db: float, threshold: float,
                        rng: np.random.Generator) -> SensingDecision:
    """Energy detection with a mis-estimated noise power.

    The block's ``noise_power`` is the true power. The detector normalises by
    a nominal power that differs from it by 10^(-U/10), U ~ Uniform[-x, x] dB,
    drawn once per call. Since U is symmetric this is the same as a true power
    of nominal * 10^(U/10).
    """
    factor = uncertainty_factor(x_db, rng)
    stat = block.energy / (block.dims.p * block.dims.N * block.noise_power) * factor
    hyp = Hypothesis.H1 if stat > threshold else Hypothesis.H0
    return SensingDecision(hyp, stat, threshold, f"ED-UNC:{x_db:g}")
