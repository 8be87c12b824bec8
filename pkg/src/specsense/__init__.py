"""Blind spectrum sensing with information-theoretic criteria.

AIC/MDL-based detectors (OITC, SITC, GITC), Tracy-Widom performance
predictors, baseline detectors and a seeded Monte Carlo harness.
"""
from .analytics import (calibrate_gamma, itc_polynomial_roots, johnstone_transform,
                        pd_conditional, pf_analytic, q_function)
from .itc import (Criterion, aic, criterion_threshold, gitc_decide, gitc_statistic, mdl,
                  oitc_estimate, sitc_decide)
from .model import (ChannelRealization, Hypothesis, ModelDims, ObservationBlock,
                    build_channel_matrix, generate_observations, sample_channel)
from .spectrum import EigSpectrum, eig_descending, sample_covariance
from .tracy_widom import tw2_cdf

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization", "Criterion", "EigSpectrum", "Hypothesis", "ModelDims",
    "ObservationBlock", "aic", "build_channel_matrix", "calibrate_gamma",
    "criterion_threshold", "eig_descending", "generate_observations", "gitc_decide",
    "gitc_statistic", "itc_polynomial_roots", "johnstone_transform", "mdl",
    "oitc_estimate", "pd_conditional", "pf_analytic", "q_function", "sample_channel",
    "sample_covariance", "sitc_decide", "tw2_cdf",
]
