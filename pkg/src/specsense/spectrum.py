"""Sample covariance and its descending eigenvalue spectrum."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError
from .model import ObservationBlock

# relative floor applied to eigenvalues so the criteria's logarithms stay finite
CLIP_FLOOR = 1e-12
HERMITIAN_TOL = 1e-8


@dataclass(frozen=True)
class EigSpectrum:
    values: np.ndarray
    n_obs: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise DegenerateSpectrumError("spectrum needs at least two eigenvalues")
        if np.any(np.diff(values) > 0):
            raise DegenerateSpectrumError("eigenvalues must be in non-increasing order")
        if values[-1] < 0:
            raise DegenerateSpectrumError("eigenvalues must be non-negative")
        if int(self.n_obs) < 1:
            raise ValueError("n_obs must be positive")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "n_obs", int(self.n_obs))

    @property
    def p(self) -> int:
        return self.values.size

    def scaled(self, c: float) -> "EigSpectrum":
        return EigSpectrum(self.values * c, self.n_obs)


def sample_covariance(block: ObservationBlock) -> np.ndarray:
    """(1/N) sum_i x_i x_i^H, symmetrised to be exactly Hermitian."""
    X = block.vectors
    if X.shape[0] == 0:
        raise ValueError("empty observation block")
    return covariance_of(X)


def covariance_of(X: np.ndarray) -> np.ndarray:
    """Covariance of the rows of X (N x p), no mean removal."""
    R = X.T @ X.conj() / X.shape[0]
    return 0.5 * (R + R.conj().T)


def eig_descending(R: np.ndarray, n_obs: int = 1) -> EigSpectrum:
    """Eigenvalues of a Hermitian matrix, largest first.

    Values below ``CLIP_FLOOR * max(l_1, mean |diag|)`` are raised to that
    floor; for a PSD input they are roundoff.
    """
    R = np.asarray(R)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError("R must be a square matrix")
    scale = max(float(np.max(np.abs(R))), np.finfo(float).tiny)
    if np.max(np.abs(R - R.conj().T)) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    R = 0.5 * (R + R.conj().T)
    w = np.linalg.eigvalsh(R)[::-1]
    ref = max(float(w[0]), float(np.mean(np.abs(np.diag(R)).real)))
    floor = CLIP_FLOOR * ref if ref > 0 else np.finfo(float).tiny
    return EigSpectrum(np.maximum(w, floor), n_obs)


def block_spectrum(block: ObservationBlock) -> EigSpectrum:
    return eig_descending(sample_covariance(block), block.dims.N)
