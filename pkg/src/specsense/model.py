"""Over-determined multipath observation model.

A single primary user transmits BPSK symbols through an L-tap channel seen on
K branches (antennas, or over-sampling phases). Each observation stacks M
consecutive samples of every branch, giving vectors of length ``p = M*K``
driven by ``q = L + M - 1`` symbols. Detection needs ``p > q``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, SingularFilterError


class Mode(str, enum.Enum):
    MULTI_ANTENNA = "multi-antenna"
    OVER_SAMPLING = "over-sampling"


class Hypothesis(str, enum.Enum):
    H0 = "H0"
    H1 = "H1"


@dataclass(frozen=True)
class ModelDims:
    M: int
    K: int
    L: int
    N: int

    def __post_init__(self):
        for name in ("M", "K", "L", "N"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise DimensionError(f"{name} must be a positive integer, got {value!r}")
        if self.p <= self.q:
            raise DimensionError(
                f"model not over-determined: p=M*K={self.p} must exceed q=L+M-1={self.q}"
            )

    @property
    def p(self) -> int:
        return self.M * self.K

    @property
    def q(self) -> int:
        return self.L + self.M - 1


@dataclass(frozen=True)
class ChannelRealization:
    """Per-branch taps; ``taps[k, i]`` is tap i seen on branch k."""

    taps: np.ndarray
    mode: Mode = Mode.MULTI_ANTENNA

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=complex)
        if taps.ndim != 2:
            raise DimensionError("taps must be a K x L array")
        if not np.any(np.abs(taps) > 0):
            raise ValueError("channel has no nonzero tap")
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "mode", Mode(self.mode))

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "taps": [[[z.real, z.imag] for z in row] for row in self.taps],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChannelRealization":
        taps = np.array([[complex(re, im) for re, im in row] for row in obj["taps"]])
        return cls(taps, Mode(obj.get("mode", Mode.MULTI_ANTENNA)))


@dataclass
class ObservationBlock:
    """N received vectors stored as the rows of ``vectors`` (N x p)."""

    vectors: np.ndarray
    hypothesis: Hypothesis
    noise_power: float
    dims: ModelDims

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=complex)
        if self.vectors.shape != (self.dims.N, self.dims.p):
            raise DimensionError(
                f"expected {self.dims.N} vectors of length {self.dims.p}, "
                f"got array of shape {self.vectors.shape}"
            )
        if not self.noise_power > 0:
            raise ValueError("noise_power must be positive")
        self.hypothesis = Hypothesis(self.hypothesis)

    @property
    def energy(self) -> float:
        """Total received energy, sum of squared norms of all vectors."""
        return float(np.sum(self.vectors.real**2 + self.vectors.imag**2))

    def to_json(self) -> dict:
        d = self.dims
        return {
            "hypothesis": self.hypothesis.value,
            "noise_power": self.noise_power,
            "dims": {"M": d.M, "K": d.K, "L": d.L, "N": d.N},
            "vectors": [[[z.real, z.imag] for z in row] for row in self.vectors],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ObservationBlock":
        vectors = np.array([[complex(re, im) for re, im in row] for row in obj["vectors"]])
        return cls(vectors, Hypothesis(obj["hypothesis"]), float(obj["noise_power"]),
                   ModelDims(**obj["dims"]))


def channel_matrix(taps: np.ndarray, M: int) -> np.ndarray:
    """Block-banded (M*K) x (L+M-1) matrix: row block m holds the reversed taps at column m.

    No over-determinedness check; see :func:`build_channel_matrix`.
    """
    taps = np.asarray(taps, dtype=complex)
    K, L = taps.shape
    H = np.zeros((M * K, L + M - 1), dtype=complex)
    rev = taps[:, ::-1]
    for m in range(M):
        H[m * K:(m + 1) * K, m:m + L] = rev
    return H


def build_channel_matrix(ch: ChannelRealization, dims: ModelDims) -> np.ndarray:
    K, L = ch.taps.shape
    if K != dims.K or L != dims.L:
        raise DimensionError(
            f"channel taps are {K}x{L} but dims expect K={dims.K}, L={dims.L}"
        )
    return channel_matrix(ch.taps, dims.M)


def complex_normal(rng: np.random.Generator, shape, power: float = 1.0) -> np.ndarray:
    """Circularly-symmetric CN(0, power) samples."""
    scale = np.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_channel(dims: ModelDims, rng: np.random.Generator,
                   mode: Mode = Mode.MULTI_ANTENNA) -> ChannelRealization:
    """i.i.d. CN(0, 1) taps; resampled in the (measure-zero) all-zero case."""
    while True:
        taps = complex_normal(rng, (dims.K, dims.L))
        if np.any(np.abs(taps) > 0):
            return ChannelRealization(taps, mode)


def noise_power_for_snr(H: np.ndarray, snr_db: float) -> float:
    """sigma^2 such that Tr(H H^H) / (p sigma^2) equals the linear SNR."""
    if not np.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db!r}")
    p = H.shape[0]
    signal = float(np.sum(np.abs(H) ** 2)) / p
    return signal / 10.0 ** (snr_db / 10.0)


def symbol_windows(symbols: np.ndarray, dims: ModelDims) -> np.ndarray:
    """N x q matrix whose row i is the sliding symbol window s_i.

    Consecutive windows advance by M and share L - 1 symbols.
    """
    view = np.lib.stride_tricks.sliding_window_view(symbols, dims.q)
    return view[:: dims.M][: dims.N]


def generate_observations(ch: ChannelRealization, dims: ModelDims, snr_db: float,
                          hypothesis: Hypothesis, rng: np.random.Generator,
                          noise_shaping: np.ndarray | None = None) -> ObservationBlock:
    """Draw one block of N observations.

    Noise is drawn before the symbol stream, so the same generator state gives
    the same noise under H0 and H1. ``noise_power`` is set from the channel
    and ``snr_db`` under both hypotheses; under H0 the signal is simply absent.

    ``noise_shaping`` (p x p, e.g. the square root of a filter correlation
    matrix) colours the noise as ``noise @ shaping.T``.
    """
    hypothesis = Hypothesis(hypothesis)
    H = build_channel_matrix(ch, dims)
    sigma2 = noise_power_for_snr(H, snr_db)
    noise = complex_normal(rng, (dims.N, dims.p), sigma2)
    if noise_shaping is not None:
        noise = noise @ np.asarray(noise_shaping).T
    if hypothesis is Hypothesis.H0:
        return ObservationBlock(noise, hypothesis, sigma2, dims)
    n_sym = (dims.N - 1) * dims.M + dims.q
    symbols = 2.0 * rng.integers(0, 2, n_sym) - 1.0
    S = symbol_windows(symbols, dims)
    return ObservationBlock(S @ H.T + noise, hypothesis, sigma2, dims)


@dataclass(frozen=True)
class FilterAcf:
    """Receive-filter autocorrelation sampled at lags m*T0/K, m = 0..p-1.

    ``phi[m]`` is phi_g(m*T0/K) with phi_g(0) = 1.
    """

    phi: np.ndarray = field(repr=False)

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if phi.ndim != 1 or phi.size == 0:
            raise ValueError("phi must be a non-empty 1-D array")
        if not np.isclose(phi[0], 1.0):
            raise ValueError("phi must be normalised to phi[0] = 1")
        if np.any(np.abs(phi) > 1.0 + 1e-12):
            raise ValueError("|phi| must not exceed 1")
        object.__setattr__(self, "phi", phi)

    def matrix(self, p: int) -> np.ndarray:
        if self.phi.size < p:
            raise DimensionError(f"acf has {self.phi.size} lags, need {p}")
        idx = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
        return self.phi[idx]


def exponential_acf(dims: ModelDims, corr_time: float = 0.5) -> FilterAcf:
    """First-order RC low-pass: phi_g(tau) = exp(-|tau| / corr_time), tau in symbols."""
    lags = np.arange(dims.p) / dims.K
    return FilterAcf(np.exp(-lags / corr_time))


def raised_cosine_acf(dims: ModelDims, rolloff: float = 0.5) -> FilterAcf:
    """Raised-cosine autocorrelation (root-raised-cosine receive filter).

    Band-limited, so for K > 1 + rolloff the sampled correlation is close to
    singular and :func:`whitening_matrix` will refuse it.
    """
    t = np.arange(dims.p) / dims.K
    x = 2.0 * rolloff * t
    sing = np.isclose(np.abs(x), 1.0)
    den = np.where(sing, 1.0, 1.0 - x**2)
    taper = np.where(sing, np.pi / 4.0, np.cos(np.pi * rolloff * t) / den)
    return FilterAcf(np.sinc(t) * taper)


def _sym_eig(Q: np.ndarray, eps: float):
    w, V = np.linalg.eigh(Q)
    if w[0] <= eps * w[-1]:
        raise SingularFilterError(
            f"filter correlation matrix is numerically singular "
            f"(min/max eigenvalue {w[0]:.3g}/{w[-1]:.3g})"
        )
    return w, V


def correlation_sqrt(acf: FilterAcf, dims: ModelDims, eps: float = 1e-10) -> np.ndarray:
    """Symmetric positive-definite square root of the filter correlation matrix."""
    w, V = _sym_eig(acf.matrix(dims.p), eps)
    return (V * np.sqrt(w)) @ V.T


def whitening_matrix(acf: FilterAcf, dims: ModelDims, eps: float = 1e-10) -> np.ndarray:
    """Inverse of the symmetric square root of Q, q_ij = phi_g(|i-j| T0/K)."""
    w, V = _sym_eig(acf.matrix(dims.p), eps)
    return (V / np.sqrt(w)) @ V.T


def whiten(block: ObservationBlock, W: np.ndarray) -> ObservationBlock:
    W = np.asarray(W)
    p = block.dims.p
    if W.shape != (p, p):
        raise DimensionError(f"whitening matrix must be {p}x{p}, got {W.shape}")
    return ObservationBlock(block.vectors @ W.T, block.hypothesis, block.noise_power, block.dims)
