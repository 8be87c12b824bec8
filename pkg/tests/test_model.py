import itertools
import json

import numpy as np
import pytest

from oracles import sqrtm_eig
from specsense.errors import DimensionError, SingularFilterError
from specsense.itc import Criterion, sitc_decide
from specsense.model import (ChannelRealization, FilterAcf, Hypothesis, Mode, ModelDims,
                             ObservationBlock, build_channel_matrix, channel_matrix, correlation_sqrt,
                             exponential_acf, generate_observations, raised_cosine_acf,
                             sample_channel, whiten, whitening_matrix)
from specsense.spectrum import block_spectrum, sample_covariance


def test_dims_derived_values():
    d = ModelDims(M=5, K=4, L=10, N=100)
    assert (d.p, d.q) == (20, 14)


@pytest.mark.parametrize("M,K,L", [(5, 1, 2), (2, 2, 3), (1, 3, 3)])
def test_dims_reject_under_determined(M, K, L):
    with pytest.raises(DimensionError):
        ModelDims(M, K, L, 10)


@pytest.mark.parametrize("bad", [0, -1, 2.5, True])
def test_dims_reject_non_positive_integers(bad):
    with pytest.raises(DimensionError):
        ModelDims(bad, 4, 2, 10)


def test_single_tap_channel_is_scaled_identity():
    c = 0.3 - 1.2j
    H = channel_matrix(np.array([[c]]), M=3)
    np.testing.assert_array_equal(H, c * np.eye(3))


def test_two_branch_two_tap_pattern():
    a1, b1, a2, b2 = 1 + 1j, 2.0, 3j, -4.0
    taps = np.array([[a1, b1], [a2, b2]])
    H = build_channel_matrix(ChannelRealization(taps), ModelDims(M=2, K=2, L=2, N=1))
    expected = np.array([[b1, a1, 0], [b2, a2, 0], [0, b1, a1], [0, b2, a2]])
    np.testing.assert_array_equal(H, expected)


def test_band_structure_exhaustive():
    rng = np.random.default_rng(1)
    for M, K, L in itertools.product(range(1, 6), repeat=3):
        if M * K <= L + M - 1:
            continue
        dims = ModelDims(M, K, L, 1)
        ch = ChannelRealization(rng.standard_normal((K, L)) + 1j * rng.standard_normal((K, L)))
        H = build_channel_matrix(ch, dims)
        assert H.shape == (dims.p, dims.q)
        mask = np.zeros(H.shape, dtype=bool)
        for m in range(M):
            mask[m * K:(m + 1) * K, m:m + L] = True
        assert np.all(H[~mask] == 0)
        assert np.count_nonzero(H[mask]) == M * K * L


def test_channel_matrix_dimension_mismatch():
    ch = ChannelRealization(np.ones((3, 2)))
    with pytest.raises(DimensionError):
        build_channel_matrix(ch, ModelDims(5, 4, 2, 1))


def test_channel_rejects_all_zero_taps():
    with pytest.raises(ValueError):
        ChannelRealization(np.zeros((2, 2)))


def test_sample_channel_deterministic():
    dims = ModelDims(5, 4, 10, 1)
    a = sample_channel(dims, np.random.default_rng(7))
    b = sample_channel(dims, np.random.default_rng(7))
    np.testing.assert_array_equal(a.taps, b.taps)


def test_sample_channel_moments():
    dims = ModelDims(5, 4, 10, 1)
    rng = np.random.default_rng(3)
    taps = np.concatenate([sample_channel(dims, rng).taps.ravel() for _ in range(2500)])
    assert taps.size == 100_000
    se = np.sqrt(0.5 / taps.size)
    assert abs(taps.real.mean()) < 4 * se
    assert abs(taps.imag.mean()) < 4 * se
    assert abs(np.mean(np.abs(taps) ** 2) - 1.0) < 0.05
    np.testing.assert_allclose([taps.real.var(), taps.imag.var()], 0.5, rtol=0.03)


def test_sample_channel_same_law_both_modes():
    dims = ModelDims(5, 4, 10, 1)
    a = sample_channel(dims, np.random.default_rng(11), Mode.MULTI_ANTENNA)
    b = sample_channel(dims, np.random.default_rng(11), Mode.OVER_SAMPLING)
    np.testing.assert_array_equal(a.taps, b.taps)
    assert b.mode is Mode.OVER_SAMPLING


def test_h0_noise_calibration():
    dims = ModelDims(5, 4, 10, 10_000)
    rng = np.random.default_rng(5)
    ch = sample_channel(dims, rng)
    block = generate_observations(ch, dims, 0.0, Hypothesis.H0, rng)
    est = np.trace(sample_covariance(block)).real / dims.p
    # per-entry |mu|^2 has variance sigma^4 for CN(0, sigma^2)
    se = block.noise_power / np.sqrt(dims.p * dims.N)
    assert abs(est - block.noise_power) < 3 * se


def test_h1_snr_zero_db():
    dims = ModelDims(5, 4, 10, 10_000)
    rng_a = np.random.default_rng(9)
    ch = sample_channel(dims, rng_a)
    h1 = generate_observations(ch, dims, 0.0, Hypothesis.H1, np.random.default_rng(10))
    h0 = generate_observations(ch, dims, 0.0, Hypothesis.H0, np.random.default_rng(10))
    signal = h1.vectors - h0.vectors
    ratio = np.mean(np.sum(np.abs(signal) ** 2, 1)) / np.mean(np.sum(np.abs(h0.vectors) ** 2, 1))
    assert 0.9 <= ratio <= 1.1


def test_common_random_numbers():
    dims = ModelDims(3, 3, 2, 50)
    ch = sample_channel(dims, np.random.default_rng(0))
    h0 = generate_observations(ch, dims, -5.0, "H0", np.random.default_rng(42))
    h1 = generate_observations(ch, dims, -5.0, "H1", np.random.default_rng(42))
    H = build_channel_matrix(ch, dims)
    signal = h1.vectors - h0.vectors
    # residual must lie in the column space of H (pure signal, no extra noise)
    coef, *_ = np.linalg.lstsq(H, signal.T, rcond=None)
    np.testing.assert_allclose(H @ coef, signal.T, atol=1e-10)
    assert h0.noise_power == h1.noise_power


def test_symbol_windows_share_symbols():
    dims = ModelDims(5, 4, 10, 3)
    rng = np.random.default_rng(1)
    ch = ChannelRealization(np.eye(4, 10, dtype=complex) + 0.1)
    block = generate_observations(ch, dims, 100.0, Hypothesis.H1, rng)
    assert block.vectors.shape == (3, 20)
    from specsense.model import symbol_windows
    s = np.arange(2 * 5 + 14, dtype=float)
    W = symbol_windows(s, dims)
    np.testing.assert_array_equal(W[0], s[:14])
    np.testing.assert_array_equal(W[1], s[5:19])
    np.testing.assert_array_equal(W[1][:9], W[0][5:])  # L - 1 = 9 shared


@pytest.mark.parametrize("snr", [np.nan, np.inf])
def test_generate_rejects_non_finite_snr(snr):
    dims = ModelDims(3, 3, 2, 5)
    ch = sample_channel(dims, np.random.default_rng(0))
    with pytest.raises(ValueError):
        generate_observations(ch, dims, snr, Hypothesis.H1, np.random.default_rng(0))


def test_snr_calibration_large_n():
    dims = ModelDims(5, 4, 10, 100_000)
    ch = sample_channel(dims, np.random.default_rng(2))
    h1 = generate_observations(ch, dims, 3.0, "H1", np.random.default_rng(4))
    h0 = generate_observations(ch, dims, 3.0, "H0", np.random.default_rng(4))
    sig = h1.vectors - h0.vectors
    ratio = np.sum(np.abs(sig) ** 2) / np.sum(np.abs(h0.vectors) ** 2)
    assert ratio == pytest.approx(10 ** 0.3, rel=0.05)


def test_json_round_trip():
    dims = ModelDims(3, 3, 2, 4)
    ch = sample_channel(dims, np.random.default_rng(0))
    block = generate_observations(ch, dims, 1.0, "H1", np.random.default_rng(1))
    ch2 = ChannelRealization.from_json(json.loads(json.dumps(ch.to_json())))
    b2 = ObservationBlock.from_json(json.loads(json.dumps(block.to_json())))
    np.testing.assert_array_equal(ch2.taps, ch.taps)
    np.testing.assert_array_equal(b2.vectors, block.vectors)
    assert b2.dims == dims and b2.hypothesis is Hypothesis.H1


def test_block_validation():
    dims = ModelDims(3, 3, 2, 4)
    with pytest.raises(DimensionError):
        ObservationBlock(np.zeros((4, 8)), "H0", 1.0, dims)
    with pytest.raises(ValueError):
        ObservationBlock(np.zeros((4, 9)), "H0", 0.0, dims)


# ------------------------------------------------------------------ whitening

def test_whitening_identity_for_white_filter():
    dims = ModelDims(5, 4, 10, 1)
    acf = FilterAcf(np.r_[1.0, np.zeros(dims.p - 1)])
    np.testing.assert_allclose(whitening_matrix(acf, dims), np.eye(dims.p), atol=1e-14)


def test_whitening_matches_eig_sqrt_oracle():
    dims = ModelDims(2, 2, 1, 1)  # p = 4
    acf = FilterAcf(0.5 ** np.arange(4))
    Q = acf.matrix(4)
    oracle = np.linalg.inv(sqrtm_eig(Q))
    W = whitening_matrix(acf, dims)
    np.testing.assert_allclose(W, oracle, atol=1e-10)
    np.testing.assert_allclose(W, W.T, atol=1e-14)
    assert np.linalg.norm(W @ Q @ W - np.eye(4)) / 2.0 < 1e-10


def test_whitening_default_filter_inverse_identity():
    dims = ModelDims(5, 4, 10, 1)
    acf = exponential_acf(dims)
    Q = acf.matrix(dims.p)
    W = whitening_matrix(acf, dims)
    I = np.eye(dims.p)
    assert np.linalg.norm(W @ Q @ W.T - I) / np.linalg.norm(I) < 1e-10
    S = correlation_sqrt(acf, dims)
    np.testing.assert_allclose(S @ S, Q, atol=1e-12)


def test_whitened_noise_is_white():
    dims = ModelDims(2, 2, 1, 100_000)
    acf = FilterAcf(0.5 ** np.arange(4))
    S = correlation_sqrt(acf, dims)
    W = whitening_matrix(acf, dims)
    ch = ChannelRealization(np.ones((2, 1)))
    block = generate_observations(ch, dims, 0.0, "H0", np.random.default_rng(8), S)
    R_raw = sample_covariance(block)
    assert np.max(np.abs(R_raw / block.noise_power - acf.matrix(4))) < 0.02
    R = sample_covariance(whiten(block, W))
    assert np.max(np.abs(R / block.noise_power - np.eye(4))) < 0.02


def test_raised_cosine_oversampled_is_singular():
    dims = ModelDims(5, 4, 10, 1)
    acf = raised_cosine_acf(dims, rolloff=0.5)
    with pytest.raises(SingularFilterError):
        whitening_matrix(acf, dims)


def test_raised_cosine_two_fold_full_rolloff_is_usable():
    dims = ModelDims(5, 2, 3, 1)
    acf = raised_cosine_acf(dims, rolloff=1.0)
    W = whitening_matrix(acf, dims, eps=1e-4)
    Q = acf.matrix(dims.p)
    assert np.linalg.norm(W @ Q @ W - np.eye(dims.p)) < 1e-8


def test_filter_acf_validation():
    with pytest.raises(ValueError):
        FilterAcf(np.array([0.9, 0.1]))
    with pytest.raises(ValueError):
        FilterAcf(np.array([1.0, 1.5]))


def test_whiten_identity_and_scaling():
    dims = ModelDims(3, 3, 2, 200)
    ch = sample_channel(dims, np.random.default_rng(0))
    block = generate_observations(ch, dims, 0.0, "H1", np.random.default_rng(1))
    same = whiten(block, np.eye(dims.p))
    np.testing.assert_array_equal(same.vectors, block.vectors)
    assert same.hypothesis is block.hypothesis and same.dims == block.dims
    l0 = block_spectrum(block).values
    l2 = block_spectrum(whiten(block, 2 * np.eye(dims.p))).values
    np.testing.assert_allclose(l2, 4 * l0, rtol=1e-10)
    with pytest.raises(DimensionError):
        whiten(block, np.eye(dims.p + 1))


@pytest.mark.slow
def test_whitening_restores_false_alarm_rate():
    # common random numbers: trial i uses the same white draw in both arms
    dims = ModelDims(5, 4, 10, 2000)
    acf = exponential_acf(dims)
    S, W = correlation_sqrt(acf, dims), whitening_matrix(acf, dims)
    trials = 1000
    white = whitened = coloured = 0
    for i in range(trials):
        ch = sample_channel(dims, np.random.default_rng([77, i]), Mode.OVER_SAMPLING)
        b = generate_observations(ch, dims, 0.0, "H0", np.random.default_rng([78, i]))
        white += sitc_decide(block_spectrum(b), Criterion.AIC).present
        c = generate_observations(ch, dims, 0.0, "H0", np.random.default_rng([78, i]), S)
        coloured += sitc_decide(block_spectrum(c), Criterion.AIC).present
        whitened += sitc_decide(block_spectrum(whiten(c, W)), Criterion.AIC).present
    assert abs(white - whitened) / trials <= 0.02
    # without whitening the correlated noise looks like a signal
    assert coloured / trials > 0.5
