import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from risnr.channel import SystemConfig, los_channel
from risnr.rng import RngStream, sample_complex_gaussian
from risnr.spectra import (
    ALPHA0,
    BETA0,
    NumericDomainError,
    ShapeError,
    lambda_plus_gamma,
    top_eigen_batch,
    wishart_decompose,
)


def test_identity_embedding():
    d = wishart_decompose(np.eye(2), 2, "right")
    assert np.allclose(d.eigenvalues, [0.5, 0.5])
    assert d.nonzero_count == 2


def test_los_single_nonzero_eigenvalue():
    H = los_channel(SystemConfig(64, 4, 4, channel_kind="lr"))
    d = wishart_decompose(H, 64, "left")
    assert d.nonzero_count == 1
    assert d.eigenvalues[0] == pytest.approx(0.25)
    assert np.allclose(d.eigenvalues[1:], 0.0)


def test_trace_identity():
    G = sample_complex_gaussian(4, 64, RngStream(1, 0))
    d = wishart_decompose(G, 64, "right")
    tr = np.trace(G.conj().T @ G).real / 64
    assert abs(d.eigenvalues.sum() - tr) <= 1e-10 * tr


@given(st.integers(1, 6), st.integers(0, 30), st.integers(0, 10_000), st.sampled_from(["left", "right"]))
def test_decomposition_properties(m, extra, seed, side):
    N = m + extra
    if side == "right":
        X = sample_complex_gaussian(m, N, RngStream(seed, 0))
        W = X.conj().T @ X / N
    else:
        X = sample_complex_gaussian(N, m, RngStream(seed, 0))
        W = X @ X.conj().T / N
    d = wishart_decompose(X, N, side)
    lam, V = d.eigenvalues, d.eigenvectors
    assert d.nonzero_count == m
    assert np.all(np.diff(lam) <= 1e-12 * lam[0])
    assert np.all(lam >= -1e-10 * lam[0])
    assert np.allclose(V.conj().T @ V, np.eye(m), atol=1e-8)
    assert np.allclose(W @ V, V * lam, atol=1e-9 * max(1.0, lam[0]))
    assert np.allclose(d.reconstruct(), W, atol=1e-9 * max(1.0, lam[0]))
    assert np.allclose(np.sort(lam)[::-1], np.linalg.eigvalsh(W)[::-1][:m], atol=1e-9)


def test_canonical_phase():
    X = sample_complex_gaussian(3, 20, RngStream(4, 0))
    V = wishart_decompose(X, 20, "right").eigenvectors
    assert np.allclose(V[0].imag, 0.0) and np.all(V[0].real > 0)


def test_rank_deficient_input_falls_back():
    x = sample_complex_gaussian(1, 10, RngStream(3, 0))
    X = np.vstack([x, 2 * x])
    d = wishart_decompose(X, 10, "right")
    assert d.nonzero_count == 1
    assert np.allclose(d.reconstruct(), X.conj().T @ X / 10)


def test_shape_errors():
    with pytest.raises(ShapeError):
        wishart_decompose(np.ones((4, 8)), 7, "right")
    with pytest.raises(ShapeError):
        wishart_decompose(np.ones((4, 8)), 8, "left")
    with pytest.raises(ShapeError):
        wishart_decompose(np.ones(4), 4, "right")
    with pytest.raises(ValueError):
        wishart_decompose(np.ones((4, 8)), 8, "up")


def test_top_eigen_batch_matches_single():
    A = np.stack([sample_complex_gaussian(4, 32, RngStream(6, i)) for i in range(5)])
    lam, absv = top_eigen_batch(A, 32)
    for i in range(5):
        d = wishart_decompose(A[i], 32, "right")
        assert np.allclose(lam[i], d.eigenvalues)
        assert np.allclose(absv[i], np.abs(d.eigenvectors).T)


def test_lambda_plus_reference_values():
    g = lambda_plus_gamma(4, 64)
    b1 = 64 ** (-2 / 3) * 1.25 * 5 ** (1 / 3)
    assert b1 == pytest.approx(0.133592, abs=1e-6)
    assert g.mean == pytest.approx(1.5625 - ALPHA0 * b1, rel=1e-14)
    assert g.mean == pytest.approx(1.32590, abs=1e-5)
    assert g.variance == pytest.approx(0.014513, abs=1e-6)
    assert g.variance == pytest.approx(BETA0 * b1 * b1, rel=1e-14)


@given(st.integers(1, 16), st.integers(0, 5000))
def test_gamma_parameters_consistent(M, extra):
    g = lambda_plus_gamma(M, M + extra + 16)
    assert g.gamma_shape * g.gamma_scale == pytest.approx(g.mean, rel=1e-12)
    assert g.gamma_shape * g.gamma_scale**2 == pytest.approx(g.variance, rel=1e-12)
    assert g.mean > 0 and g.variance > 0


def test_lambda_plus_large_n_limit():
    g = lambda_plus_gamma(4, 10**9)
    assert g.mean == pytest.approx(1.0, abs=1e-3)
    assert g.variance < 1e-9 < lambda_plus_gamma(4, 10**6).variance


def test_lambda_plus_domain():
    with pytest.raises(ValueError):
        lambda_plus_gamma(5, 4)
    with pytest.raises(ValueError):
        lambda_plus_gamma(0, 4)
    with pytest.raises(NumericDomainError):
        lambda_plus_gamma(1, 1, alpha0=10.0)


def _largest(M, N, n, seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, M, N, 2))
    X = (z[..., 0] + 1j * z[..., 1]) * math.sqrt(0.5)
    return np.linalg.eigvalsh(X @ np.conj(np.swapaxes(X, 1, 2)) / N)[:, -1]


def test_lambda_plus_mean_against_monte_carlo():
    lam = _largest(4, 64, 10_000, 123)
    assert abs(lam.mean() / lambda_plus_gamma(4, 64).mean - 1) < 0.02
