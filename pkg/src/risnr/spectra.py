"""Wishart eigendecompositions and the gamma law of the largest eigenvalue."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ALPHA0 = 1.7711  # minus the mean of the beta=2 Tracy-Widom law
BETA0 = 0.8132  # variance of the beta=2 Tracy-Widom law

ZERO_EIG_RTOL = 1e-10


class ShapeError(ValueError):
    """Matrix dimensions are inconsistent with the requested operation."""


class NumericDomainError(ArithmeticError):
    pass


@dataclass
class SpectralDecomp:
    eigenvalues: np.ndarray  # descending, length min(rows, cols) of the factor
    eigenvectors: np.ndarray  # columns aligned with eigenvalues, each of length N
    nonzero_count: int

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


@dataclass(frozen=True)
class EigenSummary:
    mean: float
    variance: float
    gamma_shape: float
    gamma_scale: float


def _canonical_phase(V: np.ndarray) -> np.ndarray:
    # rotate each column so its first non-negligible entry is real positive
    out = V.copy()
    for j in range(V.shape[1]):
        col = out[:, j]
        idx = int(np.argmax(np.abs(col) > 1e-8 * np.abs(col).max()))
        ph = col[idx] / abs(col[idx])
        out[:, j] = col / ph
    return out


def wishart_decompose(X: np.ndarray, N: int, side: str) -> SpectralDecomp:
    """Eigendecomposition of W = X^H X / N (side="right") or X X^H / N (side="left").

    ``X`` is the rectangular channel factor: G (N_R x N) for the right form,
    H (N x N_T) for the left form, so W is N x N either way. Only the
    min(rows, cols) leading eigenpairs are returned; the rest of the spectrum
    is identically zero.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2:
        raise ShapeError("X must be a matrix")
    if side == "right":
        if X.shape[1] != N:
            raise ShapeError(f"right form needs N columns, got shape {X.shape} with N={N}")
        A = X  # rows span the eigenvectors' conjugates
    elif side == "left":
        if X.shape[0] != N:
            raise ShapeError(f"left form needs N rows, got shape {X.shape} with N={N}")
        A = X.conj().T
    else:
        raise ValueError("side must be 'left' or 'right'")

    # W = A^H A / N shares its nonzero spectrum with the small Gram K = A A^H / N
    K = A @ A.conj().T / N
    lam, w = np.linalg.eigh(K)
    lam = np.clip(lam[::-1], 0.0, None)
    w = w[:, ::-1]
    lam_max = lam[0] if lam.size else 0.0
    nonzero = int(np.sum(lam > ZERO_EIG_RTOL * lam_max)) if lam_max > 0 else 0
    m = lam.size

    if nonzero == m:
        V = A.conj().T @ w / np.sqrt(N * lam)
    else:
        # rank deficient: lifting fails on the null part, fall back to the full N x N form
        W = A.conj().T @ A / N
        full_lam, full_V = np.linalg.eigh((W + W.conj().T) / 2)
        V = full_V[:, ::-1][:, :m]
        lam = np.clip(full_lam[::-1][:m], 0.0, None)
        lam[nonzero:] = 0.0
    return SpectralDecomp(lam, _canonical_phase(V), nonzero)


def top_eigen_batch(A: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Batched nonzero spectrum of A^H A / N for A of shape (batch, M, N).

    Returns eigenvalues (batch, M), descending, and eigenvector entry
    magnitudes (batch, M, N). Assumes full row rank, which holds with
    probability one for Gaussian factors.
    """
    K = A @ np.conj(np.swapaxes(A, 1, 2)) / N
    lam, w = np.linalg.eigh(K)
    lam = lam[:, ::-1]
    w = w[:, :, ::-1]
    V = np.conj(np.swapaxes(A, 1, 2)) @ w / np.sqrt(N * lam)[:, None, :]
    return lam, np.abs(np.swapaxes(V, 1, 2))


def lambda_plus_gamma(M: int, N: int, alpha0: float = ALPHA0, beta0: float = BETA0) -> EigenSummary:
    """Moment-matched gamma law of the largest eigenvalue of an M x N complex Wishart / N."""
    if M < 1 or N < M:
        raise ValueError(f"need 1 <= M <= N, got M={M}, N={N}")
    r = math.sqrt(M / N)
    a1 = (1.0 + r) ** 2
    b1 = N ** (-2.0 / 3.0) * (1.0 + r) * (1.0 + math.sqrt(N / M)) ** (1.0 / 3.0)
    mean = a1 - alpha0 * b1
    var = beta0 * b1 * b1
    if not (mean > 0 and var > 0):
        raise NumericDomainError(f"nonpositive eigenvalue moments for M={M}, N={N}")
    return EigenSummary(mean, var, mean * mean / var, var / mean)
