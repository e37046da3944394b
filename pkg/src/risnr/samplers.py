"""SNR realizations by three routes.

``exact``
    eigendecomposition of drawn channels, then the eigen-pair SNR expression.
``eid``
    the equivalent-in-distribution product: gamma eigenvalue draws times the
    squared magnitude of a sum over normalized Gaussian magnitudes.
``large_n``
    gamma eigenvalue draws times a two-term non-central chi-square mixture.

For the exact route the transmit beamformer, RIS phases and receive combiner
are optimized for the noise-free channel, so the eigen-pair (l, k) is chosen
by the noise-free metric and the phase noise then perturbs that choice.
"""

from __future__ import annotations

import enum
import io
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .analytics import pair_params, snr_scale
from .channel import (
    SUB_CHI2,
    SUB_GAMMA,
    SUB_PHASE,
    SUB_U,
    SUB_V,
    ChannelKind,
    SystemConfig,
    draw_rayleigh_pair,
    draw_receive_channel,
)
from .rng import RngStream, as_generator, sample_complex_gaussian
from .spectra import ShapeError, lambda_plus_gamma, top_eigen_batch, wishart_decompose

LARGE_N_MIN = 16
BLOCK_SIZE = 256


class Route(str, enum.Enum):
    EXACT = "exact"
    EID = "eid"
    LARGE_N = "large_n"


class RegimeWarning(UserWarning):
    """The large-N representation is used below its intended range of N."""


@dataclass
class SampleSet:
    values: np.ndarray
    config: SystemConfig
    route: Route
    master_seed: int
    n_samples: int

    def to_csv(self, dest: str | os.PathLike | TextIO) -> None:
        """Write ``index,snr`` rows; floats use shortest round-trip repr, LF endings."""
        buf = io.StringIO()
        buf.write("index,snr\n")
        for i, v in enumerate(self.values.tolist()):
            buf.write(f"{i},{v!r}\n")
        text = buf.getvalue()
        if hasattr(dest, "write"):
            dest.write(text)
        else:
            with open(dest, "w", newline="\n", encoding="ascii") as fh:
                fh.write(text)


def read_sample_csv(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 1]


# ---------------------------------------------------------------------------
# exact route, one realization


def _noisy_pick(metric0: np.ndarray, metric: np.ndarray, choose_under_noise: bool) -> float:
    if choose_under_noise:
        return float(metric.max())
    return float(metric.ravel()[np.argmax(metric0)])


def snr_rr_exact(
    G: np.ndarray,
    H: np.ndarray,
    noise_angles: np.ndarray,
    gamma0: float,
    choose_under_noise: bool = False,
) -> float:
    """gamma0 N^2 lambda_l,G lambda_k,H |sum_n |v_l(n)| |u_k(n)| e^{j d_n}|^2 at the chosen pair.

    The pair maximizes the noise-free value; ``choose_under_noise=True``
    instead maximizes the noisy expression itself.
    """
    G = np.asarray(G)
    H = np.asarray(H)
    N = G.shape[1]
    if H.shape[0] != N or np.shape(noise_angles) != (N,):
        raise ShapeError(f"inconsistent shapes G{G.shape}, H{H.shape}, angles{np.shape(noise_angles)}")
    dg = wishart_decompose(G, N, "right")
    dh = wishart_decompose(H, N, "left")
    kg, kh = max(dg.nonzero_count, 1), max(dh.nonzero_count, 1)
    v = np.abs(dg.eigenvectors[:, :kg]).T
    u = np.abs(dh.eigenvectors[:, :kh]).T
    w = np.outer(dg.eigenvalues[:kg], dh.eigenvalues[:kh])
    phase = np.exp(1j * np.asarray(noise_angles))
    ups = np.einsum("ln,kn,n->lk", v, u, phase)
    ups0 = v @ u.T
    return gamma0 * N**2 * _noisy_pick(w * ups0**2, w * np.abs(ups) ** 2, choose_under_noise)


def snr_lr_exact(
    G: np.ndarray,
    noise_angles: np.ndarray,
    gamma0: float,
    N_T: int,
    choose_under_noise: bool = False,
) -> float:
    """gamma0 N_T N lambda_l,G |sum_n |v_l(n)| e^{j d_n}|^2 at the chosen eigenvector."""
    G = np.asarray(G)
    N = G.shape[1]
    if np.shape(noise_angles) != (N,):
        raise ShapeError(f"inconsistent shapes G{G.shape}, angles{np.shape(noise_angles)}")
    dg = wishart_decompose(G, N, "right")
    kg = max(dg.nonzero_count, 1)
    v = np.abs(dg.eigenvectors[:, :kg]).T
    lam = dg.eigenvalues[:kg]
    psi = v @ np.exp(1j * np.asarray(noise_angles))
    psi0 = v.sum(axis=1)
    return gamma0 * N_T * N * _noisy_pick(lam * psi0**2, lam * np.abs(psi) ** 2, choose_under_noise)


def snr_exact_sample(cfg: SystemConfig, stream: RngStream) -> float:
    angles = cfg.noise.sample(cfg.N, as_generator(stream, SUB_PHASE))
    if cfg.channel_kind is ChannelKind.RR:
        G, H = draw_rayleigh_pair(cfg, stream)
        return snr_rr_exact(G, H, angles, cfg.gamma0)
    return snr_lr_exact(draw_receive_channel(cfg, stream), angles, cfg.gamma0, cfg.N_T)


# ---------------------------------------------------------------------------
# equivalent-in-distribution and large-N routes


def _normalized_magnitudes(N: int, rng: np.random.Generator) -> np.ndarray:
    y = np.abs(sample_complex_gaussian(1, N, rng)[0])
    return y / np.linalg.norm(y)


def _gamma_draws(cfg: SystemConfig, rng: np.random.Generator) -> float:
    g = lambda_plus_gamma(cfg.N_R, cfg.N)
    prod = rng.gamma(g.gamma_shape, g.gamma_scale)
    if cfg.channel_kind is ChannelKind.RR:
        h = lambda_plus_gamma(cfg.N_T, cfg.N)
        prod *= rng.gamma(h.gamma_shape, h.gamma_scale)
    return prod


def snr_eid_sample(cfg: SystemConfig, stream: RngStream) -> float:
    phase = np.exp(1j * cfg.noise.sample(cfg.N, as_generator(stream, SUB_PHASE)))
    amp = _normalized_magnitudes(cfg.N, as_generator(stream, SUB_V))
    if cfg.channel_kind is ChannelKind.RR:
        amp = amp * _normalized_magnitudes(cfg.N, as_generator(stream, SUB_U))
    s = np.abs(amp @ phase) ** 2
    return snr_scale(cfg) * _gamma_draws(cfg, as_generator(stream, SUB_GAMMA)) * float(s)


def snr_largen_sample(cfg: SystemConfig, stream: RngStream) -> float:
    if cfg.N < LARGE_N_MIN:
        warnings.warn(f"large-N representation used at N={cfg.N} < {LARGE_N_MIN}", RegimeWarning, stacklevel=2)
    p = pair_params(cfg)
    z_re, z_im = as_generator(stream, SUB_CHI2).standard_normal(2)
    # var * chi2_1(m1^2/var) == (sd * Z + m1)^2, which also covers var == 0
    q = (math.sqrt(p.var_re) * z_re + p.m1_re) ** 2 + (math.sqrt(p.var_im) * z_im + p.m1_im) ** 2
    return snr_scale(cfg) * _gamma_draws(cfg, as_generator(stream, SUB_GAMMA)) * q


# ---------------------------------------------------------------------------
# Monte Carlo driver


def _exact_block(cfg: SystemConfig, seed: int, start: int, stop: int) -> np.ndarray:
    n, N = stop - start, cfg.N
    G = np.empty((n, cfg.N_R, N), dtype=complex)
    Ht = np.empty((n, cfg.N_T, N), dtype=complex) if cfg.channel_kind is ChannelKind.RR else None
    phase = np.empty((n, N), dtype=complex)
    for j, i in enumerate(range(start, stop)):
        stream = RngStream(seed, i)
        if Ht is not None:
            g, h = draw_rayleigh_pair(cfg, stream)
            G[j], Ht[j] = g, h.T
        else:
            G[j] = draw_receive_channel(cfg, stream)
        phase[j] = np.exp(1j * cfg.noise.sample(N, as_generator(stream, SUB_PHASE)))

    lam_g, v = top_eigen_batch(G, N)
    rows = np.arange(n)
    if Ht is None:
        psi = np.einsum("sln,sn->sl", v, phase)
        pick = np.argmax(lam_g * v.sum(axis=2) ** 2, axis=1)
        val = (lam_g * np.abs(psi) ** 2)[rows, pick]
    else:
        lam_h, u = top_eigen_batch(Ht, N)
        w = lam_g[:, :, None] * lam_h[:, None, :]
        ups0 = v @ np.swapaxes(u, 1, 2)
        ups = (v * phase[:, None, :]) @ np.swapaxes(u, 1, 2)
        pick = np.argmax((w * ups0**2).reshape(n, -1), axis=1)
        val = (w * np.abs(ups) ** 2).reshape(n, -1)[rows, pick]
    return snr_scale(cfg) * val


def _scalar_block(fn, cfg: SystemConfig, seed: int, start: int, stop: int) -> np.ndarray:
    return np.array([fn(cfg, RngStream(seed, i)) for i in range(start, stop)])


def _run_block(args) -> np.ndarray:
    cfg, route, seed, start, stop = args
    if route is Route.EXACT:
        return _exact_block(cfg, seed, start, stop)
    fn = snr_eid_sample if route is Route.EID else snr_largen_sample
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        return _scalar_block(fn, cfg, seed, start, stop)


def run_monte_carlo(
    cfg: SystemConfig,
    route: Route | str,
    n_samples: int,
    master_seed: int,
    workers: int = 1,
) -> SampleSet:
    """Draw ``n_samples`` SNR values; sample i always comes from RngStream(master_seed, i).

    Work is cut into fixed blocks of BLOCK_SIZE indices regardless of
    ``workers``, so the output is bit-identical for any worker count.
    """
    route = Route(route)
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if route is Route.LARGE_N and cfg.N < LARGE_N_MIN:
        warnings.warn(f"large-N representation used at N={cfg.N} < {LARGE_N_MIN}", RegimeWarning, stacklevel=2)
    jobs = [
        (cfg, route, master_seed, s, min(s + BLOCK_SIZE, n_samples)) for s in range(0, n_samples, BLOCK_SIZE)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, jobs))
    else:
        parts = [_run_block(j) for j in jobs]
    values = np.concatenate(parts)
    return SampleSet(values, cfg, route, master_seed, n_samples)
