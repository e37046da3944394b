"""Modified Bessel functions and gamma-function ratios used by the moment formulas."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

_SERIES_CUTOFF = 15.0


def _ive_series(nu: int, x: float) -> float:
    # sum_k (x/2)^(2k+nu) / (k! (k+nu)!), scaled by exp(-x); all terms positive
    half = 0.5 * x
    term = half**nu / math.factorial(nu)
    total = term
    k = 0
    q = half * half
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        if term < 1e-17 * total:
            break
    return total * math.exp(-x)


def _ive_asymptotic(nu: int, x: float) -> float:
    # Hankel expansion: sqrt(2 pi x) e^-x I_nu(x) ~ sum_k (-1)^k a_k(nu) / x^k
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    prev = math.inf
    for k in range(1, 60):
        term *= -(mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(term) >= prev:
            break  # divergent tail starts here
        total += term
        prev = abs(term)
        if abs(term) < 1e-17 * abs(total):
            break
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_ive(nu: int, x: float) -> float:
    """Exponentially scaled modified Bessel function ``exp(-x) * I_nu(x)``.

    Integer orders only. Power series below x = 15, Hankel asymptotic
    expansion above; relative error is below 1e-12 on both branches.
    """
    if nu < 0:
        raise ValueError("order must be a nonnegative integer")
    if x < 0:
        raise ValueError("argument must be nonnegative")
    if x == 0:
        return 1.0 if nu == 0 else 0.0
    if x < _SERIES_CUTOFF:
        return _ive_series(nu, x)
    return _ive_asymptotic(nu, x)


def bessel_ratio(nu: int, x: float) -> float:
    """I_nu(x) / I_0(x), free of overflow for large x."""
    return bessel_ive(nu, x) / bessel_ive(0, x)


# Gamma(n) / Gamma(n + 1/2) = n^(-1/2) * sum_k _HALF_SERIES[k] n^-k for large n
_HALF_SERIES = (1.0, 1 / 8, 1 / 128, -5 / 1024, -21 / 32768, 399 / 262144, 869 / 4194304)
_HALF_SERIES_MIN = 40.0


def gamma_ratio_half(n):
    """Gamma(n) / Gamma(n + 1/2).

    Log-gamma difference for small n, asymptotic series above n = 40 where
    the difference of two large log-gammas loses digits; no overflow at n >= 170.
    """
    n = np.asarray(n, dtype=float)
    big = n >= _HALF_SERIES_MIN
    small = np.where(big, 1.0, n)
    out = np.exp(gammaln(small) - gammaln(small + 0.5))
    if np.any(big):
        inv = 1.0 / np.where(big, n, 1.0)
        series = np.zeros_like(inv)
        for c in reversed(_HALF_SERIES):
            series = series * inv + c
        out = np.where(big, series * np.sqrt(inv), out)
    return float(out) if out.ndim == 0 else out
