"""Random streams, phase-noise laws and complex Gaussian draws.

Every random quantity in the package is drawn from an :class:`RngStream`,
a ``(master_seed, stream_index)`` pair mapped onto the Philox counter-based
generator. The pair fills the 128-bit Philox key, so two streams never share
a key, and a stream's output does not depend on which worker evaluates it or
in what order. Independent draws within one stream use distinct substreams,
which occupy disjoint regions of the counter space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .special import bessel_ratio

_U64 = 1 << 64


class ParameterDomainError(ValueError):
    """A distribution parameter lies outside its admissible range."""


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    stream_index: int

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            value = getattr(self, name)
            if not 0 <= int(value) < _U64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer, got {value}")

    def generator(self, substream: int = 0) -> np.random.Generator:
        """Fresh generator for ``substream``; calling twice replays the same sequence."""
        key = (int(self.master_seed) << 64) | int(self.stream_index)
        return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, int(substream), 0]))


StreamLike = Union[RngStream, np.random.Generator]


def as_generator(stream: StreamLike, substream: int = 0) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    return stream.generator(substream)


@dataclass(frozen=True)
class TrigMoments:
    """E{cos d}, E{sin d}, E{cos^2 d}, E{sin^2 d} of a phase-noise angle d."""

    c1: float
    s1: float
    c2: float
    s2: float


def _split_unit(c2: float) -> tuple[float, float]:
    # derive the smaller half from the larger one so c2 + s2 == 1.0 in floating point
    if c2 >= 0.5:
        return c2, 1.0 - c2
    s2 = 1.0 - c2
    return 1.0 - s2, s2


@dataclass(frozen=True)
class Zero:
    """No phase noise."""

    name = "zero"

    def trig_moments(self) -> TrigMoments:
        return TrigMoments(1.0, 0.0, 1.0, 0.0)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.zeros(n)


@dataclass(frozen=True)
class UniformFull:
    """Phase noise uniform on [-pi, pi]."""

    name = "uniform"

    def trig_moments(self) -> TrigMoments:
        return TrigMoments(0.0, 0.0, 0.5, 0.5)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-math.pi, math.pi, n)


@dataclass(frozen=True)
class UniformScaled:
    """Phase noise uniform on [-eps*pi, eps*pi], 0 < eps <= 1."""

    epsilon: float
    name = "uniform-scaled"

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 1.0) or math.isnan(self.epsilon):
            raise ParameterDomainError(
                f"epsilon must lie in (0, 1], got {self.epsilon}; use Zero for eps = 0"
            )

    def trig_moments(self) -> TrigMoments:
        if self.epsilon == 1.0:
            return UniformFull().trig_moments()
        c2, s2 = _split_unit(0.5 * (1.0 + float(np.sinc(2.0 * self.epsilon))))
        return TrigMoments(float(np.sinc(self.epsilon)), 0.0, c2, s2)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        half_width = self.epsilon * math.pi
        return rng.uniform(-half_width, half_width, n)


@dataclass(frozen=True)
class VonMises:
    """Zero-mean von Mises phase noise with concentration kappa > 0."""

    kappa: float
    name = "von-mises"

    def __post_init__(self):
        if not self.kappa > 0.0 or math.isinf(self.kappa):
            raise ParameterDomainError(f"kappa must be positive and finite, got {self.kappa}")

    def trig_moments(self) -> TrigMoments:
        k = self.kappa
        c1 = bessel_ratio(1, k)
        # E{sin^2} = I1/(k I0); E{cos^2} = (1 + I2/I0)/2 = 1 - E{sin^2}
        s2 = c1 / k
        c2, s2 = _split_unit(1.0 - s2)
        return TrigMoments(c1, 0.0, c2, s2)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return _von_mises_best_fisher(self.kappa, n, rng)


PhaseNoiseModel = Union[Zero, UniformFull, UniformScaled, VonMises]


def _von_mises_best_fisher(kappa: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Best & Fisher (1979) wrapped-Cauchy envelope rejection sampler."""
    tau = 1.0 + math.sqrt(1.0 + 4.0 * kappa * kappa)
    rho = (tau - math.sqrt(2.0 * tau)) / (2.0 * kappa)
    r = (1.0 + rho * rho) / (2.0 * rho)

    out = np.empty(n)
    filled = 0
    while filled < n:
        m = max(2 * (n - filled), 16)
        u1, u2, u3 = rng.random((3, m))
        z = np.cos(math.pi * u1)
        f = (1.0 + r * z) / (r + z)
        c = kappa * (r - f)
        with np.errstate(divide="ignore"):
            accept = (c * (2.0 - c) - u2 > 0.0) | (np.log(c / u2) + 1.0 - c >= 0.0)
        theta = np.sign(u3[accept] - 0.5) * np.arccos(np.clip(f[accept], -1.0, 1.0))
        take = min(theta.size, n - filled)
        out[filled : filled + take] = theta[:take]
        filled += take
    return out


def trig_moments(model: PhaseNoiseModel) -> TrigMoments:
    return model.trig_moments()


def sin2delta_mean(model: PhaseNoiseModel) -> float:
    """E{sin 2d}; zero for every supported law since all are symmetric about zero."""
    return 0.0


def sample_phase_noise(model: PhaseNoiseModel, n: int, stream: StreamLike) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be at least 1")
    return model.sample(n, as_generator(stream, 0))


def sample_complex_gaussian(rows: int, cols: int, stream: StreamLike) -> np.ndarray:
    """rows x cols matrix of i.i.d. CN(0, 1) entries (real and imaginary variance 1/2)."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be at least 1")
    rng = as_generator(stream, 0)
    z = rng.standard_normal((rows, cols, 2))
    return (z[..., 0] + 1j * z[..., 1]) * math.sqrt(0.5)


def noise_from_name(name: str, epsilon: float | None = None, kappa: float | None = None) -> PhaseNoiseModel:
    """Build a phase-noise model from its command-line name."""
    if name == "zero":
        return Zero()
    if name == "uniform":
        return UniformFull()
    if name == "uniform-scaled":
        if epsilon is None:
            raise ParameterDomainError("uniform-scaled noise needs epsilon")
        return UniformScaled(epsilon)
    if name == "von-mises":
        if kappa is None:
            raise ParameterDomainError("von-mises noise needs kappa")
        return VonMises(kappa)
    raise ParameterDomainError(f"unknown phase-noise model {name!r}")


def uniform_noise(epsilon: float) -> PhaseNoiseModel:
    """U(-eps*pi, eps*pi) with the endpoints mapped to Zero (eps = 0) and UniformFull (eps = 1)."""
    if epsilon == 0.0:
        return Zero()
    if epsilon == 1.0:
        return UniformFull()
    return UniformScaled(epsilon)


def describe_noise(model: PhaseNoiseModel) -> str:
    if isinstance(model, UniformScaled):
        return f"uniform-scaled(eps={model.epsilon:g})"
    if isinstance(model, VonMises):
        return f"von-mises(kappa={model.kappa:g})"
    return model.name
