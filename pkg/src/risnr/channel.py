"""System configuration and the RR / LR channel generators."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .rng import PhaseNoiseModel, StreamLike, Zero, as_generator, describe_noise, sample_complex_gaussian

# substream ids inside one per-sample RngStream
SUB_G = 0
SUB_H = 1
SUB_PHASE = 2
SUB_GAMMA = 3
SUB_V = 4
SUB_U = 5
SUB_CHI2 = 6


class ConfigMismatchError(ValueError):
    """An operation was called with a configuration of the wrong channel kind."""


class ChannelKind(str, enum.Enum):
    RR = "rr"  # Rayleigh on both hops
    LR = "lr"  # line of sight transmitter-RIS, Rayleigh RIS-receiver


@dataclass(frozen=True)
class SystemConfig:
    N: int
    N_T: int = 4
    N_R: int = 4
    gamma0: float = 1.0
    channel_kind: ChannelKind = ChannelKind.RR
    noise: PhaseNoiseModel = field(default_factory=Zero)

    def __post_init__(self):
        object.__setattr__(self, "channel_kind", ChannelKind(self.channel_kind))
        if min(self.N, self.N_T, self.N_R) < 1:
            raise ValueError("N, N_T and N_R must be at least 1")
        if self.N < max(self.N_T, self.N_R):
            raise ValueError(f"need N >= max(N_T, N_R), got N={self.N}, N_T={self.N_T}, N_R={self.N_R}")
        if not self.gamma0 > 0:
            raise ValueError("gamma0 must be positive")

    def describe(self) -> str:
        return (
            f"{self.channel_kind.value.upper()} N={self.N} N_T={self.N_T} N_R={self.N_R} "
            f"gamma0={self.gamma0:g} noise={describe_noise(self.noise)}"
        )


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array; spacing in wavelengths, steering angle in radians."""

    steering_angle: float = 0.0
    element_spacing_wavelengths: float = 0.5


def array_response(size: int, geom: ArrayGeometry = ArrayGeometry()) -> np.ndarray:
    """Unit-norm ULA response; entry t is exp(-j 2 pi f(t)) / sqrt(size)."""
    if size < 1:
        raise ValueError("size must be at least 1")
    f = np.arange(size) * geom.element_spacing_wavelengths * math.sin(geom.steering_angle)
    return np.exp(-2j * np.pi * f) / math.sqrt(size)


def draw_rayleigh_pair(cfg: SystemConfig, stream: StreamLike) -> tuple[np.ndarray, np.ndarray]:
    """G (N_R x N) and H (N x N_T), both i.i.d. CN(0, 1)."""
    if cfg.channel_kind is not ChannelKind.RR:
        raise ConfigMismatchError("draw_rayleigh_pair needs an RR configuration")
    G = sample_complex_gaussian(cfg.N_R, cfg.N, as_generator(stream, SUB_G))
    H = sample_complex_gaussian(cfg.N, cfg.N_T, as_generator(stream, SUB_H))
    return G, H


def draw_receive_channel(cfg: SystemConfig, stream: StreamLike) -> np.ndarray:
    """RIS-receiver matrix G (N_R x N); Rayleigh for both channel kinds."""
    return sample_complex_gaussian(cfg.N_R, cfg.N, as_generator(stream, SUB_G))


def los_channel(
    cfg: SystemConfig,
    geom_T: ArrayGeometry = ArrayGeometry(),
    geom_RIS: ArrayGeometry = ArrayGeometry(),
) -> np.ndarray:
    """Rank-one transmitter-RIS matrix sqrt(N_T N_R) a_RIS a_T^H (N x N_T)."""
    if cfg.channel_kind is not ChannelKind.LR:
        raise ConfigMismatchError("los_channel needs an LR configuration")
    a_T = array_response(cfg.N_T, geom_T)
    a_RIS = array_response(cfg.N, geom_RIS)
    return math.sqrt(cfg.N_T * cfg.N_R) * np.outer(a_RIS, a_T.conj())
