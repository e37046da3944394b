"""SNR distributions and scaling laws for RIS-aided MIMO links with phase noise."""

from .channel import ChannelKind, SystemConfig
from .rng import RngStream, UniformFull, UniformScaled, VonMises, Zero
from .samplers import Route, SampleSet, run_monte_carlo

__all__ = [
    "ChannelKind",
    "SystemConfig",
    "RngStream",
    "Zero",
    "UniformFull",
    "UniformScaled",
    "VonMises",
    "Route",
    "SampleSet",
    "run_monte_carlo",
]
__version__ = "0.1.0"
