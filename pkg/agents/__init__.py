"""Agents module: samplers and zero-intelligence trader behaviour"""

from .samplers import (
    ExponentialFlightTimeDist,
    FlightTimeDist,
    VelocityDist,
    make_rng,
    open_uniform,
    sample_flight_time,
    sample_quantity,
    sample_velocity,
    trial_seed,
)
from .traders import (
    NOISE_LIMIT_OFFSET,
    FillEvent,
    Phase,
    TraderKind,
    TraderState,
    noise_step,
    strategic_quote,
)

__all__ = [
    "ExponentialFlightTimeDist",
    "FillEvent",
    "FlightTimeDist",
    "NOISE_LIMIT_OFFSET",
    "Phase",
    "TraderKind",
    "TraderState",
    "VelocityDist",
    "make_rng",
    "noise_step",
    "open_uniform",
    "sample_flight_time",
    "sample_quantity",
    "sample_velocity",
    "strategic_quote",
    "trial_seed",
]
