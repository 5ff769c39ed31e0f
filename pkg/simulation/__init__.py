"""Simulation module: trial engine, metrics, Lévy walks and sweeps"""

from .analysis import build_report
from .config import Bias, SimConfig, SweepGrid, env_seed, sweep_from_mapping
from .engine import MarketSimulator, TrialResult, interarrival_times, run_trial
from .metrics import EfficiencyReport, efficiency, lag1_autocorrelation, transaction_times
from .sweep import TRIAL_COLUMNS, SweepResult, run_sweep
from .walks import (
    MsdEstimate,
    WalkEnsemble,
    expected_msd_exponent,
    monte_carlo_propagator,
    msd_of_quotes,
    simulate_levy_walks,
)

__all__ = [
    "Bias",
    "EfficiencyReport",
    "MarketSimulator",
    "MsdEstimate",
    "SimConfig",
    "SweepGrid",
    "SweepResult",
    "TRIAL_COLUMNS",
    "TrialResult",
    "WalkEnsemble",
    "build_report",
    "efficiency",
    "env_seed",
    "expected_msd_exponent",
    "interarrival_times",
    "lag1_autocorrelation",
    "monte_carlo_propagator",
    "msd_of_quotes",
    "run_sweep",
    "run_trial",
    "simulate_levy_walks",
    "sweep_from_mapping",
    "transaction_times",
]
