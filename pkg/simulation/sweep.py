"""
Seeded Parameter Sweep

Runs the event-rate x gamma x bias grid, `trials` independent trials per
cell, and assembles the summary tables.

Features:
- One seed per (cell, trial): base_seed + cell_index * trials + trial
- Optional process pool (`jobs`); results are keyed by (cell, trial) and
  sorted, so the tables do not depend on the number of workers
- Failed trials are recorded with a status dict and skipped in aggregates
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional

import pandas as pd

from agents import trial_seed

from .config import SimConfig, SweepGrid
from .engine import run_trial

logger = logging.getLogger(__name__)

TRIAL_COLUMNS = [
    "event_rate",
    "gamma",
    "bias",
    "trial",
    "seed",
    "n_trades",
    "efficiency",
    "trades_per_event",
    "noise_fraction",
]
DIAGNOSTIC_COLUMNS = TRIAL_COLUMNS + [
    "efficiency_per_rate",
    "efficiency_positive",
    "floor_share",
    "n_transactions",
    "lag1_autocorr",
    "n_events",
    "end_reason",
    "flagged",
    "status",
    "error",
]


@dataclass
class SweepResult:
    """Per-trial rows, diagnostics, per-cell aggregates and failures."""

    trials: pd.DataFrame
    diagnostics: pd.DataFrame
    cells: pd.DataFrame
    failures: List[Dict] = field(default_factory=list)

    @property
    def n_ok(self) -> int:
        return len(self.trials)


def _trial_task(task: Dict) -> Dict:
    """Run one trial and flatten it into a row (top level for pickling)."""
    config: SimConfig = task["config"]
    row = {
        "cell": task["cell"],
        "event_rate": config.event_rate,
        "gamma": config.gamma,
        "bias": config.bias.value,
        "trial": task["trial"],
        "seed": config.seed,
    }
    try:
        result = run_trial(config)
    except Exception as e:
        row.update({"status": "error", "error": f"{type(e).__name__}: {e}"})
        return row

    report = result.report
    row.update(
        {
            "n_trades": report.n_trades,
            "efficiency": report.efficiency,
            "trades_per_event": report.trades_per_event,
            "noise_fraction": result.noise_fraction,
            "efficiency_per_rate": report.efficiency_per_rate,
            "efficiency_positive": report.efficiency_positive,
            "floor_share": report.floor_share,
            "n_transactions": report.n_transactions,
            "lag1_autocorr": result.lag1_autocorrelation(),
            "n_events": result.n_events,
            "end_reason": result.end_reason,
            "flagged": report.flagged,
            "status": "success",
            "error": None,
        }
    )
    return row


def build_tasks(grid: SweepGrid, base: SimConfig) -> List[Dict]:
    """Expand the grid into per-trial configs with their seeds."""
    tasks = []
    for cell_index, cell in enumerate(grid.cells):
        for trial in range(grid.trials):
            seed = trial_seed(grid.base_seed, cell_index, grid.trials, trial)
            config = replace(base, seed=seed, **cell)
            tasks.append({"cell": cell_index, "trial": trial, "config": config})
    return tasks


def aggregate_cells(trials: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard deviation of efficiency and trades_per_event per cell."""
    if trials.empty:
        return pd.DataFrame(
            columns=[
                "event_rate", "gamma", "bias", "n_trials",
                "efficiency_mean", "efficiency_std",
                "trades_per_event_mean", "trades_per_event_std",
            ]
        )
    grouped = trials.groupby(["event_rate", "gamma", "bias"], sort=False)
    cells = grouped.agg(
        n_trials=("trial", "count"),
        efficiency_mean=("efficiency", "mean"),
        efficiency_std=("efficiency", "std"),
        trades_per_event_mean=("trades_per_event", "mean"),
        trades_per_event_std=("trades_per_event", "std"),
    )
    return cells.reset_index()


def run_sweep(
    grid: SweepGrid,
    base: Optional[SimConfig] = None,
    jobs: int = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> SweepResult:
    """
    Run every trial of the grid.

    Args:
        grid: Sweep grid
        base: Per-trial parameters not set by the grid (defaults if None)
        jobs: Worker processes (1 runs in-process)
        progress: Optional callback(done, total)

    Returns:
        SweepResult
    """
    grid.validate()
    base = (base or SimConfig()).validate()
    tasks = build_tasks(grid, base)
    total = len(tasks)
    logger.info(f"Sweep: {len(grid.cells)} cells x {grid.trials} trials = {total} trials, jobs={jobs}")

    rows: List[Dict] = []
    if jobs <= 1:
        for task in tasks:
            rows.append(_trial_task(task))
            if progress:
                progress(len(rows), total)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for row in pool.map(_trial_task, tasks, chunksize=max(1, total // (jobs * 8))):
                rows.append(row)
                if progress:
                    progress(len(rows), total)

    diagnostics = pd.DataFrame(rows).sort_values(["cell", "trial"], kind="stable").reset_index(drop=True)
    for column in DIAGNOSTIC_COLUMNS:
        if column not in diagnostics.columns:
            diagnostics[column] = math.nan

    failures = [
        {"status": "error", "seed": int(r["seed"]), "error": r["error"]}
        for r in diagnostics.to_dict("records")
        if r["status"] != "success"
    ]
    for failure in failures:
        logger.error(f"Trial seed={failure['seed']} failed: {failure['error']}")

    ok = diagnostics[diagnostics["status"] == "success"]
    trials = ok[TRIAL_COLUMNS].reset_index(drop=True)
    trials = trials.astype({"trial": int, "seed": int, "n_trades": int})
    cells = aggregate_cells(trials)

    logger.info(f"Sweep finished: {len(trials)} ok, {len(failures)} failed")
    return SweepResult(
        trials=trials,
        diagnostics=diagnostics[DIAGNOSTIC_COLUMNS].reset_index(drop=True),
        cells=cells,
        failures=failures,
    )
