"""Brute-force exhaustive fixed-horizon baseline.

Running fixed-horizon DDP for every candidate horizon certifies the
optimal horizon; the optimal-horizon solver is compared against this
lower envelope in the benchmarks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import SystemModel
from .solver import SolverConfig, optimize_trajectory
from .trajectory import Trajectory, initial_trajectory


@dataclass(frozen=True)
class HorizonRecord:
    T: int
    J: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class HorizonSweepResult:
    """Per-horizon table with the argmin over converged entries."""

    records: tuple
    t_exact: int
    j_exact: float

    def csv_rows(self):
        rows = [("T", "J", "iterations", "converged")]
        for rec in self.records:
            rows.append((rec.T, rec.J, rec.iterations, int(rec.converged)))
        return rows


def fixed_horizon_ddp(model: SystemModel, T: int, cfg: SolverConfig,
                      x0=None, initial: Trajectory | None = None):
    """DDP with horizon selection disabled: S = 0 and bounds (T, T)."""
    if T < 1:
        raise ValueError("T must be >= 1")
    fixed_cfg = replace(cfg, window_s=0, horizon_bounds=(T, T))
    if initial is None:
        if x0 is None:
            raise ValueError("either x0 or an initial trajectory is required")
        initial = initial_trajectory(model, x0, T)
    result = optimize_trajectory(model, initial, fixed_cfg)
    return result.trajectory, result.cost, result


def exhaustive_horizon(model: SystemModel, t_range, cfg: SolverConfig,
                       x0) -> HorizonSweepResult:
    """fixed_horizon_ddp per T; argmin over converged entries, ties toward
    the smaller horizon.  Each solve is cold-started for independence."""
    t_values = sorted(set(int(t) for t in t_range))
    if not t_values:
        raise ValueError("non-empty horizon range required")
    records = []
    for T in t_values:
        _, J, result = fixed_horizon_ddp(model, T, cfg, x0=x0)
        records.append(HorizonRecord(T=T, J=J, iterations=result.iterations,
                                     converged=result.converged))
    usable = [r for r in records if r.converged]
    if not usable:
        raise RuntimeError("no fixed-horizon solve converged in the given range")
    best = min(usable, key=lambda r: (r.J, r.T))
    return HorizonSweepResult(records=tuple(records), t_exact=best.T,
                              j_exact=best.J)
