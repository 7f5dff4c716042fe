"""Nominal trajectories and objective evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SystemModel

CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class Trajectory:
    """Nominal state sequence x_0..x_T and control sequence u_0..u_{T-1}."""

    states: np.ndarray    # (T+1, dim_x)
    controls: np.ndarray  # (T, dim_u)

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        controls = np.asarray(self.controls, dtype=float)
        if states.ndim != 2 or controls.ndim != 2:
            raise ValueError("states and controls must be 2-D arrays")
        if states.shape[0] != controls.shape[0] + 1:
            raise ValueError("states must have exactly one more row than controls")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "controls", controls)

    @property
    def horizon(self) -> int:
        return self.controls.shape[0]

    def consistency_error(self, model: SystemModel) -> float:
        """Max dynamics defect ||x_{t+1} - f(x_t, u_t)||_inf along the path."""
        worst = 0.0
        for t in range(self.horizon):
            defect = self.states[t + 1] - model.step(self.states[t], self.controls[t])
            worst = max(worst, float(np.max(np.abs(defect))))
        return worst

    def assert_consistent(self, model: SystemModel, tol: float = CONSISTENCY_TOL):
        err = self.consistency_error(model)
        if err > tol:
            raise ValueError(f"trajectory dynamically inconsistent: defect {err:.3e}")


def rollout_controls(model: SystemModel, x0: np.ndarray,
                     controls: np.ndarray) -> Trajectory:
    """Simulate an open-loop control sequence from x0."""
    controls = np.atleast_2d(np.asarray(controls, dtype=float))
    states = np.zeros((controls.shape[0] + 1, model.dim_x))
    states[0] = np.asarray(x0, dtype=float)
    for t in range(controls.shape[0]):
        states[t + 1] = model.step(states[t], controls[t])
    return Trajectory(states=states, controls=controls)


def initial_trajectory(model: SystemModel, x0: np.ndarray, T: int) -> Trajectory:
    """Default nominal: the model's nominal control held for T steps."""
    x0 = np.asarray(x0, dtype=float)
    controls = np.tile(model.nominal_control(x0), (int(T), 1))
    return rollout_controls(model, x0, controls)


def trajectory_cost(model: SystemModel, traj: Trajectory) -> float:
    """Objective sum(l) + Phi along the trajectory."""
    total = 0.0
    for t in range(traj.horizon):
        total += model.running_cost(traj.states[t], traj.controls[t])
    total += model.terminal_cost(traj.states[-1])
    return float(total)
