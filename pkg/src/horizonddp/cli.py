"""Command-line driver for the benchmark experiments.

Subcommands: solve, sweep-ct, mpc, oracle, check.  Every command reads a
JSON config, writes machine-readable artifacts (CSV tables plus a JSON
summary embedding the resolved config) into --out, and uses exit codes
0 = success, 1 = usage/config error, 2 = non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .model import check_derivatives
from .models import MODEL_REGISTRY, make_model
from .mpc import MpcConfig, run_episode
from .oracle import exhaustive_horizon
from .solver import SolverConfig, optimize_trajectory, trace_csv_rows, trace_json
from .trajectory import initial_trajectory

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NONCONVERGED = 2


class ConfigError(ValueError):
    pass


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {p}: {exc}") from exc


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing config field: {key!r}")
    return cfg[key]


def _build(cfg: dict, mode: str, c_t=None):
    model_cfg = dict(_require(cfg, "model"))
    if c_t is not None:
        model_cfg["c_t"] = c_t
    model = make_model(model_cfg)
    solver_cfg = SolverConfig.from_json(cfg.get("solver", {}))
    if mode == "ddp":
        solver_cfg = replace(solver_cfg, second_order=True)
    x0 = np.asarray(_require(cfg, "x0"), dtype=float)
    if x0.size != model.dim_x:
        raise ConfigError(f"x0 has size {x0.size}, model expects {model.dim_x}")
    return model, solver_cfg, x0


def _write_csv(path: Path, rows):
    with path.open("w", newline="") as fh:
        csv.writer(fh).writerows(rows)


def _write_json(path: Path, doc):
    path.write_text(json.dumps(doc, indent=2))


def _trajectory_rows(traj, dt):
    dim_u = traj.controls.shape[1]
    header = (["t", "time"]
              + [f"x{i}" for i in range(traj.states.shape[1])]
              + [f"u{i}" for i in range(dim_u)])
    rows = [header]
    for t in range(traj.states.shape[0]):
        u = traj.controls[t] if t < traj.controls.shape[0] else [""] * dim_u
        rows.append([t, t * dt] + list(traj.states[t]) + list(u))
    return rows


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_solve(cfg: dict, out: Path, seed: int, mode: str) -> int:
    model, solver_cfg, x0 = _build(cfg, mode)
    t_init = int(cfg.get("initial_horizon",
                         sum(solver_cfg.horizon_bounds) // 2))
    initial = initial_trajectory(model, x0, t_init)
    tic = time.perf_counter()
    result = optimize_trajectory(model, initial, solver_cfg)
    wall = time.perf_counter() - tic

    dt = getattr(model, "dt", 1.0)
    _write_csv(out / "trajectory.csv", _trajectory_rows(result.trajectory, dt))
    _write_csv(out / "trace.csv", trace_csv_rows(result))
    _write_json(out / "summary.json", {
        "t_star": result.t_star,
        "cost": result.cost,
        "iterations": result.iterations,
        "converged": result.converged,
        "status": result.status,
        "wall_time_s": wall,
        "config": cfg,
        "seed": seed,
        "mode": mode,
        "trace": trace_json(result),
    })
    return EXIT_OK if result.converged else EXIT_NONCONVERGED


def cmd_sweep_ct(cfg: dict, out: Path, seed: int, mode: str) -> int:
    c_t_list = _require(cfg, "c_t_list")
    oracle_margin = int(cfg.get("oracle_margin", 25))
    rows = [("c_t", "T_ours_steps", "T_ours_seconds", "T_exact",
             "cost_ours", "cost_exact", "cost_error_pct", "converged")]
    all_ok = True
    for c_t in c_t_list:
        model, solver_cfg, x0 = _build(cfg, mode, c_t=c_t)
        dt = getattr(model, "dt", 1.0)
        t_init = int(cfg.get("initial_horizon",
                             sum(solver_cfg.horizon_bounds) // 2))
        result = optimize_trajectory(model, initial_trajectory(model, x0, t_init),
                                     solver_cfg)
        if not result.converged:
            all_ok = False
            rows.append((c_t, result.t_star, result.t_star * dt, "", result.cost,
                         "", "", 0))
            continue
        # exhaustive sweep bracketing the solver's answer; widen if the
        # argmin lands on the bracket edge
        lo_bound, hi_bound = solver_cfg.horizon_bounds
        lo = max(lo_bound, result.t_star - oracle_margin)
        hi = min(hi_bound, result.t_star + oracle_margin)
        while True:
            sweep = exhaustive_horizon(model, range(lo, hi + 1), solver_cfg, x0)
            at_edge = ((sweep.t_exact == lo and lo > lo_bound)
                       or (sweep.t_exact == hi and hi < hi_bound))
            if not at_edge:
                break
            lo = max(lo_bound, lo - oracle_margin)
            hi = min(hi_bound, hi + oracle_margin)
        err_pct = 100.0 * (result.cost - sweep.j_exact) / sweep.j_exact
        rows.append((c_t, result.t_star, result.t_star * dt, sweep.t_exact,
                     result.cost, sweep.j_exact, err_pct, 1))
    _write_csv(out / "sweep_ct.csv", rows)
    _write_json(out / "sweep_ct_summary.json", {"config": cfg, "seed": seed,
                                                "mode": mode})
    return EXIT_OK if all_ok else EXIT_NONCONVERGED


def cmd_oracle(cfg: dict, out: Path, seed: int, mode: str) -> int:
    model, solver_cfg, x0 = _build(cfg, mode)
    t_range = _require(cfg, "t_range")
    sweep = exhaustive_horizon(model, range(int(t_range[0]), int(t_range[1]) + 1),
                               solver_cfg, x0)
    _write_csv(out / "horizon_sweep.csv", sweep.csv_rows())
    _write_json(out / "oracle_summary.json", {
        "t_exact": sweep.t_exact, "j_exact": sweep.j_exact,
        "config": cfg, "seed": seed, "mode": mode,
    })
    return EXIT_OK


def cmd_mpc(cfg: dict, out: Path, seed: int, mode: str) -> int:
    model, solver_cfg, x0 = _build(cfg, mode)
    mpc_cfg = MpcConfig(
        solver=solver_cfg,
        inner_iterations=int(cfg.get("inner_iterations", 5)),
        noise_scale=float(cfg.get("noise_scale", 0.0)),
        step_limit=int(cfg.get("step_limit", 500)),
        seed=seed,
        initial_horizon=cfg.get("initial_horizon"),
    )
    t_fixed = int(cfg.get("receding_horizon", 40))

    log_opt = run_episode(model, x0, mpc_cfg, mode="optimal-horizon")
    log_rec = run_episode(model, x0, mpc_cfg, mode="receding-horizon",
                          t_fixed=t_fixed)

    def goal_distance(log):
        goal = getattr(model, "goal", None)
        if goal is None or log.final_state is None:
            return None
        goal = np.asarray(goal, dtype=float)
        return float(np.linalg.norm(log.final_state[:goal.size] - goal))

    def mean_solve_time(log):
        times = [rec.solve_time for rec in log.steps]
        return float(np.mean(times)) if times else 0.0

    for name, log in (("optimal", log_opt), ("receding", log_rec)):
        _write_csv(out / f"episode_{name}.csv", log.csv_rows())
        _write_json(out / f"episode_{name}.json", log.to_json())
    _write_json(out / "mpc_summary.json", {
        "optimal": {"terminated": log_opt.terminated,
                    "steps": log_opt.steps_used,
                    "total_cost": log_opt.total_cost,
                    "final_goal_distance": goal_distance(log_opt),
                    "mean_solve_time_s": mean_solve_time(log_opt)},
        "receding": {"terminated": log_rec.terminated,
                     "steps": log_rec.steps_used,
                     "total_cost": log_rec.total_cost,
                     "final_goal_distance": goal_distance(log_rec),
                     "mean_solve_time_s": mean_solve_time(log_rec)},
        "config": cfg, "seed": seed, "mode": mode,
    })
    return EXIT_OK


def cmd_check(cfg: dict, out: Path, seed: int, mode: str) -> int:
    model_cfg = _require(cfg, "model")
    name = model_cfg.get("model")
    if name not in MODEL_REGISTRY:
        valid = ", ".join(sorted(MODEL_REGISTRY))
        raise ConfigError(f"unknown model {name!r}; valid names: {valid}")
    model = make_model(dict(model_cfg))
    rng = np.random.default_rng(seed)
    n_samples = int(cfg.get("samples", 100))
    scale = float(cfg.get("sample_scale", 0.3))
    samples = []
    while len(samples) < n_samples:
        x = scale * rng.standard_normal(model.dim_x)
        u = model.nominal_control(x) + scale * rng.standard_normal(model.dim_u)
        if model.admissible(x):
            samples.append((x, u))
    report = check_derivatives(model, samples)
    _write_json(out / "derivative_report.json", {
        "model": name,
        "passed": report.passed,
        "tol": report.tol,
        "discrepancies": report.discrepancies,
        "failures": report.failures,
        "config": cfg, "seed": seed,
    })
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_NONCONVERGED


COMMANDS = {
    "solve": cmd_solve,
    "sweep-ct": cmd_sweep_ct,
    "mpc": cmd_mpc,
    "oracle": cmd_oracle,
    "check": cmd_check,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="horizonddp",
        description="Optimal-horizon trajectory optimization benchmarks")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--mode", choices=("ilqr", "ddp"), default="ilqr")
    args = parser.parse_args(argv)

    out = Path(args.out)
    try:
        cfg = _load_config(args.config)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out, args.seed, args.mode)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
