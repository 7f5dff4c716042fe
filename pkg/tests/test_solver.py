"""Outer loop: prefix extension, candidate pricing, horizon selection."""

import numpy as np
import numpy.testing as npt
import pytest

from conftest import LinearQuadraticModel, random_lq
from horizonddp import (CandidateEvaluation, DoubleIntegratorModel,
                        SolverConfig, augment_time_penalty, backward_sweep,
                        initial_trajectory, lti_optimal_horizon,
                        optimize_trajectory, riccati_sweep,
                        select_horizon, trajectory_cost)
from horizonddp.solver import evaluate_candidates, extend_backward, rollout


def empty_prefix(model):
    return (np.zeros((0, model.dim_x)), np.zeros((0, model.dim_u)))


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(horizon_bounds=(0, 5))
    with pytest.raises(ValueError):
        SolverConfig(horizon_bounds=(6, 5))
    with pytest.raises(ValueError):
        SolverConfig(window_s=-1)
    with pytest.raises(ValueError):
        SolverConfig(alpha_backtrack=1.5)


def test_config_from_json_rejects_unknown_fields():
    cfg = SolverConfig.from_json({"window_s": 4, "horizon_bounds": [2, 9]})
    assert cfg.window_s == 4 and cfg.horizon_bounds == (2, 9)
    with pytest.raises(ValueError, match="window_size"):
        SolverConfig.from_json({"window_size": 4})


# ---------------------------------------------------------------------------
# backward extension
# ---------------------------------------------------------------------------


def test_extend_backward_inverse_dynamics(rng):
    model = random_lq(rng)
    traj = initial_trajectory(model, rng.standard_normal(model.dim_x), 6)
    prefix = extend_backward(model, traj, 4)
    assert len(prefix) == 4 and prefix.feasible
    u0 = traj.controls[0]
    # each prefix knot must step forward onto the next one
    chain = np.vstack([prefix.states, traj.states[:1]])
    for s in range(4):
        npt.assert_allclose(model.step(chain[s], u0), chain[s + 1], atol=1e-10)


def test_extend_backward_zero_length(rng):
    model = random_lq(rng)
    traj = initial_trajectory(model, rng.standard_normal(model.dim_x), 3)
    prefix = extend_backward(model, traj, 0)
    assert len(prefix) == 0 and prefix.feasible


def test_extend_backward_fixed_point_constant():
    # start at rest with zero control: constant extension is exact
    from horizonddp import CartpoleModel

    m = CartpoleModel()
    traj = initial_trajectory(m, np.zeros(4), 5)
    prefix = extend_backward(m, traj, 3)
    assert prefix.feasible
    npt.assert_allclose(prefix.states, 0.0, atol=1e-9)


def test_extend_backward_infeasible_marked():
    class NoInverse(LinearQuadraticModel):
        has_inverse_step = False

    m = NoInverse(np.eye(2) * 0.9, np.array([[0.0], [1.0]]), np.eye(2),
                  np.eye(1), np.eye(2))
    traj = initial_trajectory(m, np.array([2.0, 1.0]), 5)
    prefix = extend_backward(m, traj, 3)
    # not a fixed point, no inverse: constant-state stand-in, flagged
    assert len(prefix) == 3 and not prefix.feasible
    npt.assert_array_equal(prefix.states, np.tile(traj.states[0], (3, 1)))


# ---------------------------------------------------------------------------
# candidate pricing and selection
# ---------------------------------------------------------------------------


def test_candidate_prices_match_riccati(rng):
    # every candidate J_T equals 0.5 x_hat' P_hat[T] x_hat on LQ
    model = random_lq(rng, c_t=0.3)
    T_bar = 12
    x0 = rng.standard_normal(model.dim_x)
    traj = initial_trajectory(model, x0, T_bar)
    prefix = extend_backward(model, traj, 5)
    back = backward_sweep(model, traj, (prefix.states, prefix.controls),
                          gamma=0.0)
    cfg = SolverConfig(horizon_bounds=(1, 40), window_s=5)
    cands = evaluate_candidates(back, x0, cfg, T_bar, traj.states, prefix,
                                5, 1e9)
    aug = augment_time_penalty(model.to_lti_problem((1, 40)))
    seq = riccati_sweep(aug)
    x_hat = np.append(x0, 1.0)
    assert [c.T for c in cands] == list(range(7, 18))
    for c in cands:
        exact = 0.5 * float(x_hat @ seq[c.T] @ x_hat)
        assert c.J_T == pytest.approx(exact, abs=1e-9 * max(1.0, exact))
        assert c.admissible


def test_candidates_respect_bounds_and_window(rng):
    model = random_lq(rng)
    traj = initial_trajectory(model, rng.standard_normal(model.dim_x), 4)
    prefix = extend_backward(model, traj, 2)
    back = backward_sweep(model, traj, (prefix.states, prefix.controls),
                          gamma=0.0)
    cfg = SolverConfig(horizon_bounds=(3, 5), window_s=2)
    cands = evaluate_candidates(back, traj.states[0], cfg, 4, traj.states,
                                prefix, 2, 1e9)
    assert [c.T for c in cands] == [3, 4, 5]


def test_trust_radius_marks_far_candidates(rng):
    model = random_lq(rng)
    x0 = rng.standard_normal(model.dim_x) + 5.0
    traj = initial_trajectory(model, x0, 8)
    prefix = extend_backward(model, traj, 0)
    back = backward_sweep(model, traj, (prefix.states, prefix.controls),
                          gamma=0.0)
    cfg = SolverConfig(horizon_bounds=(1, 20), window_s=4)
    tiny = evaluate_candidates(back, x0, cfg, 8, traj.states, prefix, 4, 1e-12)
    # dx = 0 at the current horizon stays admissible, moved knots do not
    by_T = {c.T: c for c in tiny}
    assert by_T[8].admissible
    assert not by_T[4].admissible


def test_select_horizon_argmin_and_ties():
    cands = [CandidateEvaluation(T=3, t0=2, J_T=5.0, admissible=True),
             CandidateEvaluation(T=4, t0=1, J_T=4.0, admissible=True),
             CandidateEvaluation(T=5, t0=0, J_T=4.0, admissible=True)]
    assert select_horizon(cands, 5) == (4, True)  # tie -> smaller T
    cands[0] = CandidateEvaluation(T=3, t0=2, J_T=1.0, admissible=False)
    assert select_horizon(cands, 5) == (4, True)  # inadmissible skipped
    none = [CandidateEvaluation(T=3, t0=0, J_T=1.0, admissible=False)]
    assert select_horizon(none, 3) == (3, False)


# ---------------------------------------------------------------------------
# rollout
# ---------------------------------------------------------------------------


def test_rollout_alpha_zero_reproduces_nominal(rng):
    model = random_lq(rng)
    x0 = rng.standard_normal(model.dim_x)
    traj = initial_trajectory(model, x0, 6)
    back = backward_sweep(model, traj, empty_prefix(model), gamma=0.0)
    new, cost = rollout(model, back, traj.states, traj.controls, 0, 0.0, x0)
    npt.assert_allclose(new.states, traj.states, atol=1e-12)
    assert cost == pytest.approx(trajectory_cost(model, traj))


def test_rollout_flags_divergence():
    class Exploding(LinearQuadraticModel):
        def step(self, x, u):
            return 10.0 * np.asarray(x, dtype=float)

    m = Exploding(np.eye(2), np.array([[0.0], [1.0]]), np.eye(2), np.eye(1),
                  np.eye(2))
    traj_states = np.ones((12, 2))
    traj_controls = np.zeros((11, 1))
    from horizonddp.backward import BackwardResult, FeedbackPolicy

    policy = FeedbackPolicy(K=tuple(np.zeros((1, 2)) for _ in range(11)),
                            k=tuple(np.zeros(1) for _ in range(11)),
                            t0_offset=0)
    back = BackwardResult(value=(), policy=policy, gamma_used=0.0,
                          prefix_len=0, horizon=11, dj=(0.0,) * 11)
    _, cost = rollout(m, back, traj_states, traj_controls, 0, 1.0,
                      np.ones(2))
    assert cost == np.inf


# ---------------------------------------------------------------------------
# full solves
# ---------------------------------------------------------------------------


def test_lq_single_iteration_convergence():
    m = DoubleIntegratorModel(c_t=0.02, Q=0.01 * np.eye(2), Qf=10 * np.eye(2))
    aug = augment_time_penalty(m.to_lti_problem((1, 120)))
    x0 = np.array([2.0, 0.0])
    t_exact, j_exact, _ = lti_optimal_horizon(aug, np.append(x0, 1.0))
    cfg = SolverConfig(horizon_bounds=(1, 120), window_s=10)
    res = optimize_trajectory(m, initial_trajectory(m, x0, t_exact + 5), cfg)
    assert res.converged and res.iterations == 1
    assert res.t_star == t_exact
    assert res.cost == pytest.approx(j_exact, abs=1e-9 * max(1.0, j_exact))


def test_already_optimal_start_returns_one_iteration():
    m = DoubleIntegratorModel(c_t=0.02, Q=0.01 * np.eye(2), Qf=10 * np.eye(2))
    cfg = SolverConfig(horizon_bounds=(1, 120), window_s=10)
    x0 = np.array([2.0, 0.0])
    first = optimize_trajectory(m, initial_trajectory(m, x0, 60), cfg)
    again = optimize_trajectory(m, first.trajectory, cfg)
    assert again.converged and again.iterations == 1
    assert again.t_star == first.t_star
    assert again.cost == pytest.approx(first.cost, rel=1e-12)


def test_accepted_costs_monotone_on_cartpole():
    from horizonddp import CartpoleModel

    m = CartpoleModel(c_t=10.0)
    cfg = SolverConfig(horizon_bounds=(10, 400), window_s=10,
                       max_iterations=300)
    res = optimize_trajectory(m, initial_trajectory(m, np.zeros(4), 150), cfg)
    assert res.converged
    accepted = [r["j"] for r in res.trace if r["accepted"]]
    assert all(b <= a + 1e-12 for a, b in zip(accepted, accepted[1:]))
    # horizon moves stay inside the selection window
    for r in res.trace:
        for T, _, _ in r["candidates"]:
            assert abs(T - r["t_bar"]) <= cfg.window_s


def test_fixed_horizon_mode():
    m = DoubleIntegratorModel()
    cfg = SolverConfig(horizon_bounds=(20, 20), window_s=0)
    res = optimize_trajectory(m, initial_trajectory(m, np.array([1.0, 0.0]), 20),
                              cfg)
    assert res.converged and res.t_star == 20
    seq = riccati_sweep(m.to_lti_problem((1, 20)))
    x0 = np.array([1.0, 0.0])
    assert res.cost == pytest.approx(0.5 * float(x0 @ seq[20] @ x0), abs=1e-9)


def test_initial_horizon_out_of_bounds_rejected():
    m = DoubleIntegratorModel()
    cfg = SolverConfig(horizon_bounds=(5, 10), window_s=2)
    with pytest.raises(ValueError, match="bounds"):
        optimize_trajectory(m, initial_trajectory(m, np.ones(2), 20), cfg)


def test_deterministic_reruns_bitwise(rng):
    from horizonddp import CartpoleModel

    m = CartpoleModel(c_t=30.0)
    cfg = SolverConfig(horizon_bounds=(10, 400), window_s=10,
                       max_iterations=300)
    a = optimize_trajectory(m, initial_trajectory(m, np.zeros(4), 150), cfg)
    b = optimize_trajectory(m, initial_trajectory(m, np.zeros(4), 150), cfg)
    assert a.t_star == b.t_star and a.iterations == b.iterations
    npt.assert_array_equal(a.trajectory.states, b.trajectory.states)
    npt.assert_array_equal(a.trajectory.controls, b.trajectory.controls)
    assert a.cost == b.cost


def test_solution_stable_under_nearby_starts(rng):
    # property: the chosen horizon barely moves for nearby initial horizons
    m = DoubleIntegratorModel(c_t=0.02, Q=0.01 * np.eye(2), Qf=10 * np.eye(2))
    cfg = SolverConfig(horizon_bounds=(1, 120), window_s=10)
    x0 = np.array([1.5, -0.5])
    stars = []
    for t_init in (40, 60, 80):
        res = optimize_trajectory(m, initial_trajectory(m, x0, t_init), cfg)
        assert res.converged
        stars.append(res.t_star)
    assert max(stars) - min(stars) == 0
