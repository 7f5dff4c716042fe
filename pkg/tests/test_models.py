"""Benchmark systems: fixed points, integrator accuracy, obstacle math."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from horizonddp import (CartpoleModel, DoubleIntegratorModel, Obstacle,
                        PointMassNavModel, QuadrotorModel, check_derivatives,
                        make_model, obstacle_schedule_advance, rk4_step,
                        rk4_step_with_jacobian)


# ---------------------------------------------------------------------------
# integrators
# ---------------------------------------------------------------------------


def test_rk4_fourth_order_convergence():
    # xdot = -x from x(0)=1 over 1 s: halving dt shrinks the error ~16x
    deriv = lambda x, u: -x
    errors = []
    for dt in (0.1, 0.05):
        x = np.array([1.0])
        for _ in range(round(1.0 / dt)):
            x = rk4_step(deriv, x, None, dt)
        errors.append(abs(x[0] - math.exp(-1.0)))
    assert errors[0] / errors[1] > 12.0


def test_rk4_jacobian_matches_differencing(rng):
    # nonlinear 2-state system with coupled control
    def deriv(x, u):
        return np.array([x[1] + 0.2 * math.sin(x[0]), u[0] - 0.5 * x[1]])

    def jac(x, u):
        a = np.array([[0.2 * math.cos(x[0]), 1.0], [0.0, -0.5]])
        b = np.array([[0.0], [1.0]])
        return a, b

    x = rng.standard_normal(2)
    u = rng.standard_normal(1)
    x_next, fx, fu = rk4_step_with_jacobian(deriv, jac, x, u, 0.05)
    npt.assert_allclose(x_next, rk4_step(deriv, x, u, 0.05), atol=1e-14)
    h = 1e-6
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        col = (rk4_step(deriv, x + e, u, 0.05)
               - rk4_step(deriv, x - e, u, 0.05)) / (2 * h)
        npt.assert_allclose(fx[:, i], col, atol=1e-8)
    col = (rk4_step(deriv, x, u + h, 0.05)
           - rk4_step(deriv, x, u - h, 0.05)) / (2 * h)
    npt.assert_allclose(fu[:, 0], col, atol=1e-8)


# ---------------------------------------------------------------------------
# double integrator
# ---------------------------------------------------------------------------


def test_double_integrator_exact_discrete_map():
    m = DoubleIntegratorModel(dt=0.1)
    x = np.array([1.0, -2.0])
    u = np.array([3.0])
    npt.assert_allclose(m.step(x, u), [1.0 - 0.2, -2.0 + 0.3], atol=1e-15)
    npt.assert_allclose(m.inverse_step(m.step(x, u), u), x, atol=1e-12)


def test_double_integrator_lti_bridge():
    m = DoubleIntegratorModel(dt=0.1, c_t=0.5)
    prob = m.to_lti_problem((1, 10))
    x = np.array([0.3, 0.7])
    u = np.array([-1.0])
    npt.assert_array_equal(prob.A @ x + prob.B @ u, m.step(x, u))
    assert m.running_cost(x, u) == pytest.approx(
        0.5 * float(x @ prob.Q @ x + u @ prob.R @ u) + 0.5)
    assert prob.c_t == 0.5


# ---------------------------------------------------------------------------
# cartpole
# ---------------------------------------------------------------------------


def test_cartpole_hanging_rest_is_fixed_point():
    m = CartpoleModel()
    x = np.zeros(4)
    npt.assert_allclose(m.step(x, np.zeros(1)), x, atol=1e-14)


def test_cartpole_upright_unstable():
    m = CartpoleModel()
    x = np.array([0.0, 0.0, math.pi - 1e-3, 0.0])
    for _ in range(50):
        x = m.step(x, np.zeros(1))
    assert abs(x[2] - math.pi) > 0.01  # perturbation grows


def test_cartpole_accelerations_match_hand_formula():
    m = CartpoleModel()
    x = np.array([0.1, 0.2, 0.6, -0.4])
    u = np.array([1.5])
    s, c = math.sin(0.6), math.cos(0.6)
    den = 1.0 + 0.1 * s * s
    xdd = (1.5 + 0.1 * s * (0.5 * 0.4 ** 2 + 9.81 * c)) / den
    thdd = -(xdd * c + 9.81 * s) / 0.5
    d = m._deriv(x, u)
    assert d[1] == pytest.approx(xdd)
    assert d[3] == pytest.approx(thdd)


def test_cartpole_rejects_bad_params():
    with pytest.raises(ValueError):
        CartpoleModel(dt=0.0)
    with pytest.raises(ValueError):
        CartpoleModel(pole_length=-1.0)


# ---------------------------------------------------------------------------
# quadrotor
# ---------------------------------------------------------------------------


def test_quadrotor_hover_is_fixed_point():
    m = QuadrotorModel()
    x = np.zeros(12)
    npt.assert_allclose(m.step(x, m.u_hover), x, atol=1e-12)
    npt.assert_array_equal(m.nominal_control(x), m.u_hover)


def test_quadrotor_free_fall_without_thrust():
    m = QuadrotorModel(dt=0.05)
    x = m.step(np.zeros(12), np.zeros(4))
    # level attitude, zero thrust: vertical velocity picks up -g*dt
    assert x[8] == pytest.approx(-9.81 * 0.05, rel=1e-9)


def test_quadrotor_admissible_region():
    m = QuadrotorModel()
    x = np.zeros(12)
    assert m.admissible(x)
    x[3] = 0.5 * math.pi + 0.01
    assert not m.admissible(x)


# ---------------------------------------------------------------------------
# obstacles and navigation
# ---------------------------------------------------------------------------


def test_obstacle_cost_profile():
    obs = Obstacle(center=(1.0, 2.0), radius=0.5, weight=4.0)
    assert obs.cost(np.array([1.0, 2.0])) == pytest.approx(4.0)
    assert obs.cost(np.array([1.5, 2.0])) == pytest.approx(4.0 * math.exp(-0.5))
    far = obs.cost(np.array([10.0, 2.0]))
    assert far < 1e-10


def test_obstacle_derivatives_match_differencing():
    obs = Obstacle(center=(0.3, -0.2), radius=0.8, weight=2.0)
    p = np.array([0.9, 0.4])
    c, grad, hess = obs.cost_derivatives(p)
    assert c == pytest.approx(obs.cost(p))
    h = 1e-6
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        g = (obs.cost(p + e) - obs.cost(p - e)) / (2 * h)
        assert grad[i] == pytest.approx(g, abs=1e-8)
        h2 = 1e-4  # larger step: second differences lose half the digits
        e2 = np.zeros(2)
        e2[i] = h2
        hh = (obs.cost(p + e2) - 2 * obs.cost(p) + obs.cost(p - e2)) / h2 ** 2
        assert hess[i, i] == pytest.approx(hh, abs=1e-6)


def test_obstacle_schedule_displacement():
    obs = Obstacle(center=(0.0, 0.0), radius=1.0,
                   schedule=((2.0, (1.0, 0.0)), (1.0, (0.0, -2.0))))
    npt.assert_allclose(obs.displacement(0.0), [0.0, 0.0])
    npt.assert_allclose(obs.displacement(1.0), [1.0, 0.0])
    npt.assert_allclose(obs.displacement(2.5), [2.0, -1.0])
    # motion stops after the schedule runs out
    npt.assert_allclose(obs.displacement(100.0), [2.0, -2.0])


def test_schedule_advance_hides_future_motion():
    obs = Obstacle(center=(1.0, 0.0), radius=0.5,
                   schedule=((5.0, (0.2, 0.0)),))
    m = PointMassNavModel(obstacles=(obs,))
    snap = obstacle_schedule_advance(m, 2.0)
    moved = snap.obstacles[0]
    npt.assert_allclose(moved.center, (1.4, 0.0))
    assert moved.schedule == ()  # the planner can't see where it goes next
    # the original model keeps its schedule for later snapshots
    assert m.obstacles[0].schedule != ()


def test_nav_running_cost_includes_obstacles():
    obs = Obstacle(center=(1.0, 0.0), radius=0.5, weight=3.0)
    m = PointMassNavModel(obstacles=(obs,), c_t=0.25)
    x = np.array([1.0, 0.0, 0.5, 0.0])
    u = np.zeros(2)
    expected = 0.5 * 0.05 * 0.25 + 3.0 + 0.25
    assert m.running_cost(x, u) == pytest.approx(expected)


# ---------------------------------------------------------------------------
# derivative checks and registry
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("name,builder", [
    ("double_integrator", lambda: DoubleIntegratorModel()),
    ("cartpole", lambda: CartpoleModel()),
    ("quadrotor", lambda: QuadrotorModel()),
    ("pointmass_nav", lambda: PointMassNavModel(
        obstacles=(Obstacle(center=(1.0, 1.0), radius=0.7, weight=2.0),))),
])
def test_analytic_derivatives_verified(name, builder, rng):
    m = builder()
    samples = []
    while len(samples) < 25:
        x = 0.4 * rng.standard_normal(m.dim_x)
        u = m.nominal_control(x) + 0.4 * rng.standard_normal(m.dim_u)
        if m.admissible(x):
            samples.append((x, u))
    report = check_derivatives(m, samples)
    assert report.passed, report.summary()


def test_registry_builds_models():
    m = make_model({"model": "cartpole", "c_t": 5.0, "dt": 0.01})
    assert isinstance(m, CartpoleModel)
    assert m.c_t == 5.0 and m.dt == 0.01
    nav = make_model({"model": "pointmass_nav", "obstacles": [
        {"center": [1, 2], "radius": 0.5, "weight": 2.0,
         "schedule": [[1.0, [0.1, 0.0]]]}]})
    assert nav.obstacles[0].schedule == ((1.0, (0.1, 0.0)),)


def test_registry_rejects_unknown_model():
    with pytest.raises(ValueError, match="cartpole"):
        make_model({"model": "unicycle"})
