"""Benchmark systems: double integrator, cartpole, quadrotor, point-mass nav.

Cartpole and quadrotor integrate their continuous equations of motion with
fixed-step RK4; the two double-integrator variants use the exact discrete
map.  Every model carries its own cost weights and per-step time penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lti import LtiProblem
from .model import SystemModel, sym

GRAVITY = 9.81


# ---------------------------------------------------------------------------
# RK4 with Jacobian propagation
# ---------------------------------------------------------------------------


def rk4_step(deriv, x, u, dt):
    """Classic fixed-step RK4 for xdot = deriv(x, u)."""
    k1 = deriv(x, u)
    k2 = deriv(x + 0.5 * dt * k1, u)
    k3 = deriv(x + 0.5 * dt * k2, u)
    k4 = deriv(x + dt * k3, u)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step_with_jacobian(deriv, jac, x, u, dt):
    """RK4 step plus the exact Jacobians of the discrete map.

    ``jac(x, u)`` must return the continuous-time (df/dx, df/du); the
    discrete Jacobians follow by chain rule through the four stages.
    """
    n = x.size
    eye = np.eye(n)

    k1 = deriv(x, u)
    x2 = x + 0.5 * dt * k1
    k2 = deriv(x2, u)
    x3 = x + 0.5 * dt * k2
    k3 = deriv(x3, u)
    x4 = x + dt * k3
    k4 = deriv(x4, u)

    a1, b1 = jac(x, u)
    a2, b2 = jac(x2, u)
    a3, b3 = jac(x3, u)
    a4, b4 = jac(x4, u)

    K1x, K1u = a1, b1
    K2x = a2 @ (eye + 0.5 * dt * K1x)
    K2u = b2 + a2 @ (0.5 * dt * K1u)
    K3x = a3 @ (eye + 0.5 * dt * K2x)
    K3u = b3 + a3 @ (0.5 * dt * K2u)
    K4x = a4 @ (eye + dt * K3x)
    K4u = b4 + a4 @ (dt * K3u)

    x_next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    f_x = eye + (dt / 6.0) * (K1x + 2.0 * K2x + 2.0 * K3x + K4x)
    f_u = (dt / 6.0) * (K1u + 2.0 * K2u + 2.0 * K3u + K4u)
    return x_next, f_x, f_u


# ---------------------------------------------------------------------------
# double integrator
# ---------------------------------------------------------------------------


class DoubleIntegratorModel(SystemModel):
    """1-D double integrator with quadratic costs; exactly an LTI problem."""

    has_inverse_step = True

    def __init__(self, dt=0.1, Q=None, R=None, Qf=None, c_t=0.0):
        if dt <= 0:
            raise ValueError("dt must be > 0")
        self.dt = float(dt)
        self.Q = sym(np.asarray(Q if Q is not None else np.eye(2), dtype=float))
        self.R = sym(np.asarray(R if R is not None else np.eye(1), dtype=float))
        self.Qf = sym(np.asarray(Qf if Qf is not None else np.eye(2), dtype=float))
        self.c_t = float(c_t)
        self.dim_x = 2
        self.dim_u = 1
        self.A = np.array([[1.0, self.dt], [0.0, 1.0]])
        self.B = np.array([[0.0], [self.dt]])

    def step(self, x, u):
        return self.A @ np.asarray(x, dtype=float) + self.B @ np.asarray(u, dtype=float)

    def running_cost(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        return 0.5 * float(x @ self.Q @ x + u @ self.R @ u) + self.c_t

    def terminal_cost(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * float(x @ self.Qf @ x)

    def dynamics_jacobians(self, x, u):
        return self.A, self.B

    def running_cost_derivatives(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        return (self.Q @ x, self.R @ u, self.Q,
                np.zeros((self.dim_u, self.dim_x)), self.R)

    def terminal_cost_derivatives(self, x):
        x = np.asarray(x, dtype=float)
        return self.Qf @ x, self.Qf

    def inverse_step(self, x_next, u):
        return np.linalg.solve(self.A, np.asarray(x_next, dtype=float)
                               - self.B @ np.asarray(u, dtype=float))

    def to_lti_problem(self, horizon_bounds) -> LtiProblem:
        return LtiProblem(A=self.A, B=self.B, Q=self.Q, R=self.R, Qf=self.Qf,
                          horizon_bounds=horizon_bounds, c_t=self.c_t)

    @classmethod
    def from_config(cls, cfg: dict) -> "DoubleIntegratorModel":
        return cls(dt=cfg.get("dt", 0.1),
                   Q=np.asarray(cfg["Q"], dtype=float) if "Q" in cfg else None,
                   R=np.asarray(cfg["R"], dtype=float) if "R" in cfg else None,
                   Qf=np.asarray(cfg["Qf"], dtype=float) if "Qf" in cfg else None,
                   c_t=cfg.get("c_t", 0.0))


# ---------------------------------------------------------------------------
# cartpole
# ---------------------------------------------------------------------------


class CartpoleModel(SystemModel):
    """Cart with a hanging pole; force on the cart is the only control.

    State (x, xdot, theta, thetadot) with theta = 0 hanging down and
    theta = pi upright.  The swing-up task penalizes cart and pole speed
    while running, arrival angle/velocities at the end, and time via c_t.
    """

    has_inverse_step = True  # RK4 map inverted by Newton for small dt

    def __init__(self, cart_mass=1.0, pole_mass=0.1, pole_length=0.5,
                 gravity=GRAVITY, dt=0.02, w_xdot=0.1, w_thetadot=0.1,
                 w_u=0.01, wf_theta=10000.0, wf_xdot=2500.0, wf_thetadot=2500.0,
                 c_t=0.0):
        if min(cart_mass, pole_mass, pole_length, dt) <= 0:
            raise ValueError("masses, length and dt must be > 0")
        self.mc = float(cart_mass)
        self.mp = float(pole_mass)
        self.length = float(pole_length)
        self.gravity = float(gravity)
        self.dt = float(dt)
        self.w_xdot = float(w_xdot)
        self.w_thetadot = float(w_thetadot)
        self.w_u = float(w_u)
        self.wf_theta = float(wf_theta)
        self.wf_xdot = float(wf_xdot)
        self.wf_thetadot = float(wf_thetadot)
        self.c_t = float(c_t)
        self.dim_x = 4
        self.dim_u = 1

    # equations of motion in manipulator form, solved for the accelerations
    def _deriv(self, x, u):
        _, xdot, theta, thetadot = x
        force = float(u[0])
        s, c = math.sin(theta), math.cos(theta)
        den = self.mc + self.mp * s * s
        xddot = (force + self.mp * s * (self.length * thetadot ** 2
                                        + self.gravity * c)) / den
        thddot = -(xddot * c + self.gravity * s) / self.length
        return np.array([xdot, xddot, thetadot, thddot])

    def _deriv_jacobians(self, x, u):
        _, xdot, theta, thetadot = x
        force = float(u[0])
        s, c = math.sin(theta), math.cos(theta)
        g, l, mp = self.gravity, self.length, self.mp
        den = self.mc + mp * s * s
        num = force + mp * s * (l * thetadot ** 2 + g * c)
        xddot = num / den

        dnum_dth = mp * (c * l * thetadot ** 2 + g * (c * c - s * s))
        dden_dth = 2.0 * mp * s * c
        dxdd_dth = (dnum_dth * den - num * dden_dth) / (den * den)
        dxdd_dtd = 2.0 * mp * l * thetadot * s / den
        dxdd_du = 1.0 / den

        dtdd_dth = -(dxdd_dth * c - xddot * s + g * c) / l
        dtdd_dtd = -(dxdd_dtd * c) / l
        dtdd_du = -(dxdd_du * c) / l

        fx = np.zeros((4, 4))
        fx[0, 1] = 1.0
        fx[1, 2] = dxdd_dth
        fx[1, 3] = dxdd_dtd
        fx[2, 3] = 1.0
        fx[3, 2] = dtdd_dth
        fx[3, 3] = dtdd_dtd
        fu = np.array([[0.0], [dxdd_du], [0.0], [dtdd_du]])
        return fx, fu

    def step(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        out = rk4_step(self._deriv, x, u, self.dt)
        if not np.all(np.isfinite(out)):
            raise FloatingPointError("cartpole state became non-finite")
        return out

    def dynamics_jacobians(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        _, fx, fu = rk4_step_with_jacobian(self._deriv, self._deriv_jacobians,
                                           x, u, self.dt)
        return fx, fu

    def running_cost(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        return (0.5 * (self.w_xdot * x[1] ** 2 + self.w_thetadot * x[3] ** 2
                       + self.w_u * float(u @ u)) + self.c_t)

    def terminal_cost(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (self.wf_theta * (x[2] - math.pi) ** 2
                      + self.wf_xdot * x[1] ** 2
                      + self.wf_thetadot * x[3] ** 2)

    def running_cost_derivatives(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        l_x = np.array([0.0, self.w_xdot * x[1], 0.0, self.w_thetadot * x[3]])
        l_xx = np.diag([0.0, self.w_xdot, 0.0, self.w_thetadot])
        l_u = self.w_u * u
        l_uu = self.w_u * np.eye(1)
        return l_x, l_u, l_xx, np.zeros((1, 4)), l_uu

    def terminal_cost_derivatives(self, x):
        x = np.asarray(x, dtype=float)
        phi_x = np.array([0.0, self.wf_xdot * x[1],
                          self.wf_theta * (x[2] - math.pi),
                          self.wf_thetadot * x[3]])
        phi_xx = np.diag([0.0, self.wf_xdot, self.wf_theta, self.wf_thetadot])
        return phi_x, phi_xx

    @classmethod
    def from_config(cls, cfg: dict) -> "CartpoleModel":
        keys = ("cart_mass", "pole_mass", "pole_length", "gravity", "dt",
                "w_xdot", "w_thetadot", "w_u", "wf_theta", "wf_xdot",
                "wf_thetadot", "c_t")
        return cls(**{k: cfg[k] for k in keys if k in cfg})


# ---------------------------------------------------------------------------
# quadrotor
# ---------------------------------------------------------------------------


class QuadrotorModel(SystemModel):
    """Euler-angle rigid-body quadrotor: 12 states, 4 controls.

    State: position (3), attitude roll/pitch/yaw (3), world-frame linear
    velocity (3), body angular rates (3).  Controls: total thrust plus the
    three body torques.  Hovering level at thrust m*g is a fixed point.
    The admissible region keeps |roll|, |pitch| < pi/2.
    """

    has_inverse_step = True

    def __init__(self, mass=1.0, inertia=(0.01, 0.01, 0.02), gravity=GRAVITY,
                 dt=0.05, goal=None, w_pos=1.0, w_att=1.0, w_vel=0.1,
                 w_rate=0.1, w_thrust=0.5, w_torque=5.0, wf=500.0, c_t=0.0):
        self.mass = float(mass)
        self.inertia = np.asarray(inertia, dtype=float)
        self.gravity = float(gravity)
        self.dt = float(dt)
        self.goal = (np.zeros(12) if goal is None
                     else np.asarray(goal, dtype=float))
        self.dim_x = 12
        self.dim_u = 4
        self.c_t = float(c_t)
        # 0.5 * weighted quadratic deviation from the goal state and from hover
        self.Q = np.diag([w_pos] * 3 + [w_att] * 3 + [w_vel] * 3 + [w_rate] * 3)
        self.R = np.diag([w_thrust] + [w_torque] * 3)
        self.Qf = wf * np.eye(12)
        self.u_hover = np.array([self.mass * self.gravity, 0.0, 0.0, 0.0])

    def _deriv(self, x, u):
        phi, th, psi = x[3], x[4], x[5]
        vel = x[6:9]
        p, q, r = x[9], x[10], x[11]
        thrust, tx, ty, tz = u
        jx, jy, jz = self.inertia

        sph, cph = math.sin(phi), math.cos(phi)
        sth, cth = math.sin(th), math.cos(th)
        sps, cps = math.sin(psi), math.cos(psi)
        tth = sth / cth

        acc = np.array([
            (thrust / self.mass) * (cph * sth * cps + sph * sps),
            (thrust / self.mass) * (cph * sth * sps - sph * cps),
            (thrust / self.mass) * (cph * cth) - self.gravity,
        ])
        euler_rates = np.array([
            p + (q * sph + r * cph) * tth,
            q * cph - r * sph,
            (q * sph + r * cph) / cth,
        ])
        body_acc = np.array([
            ((jy - jz) * q * r + tx) / jx,
            ((jz - jx) * p * r + ty) / jy,
            ((jx - jy) * p * q + tz) / jz,
        ])
        return np.concatenate([vel, euler_rates, acc, body_acc])

    def _deriv_jacobians(self, x, u):
        phi, th, psi = x[3], x[4], x[5]
        p, q, r = x[9], x[10], x[11]
        thrust = u[0]
        jx, jy, jz = self.inertia
        m = self.mass

        sph, cph = math.sin(phi), math.cos(phi)
        sth, cth = math.sin(th), math.cos(th)
        sps, cps = math.sin(psi), math.cos(psi)
        tth = sth / cth
        sec2 = 1.0 / (cth * cth)

        fx = np.zeros((12, 12))
        fu = np.zeros((12, 4))

        # position rates
        fx[0:3, 6:9] = np.eye(3)

        # Euler-angle rates
        fx[3, 3] = (q * cph - r * sph) * tth
        fx[3, 4] = (q * sph + r * cph) * sec2
        fx[3, 9] = 1.0
        fx[3, 10] = sph * tth
        fx[3, 11] = cph * tth
        fx[4, 3] = -q * sph - r * cph
        fx[4, 10] = cph
        fx[4, 11] = -sph
        fx[5, 3] = (q * cph - r * sph) / cth
        fx[5, 4] = (q * sph + r * cph) * sth * sec2
        fx[5, 10] = sph / cth
        fx[5, 11] = cph / cth

        # linear acceleration
        k = thrust / m
        fx[6, 3] = k * (-sph * sth * cps + cph * sps)
        fx[6, 4] = k * (cph * cth * cps)
        fx[6, 5] = k * (-cph * sth * sps + sph * cps)
        fx[7, 3] = k * (-sph * sth * sps - cph * cps)
        fx[7, 4] = k * (cph * cth * sps)
        fx[7, 5] = k * (cph * sth * cps + sph * sps)
        fx[8, 3] = k * (-sph * cth)
        fx[8, 4] = k * (-cph * sth)
        fu[6, 0] = (cph * sth * cps + sph * sps) / m
        fu[7, 0] = (cph * sth * sps - sph * cps) / m
        fu[8, 0] = (cph * cth) / m

        # angular acceleration
        fx[9, 10] = (jy - jz) * r / jx
        fx[9, 11] = (jy - jz) * q / jx
        fx[10, 9] = (jz - jx) * r / jy
        fx[10, 11] = (jz - jx) * p / jy
        fx[11, 9] = (jx - jy) * q / jz
        fx[11, 10] = (jx - jy) * p / jz
        fu[9, 1] = 1.0 / jx
        fu[10, 2] = 1.0 / jy
        fu[11, 3] = 1.0 / jz

        return fx, fu

    def step(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        out = rk4_step(self._deriv, x, u, self.dt)
        if not np.all(np.isfinite(out)):
            raise FloatingPointError("quadrotor state became non-finite")
        return out

    def dynamics_jacobians(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        _, fx, fu = rk4_step_with_jacobian(self._deriv, self._deriv_jacobians,
                                           x, u, self.dt)
        return fx, fu

    def running_cost(self, x, u):
        dx = np.asarray(x, dtype=float) - self.goal
        du = np.asarray(u, dtype=float) - self.u_hover
        return 0.5 * float(dx @ self.Q @ dx + du @ self.R @ du) + self.c_t

    def terminal_cost(self, x):
        dx = np.asarray(x, dtype=float) - self.goal
        return 0.5 * float(dx @ self.Qf @ dx)

    def running_cost_derivatives(self, x, u):
        dx = np.asarray(x, dtype=float) - self.goal
        du = np.asarray(u, dtype=float) - self.u_hover
        return (self.Q @ dx, self.R @ du, self.Q,
                np.zeros((4, 12)), self.R)

    def terminal_cost_derivatives(self, x):
        dx = np.asarray(x, dtype=float) - self.goal
        return self.Qf @ dx, self.Qf

    def admissible(self, x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(np.isfinite(x))
                    and abs(x[3]) < 0.5 * math.pi and abs(x[4]) < 0.5 * math.pi)

    def nominal_control(self, x):
        return self.u_hover.copy()

    @classmethod
    def from_config(cls, cfg: dict) -> "QuadrotorModel":
        keys = ("mass", "inertia", "gravity", "dt", "goal", "w_pos", "w_att",
                "w_vel", "w_rate", "w_thrust", "w_torque", "wf", "c_t")
        return cls(**{k: cfg[k] for k in keys if k in cfg})


# ---------------------------------------------------------------------------
# point-mass navigation
# ---------------------------------------------------------------------------


_EYE2 = np.eye(2)
_EYE2.setflags(write=False)


@dataclass(frozen=True)
class Obstacle:
    """Circular soft obstacle with Gaussian cost and an optional motion
    schedule (piecewise-constant velocity segments unknown to the planner)."""

    center: tuple
    radius: float
    weight: float = 1.0
    schedule: tuple = ()  # sequence of (duration, (vx, vy)) segments

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("obstacle radius must be > 0")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(
            self, "schedule",
            tuple((float(d), (float(v[0]), float(v[1]))) for d, v in self.schedule))

    def displacement(self, sim_time: float) -> np.ndarray:
        """Integrated schedule motion from t=0 to sim_time (zero afterwards)."""
        remaining = float(sim_time)
        disp = np.zeros(2)
        for duration, vel in self.schedule:
            dt = min(remaining, duration)
            if dt <= 0:
                break
            disp += dt * np.asarray(vel)
            remaining -= dt
        return disp

    def cost(self, pos: np.ndarray) -> float:
        d2 = float(np.sum((pos - np.asarray(self.center)) ** 2))
        return self.weight * math.exp(-d2 / (2.0 * self.radius ** 2))

    def cost_derivatives(self, pos: np.ndarray):
        delta = pos - np.asarray(self.center)
        r2 = self.radius ** 2
        c = self.weight * math.exp(-float(delta @ delta) / (2.0 * r2))
        grad = -(c / r2) * delta
        hess = (c / (r2 * r2)) * np.outer(delta, delta) - (c / r2) * _EYE2
        return c, grad, hess


class PointMassNavModel(SystemModel):
    """Planar double integrator steering to a goal through soft obstacles."""

    has_inverse_step = True

    def __init__(self, dt=0.1, goal=(8.0, 0.0), w_u=0.5, w_vel=0.05,
                 wf_pos=50.0, wf_vel=50.0, obstacles=(), c_t=0.0,
                 arena_scale=10.0):
        self.dt = float(dt)
        self.goal = np.asarray(goal, dtype=float)
        self.w_u = float(w_u)
        self.w_vel = float(w_vel)
        self.wf_pos = float(wf_pos)
        self.wf_vel = float(wf_vel)
        self.obstacles = tuple(obstacles)
        self.c_t = float(c_t)
        self.arena_scale = float(arena_scale)
        self.dim_x = 4
        self.dim_u = 2
        dt_ = self.dt
        self.A = np.array([[1.0, 0.0, dt_, 0.0],
                           [0.0, 1.0, 0.0, dt_],
                           [0.0, 0.0, 1.0, 0.0],
                           [0.0, 0.0, 0.0, 1.0]])
        self.B = np.array([[0.0, 0.0], [0.0, 0.0], [dt_, 0.0], [0.0, dt_]])
        # hot-path constants for the cost expansion
        self._l_xx_base = np.diag([0.0, 0.0, self.w_vel, self.w_vel])
        self._l_ux = np.zeros((2, 4))
        self._l_uu = self.w_u * np.eye(2)
        for M in (self._l_xx_base, self._l_ux, self._l_uu):
            M.setflags(write=False)

    def step(self, x, u):
        return self.A @ np.asarray(x, dtype=float) + self.B @ np.asarray(u, dtype=float)

    def dynamics_jacobians(self, x, u):
        return self.A, self.B

    def running_cost(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        total = 0.5 * (self.w_u * float(u @ u) + self.w_vel * float(x[2:] @ x[2:]))
        for obs in self.obstacles:
            total += obs.cost(x[:2])
        return total + self.c_t

    def terminal_cost(self, x):
        x = np.asarray(x, dtype=float)
        dp = x[:2] - self.goal
        return 0.5 * (self.wf_pos * float(dp @ dp)
                      + self.wf_vel * float(x[2:] @ x[2:]))

    def running_cost_derivatives(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        l_x = np.concatenate([np.zeros(2), self.w_vel * x[2:]])
        l_xx = self._l_xx_base
        if self.obstacles:
            l_xx = l_xx.copy()
            for obs in self.obstacles:
                _, grad, hess = obs.cost_derivatives(x[:2])
                l_x[:2] += grad
                l_xx[:2, :2] += hess
        return l_x, self.w_u * u, l_xx, self._l_ux, self._l_uu

    def terminal_cost_derivatives(self, x):
        x = np.asarray(x, dtype=float)
        phi_x = np.concatenate([self.wf_pos * (x[:2] - self.goal),
                                self.wf_vel * x[2:]])
        phi_xx = np.diag([self.wf_pos, self.wf_pos, self.wf_vel, self.wf_vel])
        return phi_x, phi_xx

    def inverse_step(self, x_next, u):
        return np.linalg.solve(self.A, np.asarray(x_next, dtype=float)
                               - self.B @ np.asarray(u, dtype=float))

    def with_obstacles(self, obstacles) -> "PointMassNavModel":
        out = PointMassNavModel(dt=self.dt, goal=self.goal, w_u=self.w_u,
                                w_vel=self.w_vel, wf_pos=self.wf_pos,
                                wf_vel=self.wf_vel, obstacles=obstacles,
                                c_t=self.c_t, arena_scale=self.arena_scale)
        return out

    @classmethod
    def from_config(cls, cfg: dict) -> "PointMassNavModel":
        obstacles = tuple(
            Obstacle(center=tuple(o["center"]), radius=o["radius"],
                     weight=o.get("weight", 1.0),
                     schedule=tuple((seg[0], tuple(seg[1]))
                                    for seg in o.get("schedule", ())))
            for o in cfg.get("obstacles", ()))
        keys = ("dt", "goal", "w_u", "w_vel", "wf_pos", "wf_vel", "c_t",
                "arena_scale")
        return cls(obstacles=obstacles, **{k: cfg[k] for k in keys if k in cfg})


def obstacle_schedule_advance(model: PointMassNavModel,
                              sim_time: float) -> PointMassNavModel:
    """Snapshot of the navigation model with obstacles moved to sim_time.

    The returned snapshot is what the plant (and the planner, blindly)
    sees at that instant; schedules are kept for later advancement but the
    planner never consults them.
    """
    if sim_time < 0:
        raise ValueError("sim_time must be >= 0")
    moved = tuple(
        Obstacle(center=tuple(np.asarray(o.center) + o.displacement(sim_time)),
                 radius=o.radius, weight=o.weight, schedule=())
        for o in model.obstacles)
    return model.with_obstacles(moved)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


MODEL_REGISTRY = {
    "double_integrator": DoubleIntegratorModel,
    "cartpole": CartpoleModel,
    "quadrotor": QuadrotorModel,
    "pointmass_nav": PointMassNavModel,
}


def make_model(config: dict) -> SystemModel:
    """Build a benchmark model from a JSON-style config document."""
    name = config.get("model")
    if name not in MODEL_REGISTRY:
        valid = ", ".join(sorted(MODEL_REGISTRY))
        raise ValueError(f"unknown model {name!r}; valid names: {valid}")
    params = {k: v for k, v in config.items() if k != "model"}
    return MODEL_REGISTRY[name].from_config(params)
