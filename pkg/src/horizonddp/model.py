"""System-model contract shared by every solver.

A model is a discrete-time map ``x' = step(x, u)`` together with a running
cost and a terminal cost.  Solvers only consume local quadratic expansions
of all three, built from analytic derivatives when the model provides them
and from central finite differences otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Finite-difference step sizes (relative, floored).  First derivatives use
# h = max(1e-6, 1e-6*|coord|); second derivatives h = max(1e-4, 1e-4*|coord|).
FD_STEP_FIRST = 1e-6
FD_STEP_SECOND = 1e-4

DERIVATIVE_CHECK_TOL = 1e-4


class ExpansionError(RuntimeError):
    """A cost or dynamics evaluation became non-finite during expansion."""


class InverseStepError(RuntimeError):
    """Newton iteration for the dynamics preimage failed to converge."""


def sym(M: np.ndarray) -> np.ndarray:
    """Symmetrize a square matrix."""
    return 0.5 * (M + M.T)


class SystemModel:
    """Discrete-time system with running and terminal cost.

    Subclasses must set ``dim_x``/``dim_u`` and implement :meth:`step`,
    :meth:`running_cost` and :meth:`terminal_cost`.  Analytic derivatives
    are optional; expansions fall back to central finite differences.
    Models are immutable after construction and safe to share.
    """

    dim_x: int
    dim_u: int

    #: whether the dynamics map can be inverted (exactly or by Newton)
    has_inverse_step: bool = False

    # -- required interface -------------------------------------------------

    def step(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def running_cost(self, x: np.ndarray, u: np.ndarray) -> float:
        raise NotImplementedError

    def terminal_cost(self, x: np.ndarray) -> float:
        raise NotImplementedError

    # -- optional analytic derivatives (return None to use differencing) ----

    def dynamics_jacobians(self, x, u):
        """Return (f_x, f_u) or None."""
        return None

    def running_cost_derivatives(self, x, u):
        """Return (l_x, l_u, l_xx, l_ux, l_uu) or None."""
        return None

    def terminal_cost_derivatives(self, x):
        """Return (phi_x, phi_xx) or None."""
        return None

    # -- optional hooks ------------------------------------------------------

    def admissible(self, x) -> bool:
        return bool(np.all(np.isfinite(x)))

    def nominal_control(self, x) -> np.ndarray:
        """Control used to seed initial trajectories (zero unless overridden)."""
        return np.zeros(self.dim_u)

    def inverse_step(self, x_next: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Solve ``step(x, u) = x_next`` for x by damped Newton iteration.

        Only meaningful when ``has_inverse_step`` is set; models with an
        exact inverse should override.  Raises :class:`InverseStepError`
        on divergence.
        """
        x = np.array(x_next, dtype=float)
        target = np.asarray(x_next, dtype=float)
        res = self.step(x, u) - target
        for _ in range(50):
            if np.linalg.norm(res, ord=np.inf) <= 1e-10:
                return x
            fx, _ = _dynamics_jacobians_any(self, x, u)
            try:
                delta = np.linalg.solve(fx, res)
            except np.linalg.LinAlgError as exc:
                raise InverseStepError("singular Jacobian in preimage Newton") from exc
            # damped update: halve the step until the residual shrinks
            scale = 1.0
            norm0 = np.linalg.norm(res)
            while scale >= 1e-4:
                x_try = x - scale * delta
                res_try = self.step(x_try, u) - target
                if np.all(np.isfinite(res_try)) and np.linalg.norm(res_try) < norm0:
                    x, res = x_try, res_try
                    break
                scale *= 0.5
            else:
                raise InverseStepError("preimage Newton stalled")
        if np.linalg.norm(res, ord=np.inf) <= 1e-10:
            return x
        raise InverseStepError("preimage Newton did not converge in 50 iterations")


@dataclass(frozen=True)
class CostExpansion:
    """Quadratic running-cost model at a nominal pair."""

    l: float
    l_x: np.ndarray
    l_u: np.ndarray
    l_xx: np.ndarray
    l_ux: np.ndarray
    l_uu: np.ndarray


@dataclass(frozen=True)
class DynamicsExpansion:
    """Local dynamics model: value, Jacobians, optional second-order tensors.

    Tensor index convention: ``f_xx[i, j, k] = d2 f_i / dx_j dx_k``,
    ``f_ux[i, j, k] = d2 f_i / du_j dx_k``, ``f_uu[i, j, k] = d2 f_i / du_j du_k``.
    """

    f0: np.ndarray | None  # next state; may be omitted when only the
    f_x: np.ndarray         # derivatives are needed
    f_u: np.ndarray
    f_xx: np.ndarray | None = None
    f_ux: np.ndarray | None = None
    f_uu: np.ndarray | None = None


# ---------------------------------------------------------------------------
# finite differencing
# ---------------------------------------------------------------------------


def _h_first(v: np.ndarray) -> np.ndarray:
    return np.maximum(FD_STEP_FIRST, FD_STEP_FIRST * np.abs(v))


def _h_second(v: np.ndarray) -> np.ndarray:
    return np.maximum(FD_STEP_SECOND, FD_STEP_SECOND * np.abs(v))


def _require_finite(value, what: str):
    if not np.all(np.isfinite(value)):
        raise ExpansionError(f"non-finite value while evaluating {what}")
    return value


def _fd_gradient(fun, v, what):
    """Central-difference gradient of a scalar function of a vector."""
    v = np.asarray(v, dtype=float)
    h = _h_first(v)
    g = np.zeros(v.size)
    for i in range(v.size):
        e = np.zeros(v.size)
        e[i] = h[i]
        fp = _require_finite(fun(v + e), f"{what} at +e_{i}")
        fm = _require_finite(fun(v - e), f"{what} at -e_{i}")
        g[i] = (fp - fm) / (2.0 * h[i])
    return g


def _fd_jacobian(fun, v, what):
    """Central-difference Jacobian of a vector function of a vector."""
    v = np.asarray(v, dtype=float)
    h = _h_first(v)
    cols = []
    for i in range(v.size):
        e = np.zeros(v.size)
        e[i] = h[i]
        fp = _require_finite(np.asarray(fun(v + e), dtype=float), f"{what} at +e_{i}")
        fm = _require_finite(np.asarray(fun(v - e), dtype=float), f"{what} at -e_{i}")
        cols.append((fp - fm) / (2.0 * h[i]))
    return np.stack(cols, axis=-1)


def _fd_hessian(fun, v, what):
    """Central-difference Hessian of a scalar function of a vector."""
    v = np.asarray(v, dtype=float)
    n = v.size
    h = _h_second(v)
    f0 = _require_finite(fun(v), f"{what} at nominal")
    H = np.zeros((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        fpp = _require_finite(fun(v + ei), f"{what} at +e_{i}")
        fmm = _require_finite(fun(v - ei), f"{what} at -e_{i}")
        H[i, i] = (fpp - 2.0 * f0 + fmm) / (h[i] ** 2)
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h[j]
            fpq = _require_finite(fun(v + ei + ej), f"{what} at +e_{i}+e_{j}")
            fpm = _require_finite(fun(v + ei - ej), f"{what} at +e_{i}-e_{j}")
            fmp = _require_finite(fun(v - ei + ej), f"{what} at -e_{i}+e_{j}")
            fmn = _require_finite(fun(v - ei - ej), f"{what} at -e_{i}-e_{j}")
            H[i, j] = H[j, i] = (fpq - fpm - fmp + fmn) / (4.0 * h[i] * h[j])
    return H


def _fd_cost_derivatives(model: SystemModel, x, u):
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    n, m = x.size, u.size
    z = np.concatenate([x, u])

    def cost_z(zz):
        return model.running_cost(zz[:n], zz[n:])

    g = _fd_gradient(cost_z, z, "running_cost")
    H = _fd_hessian(cost_z, z, "running_cost")
    l_x, l_u = g[:n], g[n:]
    l_xx = sym(H[:n, :n])
    l_uu = sym(H[n:, n:])
    l_ux = H[n:, :n]
    return l_x, l_u, l_xx, l_ux, l_uu


def _fd_dynamics_jacobians(model: SystemModel, x, u):
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    f_x = _fd_jacobian(lambda v: model.step(v, u), x, "step wrt x")
    f_u = _fd_jacobian(lambda v: model.step(x, v), u, "step wrt u")
    return f_x, f_u


def _fd_terminal_derivatives(model: SystemModel, x):
    x = np.asarray(x, dtype=float)
    phi_x = _fd_gradient(model.terminal_cost, x, "terminal_cost")
    phi_xx = sym(_fd_hessian(model.terminal_cost, x, "terminal_cost"))
    return phi_x, phi_xx


def _dynamics_jacobians_any(model: SystemModel, x, u):
    jac = model.dynamics_jacobians(x, u)
    if jac is None:
        return _fd_dynamics_jacobians(model, x, u)
    f_x, f_u = jac
    return np.asarray(f_x, dtype=float), np.asarray(f_u, dtype=float)


# ---------------------------------------------------------------------------
# expansions
# ---------------------------------------------------------------------------


def expand_cost(model: SystemModel, x, u) -> CostExpansion:
    """Quadratic expansion of the running cost at (x, u)."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    l = float(_require_finite(model.running_cost(x, u), "running_cost at nominal"))
    analytic = model.running_cost_derivatives(x, u)
    if analytic is not None:
        l_x, l_u, l_xx, l_ux, l_uu = (np.asarray(a, dtype=float) for a in analytic)
    else:
        l_x, l_u, l_xx, l_ux, l_uu = _fd_cost_derivatives(model, x, u)
    return CostExpansion(l=l, l_x=l_x, l_u=l_u, l_xx=sym(l_xx), l_ux=l_ux,
                         l_uu=sym(l_uu))


def expand_dynamics(model: SystemModel, x, u,
                    want_second_order: bool = False) -> DynamicsExpansion:
    """Expansion of the dynamics at (x, u).

    Second-order tensors are computed only on request (iLQR mode leaves
    them absent); they are differenced from the Jacobians.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    f0 = _require_finite(np.asarray(model.step(x, u), dtype=float), "step at nominal")
    f_x, f_u = _dynamics_jacobians_any(model, x, u)
    f_xx = f_ux = f_uu = None
    if want_second_order:
        f_xx, f_ux, f_uu = _dynamics_second_order(model, x, u)
    return DynamicsExpansion(f0=f0, f_x=f_x, f_u=f_u, f_xx=f_xx, f_ux=f_ux,
                             f_uu=f_uu)


def _dynamics_second_order(model: SystemModel, x, u):
    """Second-order tensors via central differences of the Jacobians."""
    n, m = x.size, u.size
    hx = _h_second(x)
    hu = _h_second(u)
    f_xx = np.zeros((n, n, n))
    f_ux = np.zeros((n, m, n))
    f_uu = np.zeros((n, m, m))
    for k in range(n):
        e = np.zeros(n)
        e[k] = hx[k]
        fx_p, fu_p = _dynamics_jacobians_any(model, x + e, u)
        fx_m, fu_m = _dynamics_jacobians_any(model, x - e, u)
        f_xx[:, :, k] = (fx_p - fx_m) / (2.0 * hx[k])
        f_ux[:, :, k] = (fu_p - fu_m) / (2.0 * hx[k])
    for k in range(m):
        e = np.zeros(m)
        e[k] = hu[k]
        _, fu_p = _dynamics_jacobians_any(model, x, u + e)
        _, fu_m = _dynamics_jacobians_any(model, x, u - e)
        f_uu[:, :, k] = (fu_p - fu_m) / (2.0 * hu[k])
    # enforce symmetry of the Hessian slices
    f_xx = 0.5 * (f_xx + f_xx.transpose(0, 2, 1))
    f_uu = 0.5 * (f_uu + f_uu.transpose(0, 2, 1))
    return f_xx, f_ux, f_uu


def expand_terminal(model: SystemModel, x):
    """Terminal-cost expansion: (phi, phi_x, phi_xx)."""
    x = np.asarray(x, dtype=float)
    phi = float(_require_finite(model.terminal_cost(x), "terminal_cost at nominal"))
    analytic = model.terminal_cost_derivatives(x)
    if analytic is not None:
        phi_x, phi_xx = (np.asarray(a, dtype=float) for a in analytic)
    else:
        phi_x, phi_xx = _fd_terminal_derivatives(model, x)
    return phi, phi_x, sym(phi_xx)


# ---------------------------------------------------------------------------
# time penalty wrapper
# ---------------------------------------------------------------------------


class _TimePenaltyModel(SystemModel):
    """Wraps a model so the running cost gains a constant per-step term."""

    def __init__(self, base: SystemModel, c_t: float):
        self.base = base
        self.c_t = float(c_t)
        self.dim_x = base.dim_x
        self.dim_u = base.dim_u
        self.has_inverse_step = base.has_inverse_step

    def step(self, x, u):
        return self.base.step(x, u)

    def running_cost(self, x, u):
        return self.base.running_cost(x, u) + self.c_t

    def terminal_cost(self, x):
        return self.base.terminal_cost(x)

    def dynamics_jacobians(self, x, u):
        return self.base.dynamics_jacobians(x, u)

    def running_cost_derivatives(self, x, u):
        return self.base.running_cost_derivatives(x, u)

    def terminal_cost_derivatives(self, x):
        return self.base.terminal_cost_derivatives(x)

    def admissible(self, x):
        return self.base.admissible(x)

    def nominal_control(self, x):
        return self.base.nominal_control(x)

    def inverse_step(self, x_next, u):
        return self.base.inverse_step(x_next, u)


def with_time_penalty(model: SystemModel, c_t: float) -> SystemModel:
    """Return a model whose running cost is ``l(x, u) + c_t``."""
    if c_t < 0:
        raise ValueError("c_t must be >= 0")
    return _TimePenaltyModel(model, c_t)


# ---------------------------------------------------------------------------
# derivative checking
# ---------------------------------------------------------------------------


@dataclass
class DerivativeReport:
    """Max relative discrepancy between analytic and differenced derivatives."""

    discrepancies: dict
    tol: float
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = []
        for name, value in sorted(self.discrepancies.items()):
            mark = "ok" if value <= self.tol else "FAIL"
            lines.append(f"{name:8s} {value:10.3e}  {mark}")
        return "\n".join(lines)


def _rel_err(analytic, numeric):
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    scale = max(1.0, float(np.max(np.abs(analytic))))
    return float(np.max(np.abs(analytic - numeric))) / scale


def check_derivatives(model: SystemModel, samples,
                      tol: float = DERIVATIVE_CHECK_TOL) -> DerivativeReport:
    """Cross-check every analytic derivative the model provides against
    central finite differences over the given (x, u) samples."""
    worst: dict = {}

    def record(name, err):
        worst[name] = max(worst.get(name, 0.0), err)

    for x, u in samples:
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        jac = model.dynamics_jacobians(x, u)
        if jac is not None:
            fd_fx, fd_fu = _fd_dynamics_jacobians(model, x, u)
            record("f_x", _rel_err(jac[0], fd_fx))
            record("f_u", _rel_err(jac[1], fd_fu))
        cost = model.running_cost_derivatives(x, u)
        if cost is not None:
            fd = _fd_cost_derivatives(model, x, u)
            for name, a, b in zip(("l_x", "l_u", "l_xx", "l_ux", "l_uu"), cost, fd):
                record(name, _rel_err(a, b))
        term = model.terminal_cost_derivatives(x)
        if term is not None:
            fd_px, fd_pxx = _fd_terminal_derivatives(model, x)
            record("phi_x", _rel_err(term[0], fd_px))
            record("phi_xx", _rel_err(term[1], fd_pxx))

    failures = [name for name, value in worst.items() if value > tol]
    return DerivativeReport(discrepancies=worst, tol=tol, failures=sorted(failures))
