"""Backward sweep: quadratic value expansions and feedback-gain extraction.

Sweeps run from the terminal step of the nominal trajectory down through an
optional prefix of negative-time knots, so every candidate horizon in the
selection window has a value expansion and gains available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import (DynamicsExpansion, SystemModel, expand_cost,
                    expand_dynamics, expand_terminal, sym)
from .trajectory import Trajectory


class NeedsRegularization(RuntimeError):
    """Quu factorization failed; carries the estimated smallest eigenvalue."""

    def __init__(self, lambda_min: float):
        super().__init__(f"needs regularization (lambda_min ~ {lambda_min:.3e})")
        self.lambda_min = lambda_min


class BackwardSweepError(RuntimeError):
    """Factorization kept failing after exhausting the gamma schedule."""


@dataclass(frozen=True)
class ValueExpansion:
    """Quadratic value model around a nominal state."""

    V_xx: np.ndarray
    V_x: np.ndarray
    V_0: float

    def evaluate(self, dx: np.ndarray) -> float:
        dx = np.asarray(dx, dtype=float)
        return float(0.5 * dx @ self.V_xx @ dx + self.V_x @ dx + self.V_0)


@dataclass(frozen=True)
class QExpansion:
    Q_xx: np.ndarray
    Q_ux: np.ndarray
    Q_uu: np.ndarray
    Q_x: np.ndarray
    Q_u: np.ndarray
    Q_0: float


@dataclass(frozen=True)
class FeedbackPolicy:
    """Time-indexed affine policy; index g = t + t0_offset into K/k."""

    K: tuple
    k: tuple
    t0_offset: int

    def gains(self, t: int):
        return self.K[t + self.t0_offset], self.k[t + self.t0_offset]


@dataclass(frozen=True)
class BackwardResult:
    """Sweep output over t in [-prefix_len, T]; index g = t + prefix_len."""

    value: tuple         # ValueExpansion per swept time, length prefix_len+T+1
    policy: FeedbackPolicy
    gamma_used: float
    prefix_len: int
    horizon: int
    dj: tuple            # per-step model-predicted cost change at alpha = 1

    def value_at(self, t: int) -> ValueExpansion:
        return self.value[t + self.prefix_len]

    def expected_improvement(self, t0: int = 0) -> float:
        """Model-predicted cost change of applying (K, k) at alpha = 1."""
        return float(sum(self.dj[t0 + self.prefix_len:]))

    def max_feedforward(self, t0: int = 0) -> float:
        """Largest ||k_t||_inf over the policy from t0 onward."""
        worst = 0.0
        for g in range(t0 + self.prefix_len, len(self.policy.k)):
            worst = max(worst, float(np.max(np.abs(self.policy.k[g]))))
        return worst


def q_expansion(cost, dyn, nxt: ValueExpansion,
                second_order: bool = False) -> QExpansion:
    """Bellman-backup quadratic model of one step plus the next value."""
    fx, fu = dyn.f_x, dyn.f_u
    Vxx, Vx = nxt.V_xx, nxt.V_x
    Q_xx = cost.l_xx + fx.T @ Vxx @ fx
    Q_ux = cost.l_ux + fu.T @ Vxx @ fx
    Q_uu = cost.l_uu + fu.T @ Vxx @ fu
    Q_x = cost.l_x + fx.T @ Vx
    Q_u = cost.l_u + fu.T @ Vx
    Q_0 = cost.l + nxt.V_0
    if second_order and dyn.f_xx is not None:
        Q_xx = Q_xx + np.tensordot(Vx, dyn.f_xx, axes=1)
        Q_ux = Q_ux + np.tensordot(Vx, dyn.f_ux, axes=1)
        Q_uu = Q_uu + np.tensordot(Vx, dyn.f_uu, axes=1)
    return QExpansion(Q_xx=sym(Q_xx), Q_ux=Q_ux, Q_uu=sym(Q_uu),
                      Q_x=Q_x, Q_u=Q_u, Q_0=float(Q_0))


def _min_eig(M: np.ndarray) -> float:
    # closed forms for the common tiny control dimensions
    if M.shape[0] == 1:
        return float(M[0, 0])
    if M.shape[0] == 2:
        half_tr = 0.5 * (M[0, 0] + M[1, 1])
        disc = (0.5 * (M[0, 0] - M[1, 1])) ** 2 + M[0, 1] * M[1, 0]
        return float(half_tr - np.sqrt(max(disc, 0.0)))
    return float(np.linalg.eigvalsh(M)[0])


def regularize(q: QExpansion, gamma: float) -> QExpansion:
    """Lift the smallest eigenvalue of Q_uu to at least gamma."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    lam_min = _min_eig(q.Q_uu)
    shift = max(0.0, gamma - lam_min)
    if shift == 0.0:
        return q
    Q_uu = q.Q_uu + shift * np.eye(q.Q_uu.shape[0])
    return QExpansion(Q_xx=q.Q_xx, Q_ux=q.Q_ux, Q_uu=Q_uu,
                      Q_x=q.Q_x, Q_u=q.Q_u, Q_0=q.Q_0)


def value_recurrence(q: QExpansion):
    """Minimize the Q model over the control to get (value, K, k)."""
    try:
        L = np.linalg.cholesky(q.Q_uu)
    except np.linalg.LinAlgError:
        raise NeedsRegularization(_min_eig(q.Q_uu)) from None
    rhs = np.column_stack([q.Q_ux, q.Q_u])
    sol = scipy.linalg.cho_solve((L, True), rhs, check_finite=False)
    K, k = -sol[:, :-1], -sol[:, -1]
    V_xx = sym(q.Q_xx + q.Q_ux.T @ K)           # Q_xx - Q_ux' Quu^-1 Q_ux
    V_x = q.Q_x + q.Q_ux.T @ k                  # Q_x - Q_ux' Quu^-1 Q_u
    V_0 = q.Q_0 + 0.5 * float(q.Q_u @ k)        # Q_0 - 0.5 Q_u' Quu^-1 Q_u
    return ValueExpansion(V_xx=V_xx, V_x=V_x, V_0=V_0), K, k


def _sweep_once(model: SystemModel, pairs, terminal_state, gamma, second_order):
    phi, phi_x, phi_xx = expand_terminal(model, terminal_state)
    value = [ValueExpansion(V_xx=phi_xx, V_x=phi_x, V_0=phi)]
    Ks, ks, djs = [], [], []
    for x, u in reversed(pairs):
        cost = expand_cost(model, x, u)
        # the sweep only needs Jacobians (and tensors in second-order mode);
        # skip the extra dynamics evaluation when the model provides them
        jac = None if second_order else model.dynamics_jacobians(x, u)
        if jac is None:
            dyn = expand_dynamics(model, x, u, want_second_order=second_order)
        else:
            dyn = DynamicsExpansion(f0=None,
                                    f_x=np.asarray(jac[0], dtype=float),
                                    f_u=np.asarray(jac[1], dtype=float))
        q = regularize(q_expansion(cost, dyn, value[-1], second_order), gamma)
        v, K, k = value_recurrence(q)
        # a diverging recursion only gets worse; escalate gamma right away
        if not np.isfinite(v.V_0) or np.max(np.abs(v.V_xx)) > 1e12:
            raise NeedsRegularization(_min_eig(q.Q_uu))
        value.append(v)
        Ks.append(K)
        ks.append(k)
        djs.append(float(k @ q.Q_u + 0.5 * k @ q.Q_uu @ k))
    value.reverse()
    Ks.reverse()
    ks.reverse()
    djs.reverse()
    return value, Ks, ks, djs


def backward_sweep(model: SystemModel, traj: Trajectory, prefix,
                   gamma: float = 1e-6, gamma_max: float = 1e6,
                   second_order: bool = False) -> BackwardResult:
    """Value expansions and gains for t from the terminal step down to -S.

    ``prefix`` is a (states, controls) pair of negative-time knots ordered
    t = -S..-1 (both may be empty).  On factorization failure gamma is
    escalated tenfold until it exceeds gamma_max.
    """
    pre_states, pre_controls = prefix
    pre_states = np.asarray(pre_states, dtype=float).reshape(-1, model.dim_x)
    pre_controls = np.asarray(pre_controls, dtype=float).reshape(-1, model.dim_u)
    if pre_states.shape[0] != pre_controls.shape[0]:
        raise ValueError("prefix states and controls must have equal length")
    pairs = ([(pre_states[i], pre_controls[i]) for i in range(pre_states.shape[0])]
             + [(traj.states[t], traj.controls[t]) for t in range(traj.horizon)])

    g = float(gamma)
    while True:
        try:
            value, Ks, ks, djs = _sweep_once(model, pairs, traj.states[-1],
                                             g, second_order)
            break
        except NeedsRegularization:
            g *= 10.0
            if g > gamma_max:
                raise BackwardSweepError(
                    f"backward sweep failed up to gamma = {gamma_max:g}") from None

    prefix_len = pre_states.shape[0]
    return BackwardResult(
        value=tuple(value),
        policy=FeedbackPolicy(K=tuple(Ks), k=tuple(ks), t0_offset=prefix_len),
        gamma_used=g,
        prefix_len=prefix_len,
        horizon=traj.horizon,
        dj=tuple(djs),
    )
