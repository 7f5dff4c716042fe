"""Exact one-pass solution of the linear-quadratic optimal-horizon problem.

For time-invariant linear dynamics with quadratic costs the cost-to-go with
``s`` steps remaining is ``0.5 * x' P[s] x`` where P follows the discrete
Riccati recursion.  Because the recursion only depends on steps-to-go, a
single backward sweep up to the largest admissible horizon prices every
candidate horizon at once.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import sym

_SYM_TOL = 1e-10
_PSD_TOL = 1e-10


class IllPosedStepError(RuntimeError):
    """The control-weight system (R + B'PB) could not be factorized."""


def _check_symmetric(M, name):
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got {M.shape}")
    if np.max(np.abs(M - M.T)) > _SYM_TOL * max(1.0, np.max(np.abs(M))):
        raise ValueError(f"{name} must be symmetric")


def _check_psd(M, name):
    _check_symmetric(M, name)
    lam = np.linalg.eigvalsh(sym(M))
    if lam[0] < -_PSD_TOL * max(1.0, abs(lam[-1])):
        raise ValueError(f"{name} must be positive semidefinite "
                         f"(min eigenvalue {lam[0]:.3e})")


def _check_pd(M, name):
    _check_symmetric(M, name)
    lam = np.linalg.eigvalsh(sym(M))
    if lam[0] <= 0:
        raise ValueError(f"{name} must be positive definite "
                         f"(min eigenvalue {lam[0]:.3e})")


def _frozen_array(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LtiProblem:
    """LQR data with a horizon window [t_min, t_max] and a time penalty c_t."""

    A: np.ndarray
    B: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    Qf: np.ndarray
    horizon_bounds: tuple[int, int]
    c_t: float = 0.0

    def __post_init__(self):
        for name in ("A", "B", "Q", "R", "Qf"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))
        t_min, t_max = self.horizon_bounds
        object.__setattr__(self, "horizon_bounds", (int(t_min), int(t_max)))
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise ValueError("A must be square")
        if self.B.shape[0] != n:
            raise ValueError("B row count must equal the state dimension")
        _check_psd(self.Q, "Q")
        _check_psd(self.Qf, "Qf")
        _check_pd(self.R, "R")
        if not (1 <= self.horizon_bounds[0] <= self.horizon_bounds[1]):
            raise ValueError("horizon bounds must satisfy 1 <= t_min <= t_max")
        if self.c_t < 0:
            raise ValueError("c_t must be >= 0")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class RiccatiSequence:
    """Value matrices indexed by steps-to-go: P[s] with s remaining steps."""

    P: tuple

    def __getitem__(self, s: int) -> np.ndarray:
        return self.P[s]

    def __len__(self) -> int:
        return len(self.P)


def riccati_step(Pnext: np.ndarray, problem: LtiProblem) -> np.ndarray:
    """One backward step of the discrete Riccati recursion."""
    A, B, Q, R = problem.A, problem.B, problem.Q, problem.R
    Pnext = sym(np.asarray(Pnext, dtype=float))
    BtP = B.T @ Pnext
    M = sym(R + BtP @ B)
    try:
        cho = scipy.linalg.cho_factor(M)
    except scipy.linalg.LinAlgError as exc:
        lam = np.linalg.eigvalsh(M)
        raise IllPosedStepError(
            f"ill-posed step: R + B'PB not positive definite "
            f"(eigenvalues in [{lam[0]:.3e}, {lam[-1]:.3e}])") from exc
    BtPA = BtP @ A
    P = A.T @ Pnext @ A - BtPA.T @ scipy.linalg.cho_solve(cho, BtPA) + Q
    return sym(P)


# Riccati sweeps are pure functions of the (immutable) problem, so the
# sequence is computed once per problem instance and shared across queries.
_sweep_cache: "weakref.WeakKeyDictionary[LtiProblem, RiccatiSequence]" = (
    weakref.WeakKeyDictionary())


def riccati_sweep(problem: LtiProblem) -> RiccatiSequence:
    """Backward sweep from P[0] = Qf up to t_max steps-to-go."""
    cached = _sweep_cache.get(problem)
    if cached is not None:
        return cached
    P = [sym(problem.Qf)]
    for s in range(1, problem.horizon_bounds[1] + 1):
        try:
            P.append(riccati_step(P[-1], problem))
        except IllPosedStepError as exc:
            raise IllPosedStepError(f"at steps-to-go {s}: {exc}") from exc
    seq = RiccatiSequence(P=tuple(_frozen_array(p) for p in P))
    _sweep_cache[problem] = seq
    return seq


def augment_time_penalty(problem: LtiProblem, c_t: float | None = None) -> LtiProblem:
    """Fold a constant per-step cost into the LQR data via state augmentation.

    The augmented state is (x; 1); the extra coordinate is preserved by the
    dynamics and charged c_t per step through the running cost.
    """
    if c_t is None:
        c_t = problem.c_t
    if c_t < 0:
        raise ValueError("c_t must be >= 0")
    n, m = problem.n, problem.m
    A_hat = np.zeros((n + 1, n + 1))
    A_hat[:n, :n] = problem.A
    A_hat[n, n] = 1.0
    B_hat = np.vstack([problem.B, np.zeros((1, m))])
    Q_hat = np.zeros((n + 1, n + 1))
    Q_hat[:n, :n] = problem.Q
    Q_hat[n, n] = 2.0 * c_t  # cost is 0.5 x'Qx, so the constant term needs 2c_t
    Qf_hat = np.zeros((n + 1, n + 1))
    Qf_hat[:n, :n] = problem.Qf
    return LtiProblem(A=A_hat, B=B_hat, Q=Q_hat, R=problem.R, Qf=Qf_hat,
                      horizon_bounds=problem.horizon_bounds, c_t=0.0)


def lti_optimal_horizon(problem: LtiProblem, x0: np.ndarray):
    """Minimize 0.5 x0' P[T] x0 over the horizon window.

    Returns (T_star, J_star, curve) with curve a list of (T, J) pairs;
    ties break toward the smaller horizon.
    """
    x0 = np.asarray(x0, dtype=float)
    seq = riccati_sweep(problem)
    t_min, t_max = problem.horizon_bounds
    curve = [(T, 0.5 * float(x0 @ seq[T] @ x0)) for T in range(t_min, t_max + 1)]
    t_star, j_star = curve[0]
    for T, J in curve[1:]:
        if J < j_star:
            t_star, j_star = T, J
    return t_star, j_star, curve


def lqr_gain(Pnext: np.ndarray, problem: LtiProblem) -> np.ndarray:
    """Feedback gain K with u = -K x for the given next-step value matrix."""
    A, B, R = problem.A, problem.B, problem.R
    BtP = B.T @ sym(np.asarray(Pnext, dtype=float))
    M = sym(R + BtP @ B)
    return scipy.linalg.cho_solve(scipy.linalg.cho_factor(M), BtP @ A)


def lqr_rollout_cost(problem: LtiProblem, x0: np.ndarray, T: int) -> float:
    """Cost of rolling out the LQR feedback law for T steps from x0."""
    seq = riccati_sweep(problem)
    x = np.asarray(x0, dtype=float)
    total = 0.0
    for t in range(T):
        K = lqr_gain(seq[T - t - 1], problem)
        u = -K @ x
        total += 0.5 * float(x @ problem.Q @ x + u @ problem.R @ u)
        x = problem.A @ x + problem.B @ u
    total += 0.5 * float(x @ problem.Qf @ x)
    return total


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def lti_to_json(problem: LtiProblem) -> dict:
    """Serialize to a plain dict with row-major matrix arrays."""
    return {
        "n": problem.n,
        "m": problem.m,
        "t_min": problem.horizon_bounds[0],
        "t_max": problem.horizon_bounds[1],
        "c_t": problem.c_t,
        "A": problem.A.flatten().tolist(),
        "B": problem.B.flatten().tolist(),
        "Q": problem.Q.flatten().tolist(),
        "R": problem.R.flatten().tolist(),
        "Qf": problem.Qf.flatten().tolist(),
    }


def lti_from_json(doc: dict) -> LtiProblem:
    """Inverse of :func:`lti_to_json`."""
    n = int(doc["n"])
    m = int(doc["m"])

    def mat(key, rows, cols):
        return np.asarray(doc[key], dtype=float).reshape(rows, cols)

    return LtiProblem(
        A=mat("A", n, n), B=mat("B", n, m), Q=mat("Q", n, n),
        R=mat("R", m, m), Qf=mat("Qf", n, n),
        horizon_bounds=(int(doc["t_min"]), int(doc["t_max"])),
        c_t=float(doc.get("c_t", 0.0)),
    )
