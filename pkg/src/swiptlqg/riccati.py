"""Riccati-type operators and fixed-point solvers.

The modified algebraic Riccati equation (MARE) for the control side is

    S = A'SA + W - eta * A'SB (B'SB + U)^-1 B'SA

and the estimation side is its dual with (A', C', Q, R, gamma).  The operator
split used throughout is h_hat(X) = A'XA + W with g_hat the packet-scaled
correction, so that the composition h_hat(g_hat(S)) is exactly the MARE map;
likewise h_tilde(X) = AXA' + Q and g_tilde give the intermittent-observation
covariance recursion.  (The correction operators carry no extra A factors;
those belong to h_hat/h_tilde.)

Fixed points are reached by plain value iteration: convergence is declared on
a max-norm increment below ``tol``, divergence on the trace exceeding
``div_threshold`` — which is exactly the sub-critical-probability signature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._backend import (
    STATUS_CONVERGED,
    STATUS_DIVERGED,
    STATUS_SINGULAR,
    kernels,
)
from .model import PlantModel

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
DEFAULT_DIV_THRESHOLD = 1e12


class SingularInnovation(np.linalg.LinAlgError):
    """C X C' + R numerically singular (invalid R)."""


class SingularInner(np.linalg.LinAlgError):
    """B' X B + U numerically singular (invalid U)."""


class MaxIterExceeded(RuntimeError):
    """Neither convergence nor divergence within the iteration budget."""

    def __init__(self, what: str, iterations: int, residual: float, value: np.ndarray):
        super().__init__(
            f"{what}: no decision after {iterations} iterations "
            f"(last increment {residual:.3g})"
        )
        self.iterations = iterations
        self.residual = residual
        self.value = value


@dataclass(frozen=True)
class FixedPointResult:
    """Outcome of a fixed-point iteration.

    ``converged`` and ``diverged`` are mutually exclusive; ``residual`` is the
    max-norm of the last increment.
    """

    value: np.ndarray
    iterations: int
    converged: bool
    diverged: bool
    residual: float


def op_h_tilde(X: np.ndarray, plant: PlantModel) -> np.ndarray:
    """A X A' + Q."""
    Y = plant.A @ X @ plant.A.T
    return 0.5 * (Y + Y.T) + plant.Q


def op_h_hat(X: np.ndarray, plant: PlantModel) -> np.ndarray:
    """A' X A + W."""
    Y = plant.A.T @ X @ plant.A
    return 0.5 * (Y + Y.T) + plant.W


def op_g_tilde(gamma: float, X: np.ndarray, plant: PlantModel) -> np.ndarray:
    """X - gamma * XC' (CXC' + R)^-1 CX  (identity at gamma = 0)."""
    XC = X @ plant.C.T
    inner = plant.C @ XC + plant.R
    try:
        sol = scipy.linalg.solve(inner, XC.T, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularInnovation("C X C' + R is numerically singular") from exc
    Y = X - gamma * (XC @ sol)
    return 0.5 * (Y + Y.T)


def op_g_hat(eta: float, X: np.ndarray, plant: PlantModel) -> np.ndarray:
    """X - eta * XB (B'XB + U)^-1 B'X  (identity at eta = 0)."""
    XB = X @ plant.B
    inner = plant.B.T @ XB + plant.U
    try:
        sol = scipy.linalg.solve(inner, XB.T, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularInner("B' X B + U is numerically singular") from exc
    Y = X - eta * (XB @ sol)
    return 0.5 * (Y + Y.T)


def _run_mare(F, G, Wt, Ut, prob, init, tol, max_iter, div_threshold, what):
    value, iterations, status, residual = kernels.mare_fixed_point(
        np.ascontiguousarray(F, dtype=float),
        np.ascontiguousarray(G, dtype=float),
        np.ascontiguousarray(Wt, dtype=float),
        np.ascontiguousarray(Ut, dtype=float),
        float(prob),
        np.ascontiguousarray(init, dtype=float),
        float(tol),
        int(max_iter),
        float(div_threshold),
    )
    if status == STATUS_SINGULAR:
        if what == "control MARE":
            raise SingularInner(f"{what}: inner matrix singular")
        raise SingularInnovation(f"{what}: innovation matrix singular")
    if status not in (STATUS_CONVERGED, STATUS_DIVERGED):
        raise MaxIterExceeded(what, iterations, residual, value)
    return FixedPointResult(
        value=value,
        iterations=iterations,
        converged=status == STATUS_CONVERGED,
        diverged=status == STATUS_DIVERGED,
        residual=residual,
    )


def solve_control_mare(
    plant: PlantModel,
    eta: float,
    init: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    div_threshold: float = DEFAULT_DIV_THRESHOLD,
) -> FixedPointResult:
    """Solve S = A'SA + W - eta A'SB(B'SB+U)^-1 B'SA by value iteration.

    Starts from ``init`` (default W, the terminal condition of the backward
    recursion).  A diverged result signals eta <= eta_c.  Raises
    MaxIterExceeded when undecided.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    init = plant.W if init is None else init
    return _run_mare(
        plant.A, plant.B, plant.W, plant.U, eta, init,
        tol, max_iter, div_threshold, "control MARE",
    )


def solve_estimation_mare(
    plant: PlantModel,
    gamma: float,
    init: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    div_threshold: float = DEFAULT_DIV_THRESHOLD,
) -> FixedPointResult:
    """Solve the prior-covariance MARE

        P = A P A' + Q - gamma A P C'(C P C' + R)^-1 C P A'

    by value iteration from ``init`` (default P0).  This is the dual of the
    control MARE with (A', C', Q, R, gamma); divergence signals
    gamma <= gamma_max.  The filtered fixed point is ``op_g_tilde(gamma, P)``
    (see ``filtered_covariance``).
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    init = plant.P0 if init is None else init
    return _run_mare(
        plant.A.T, plant.C.T, plant.Q, plant.R, gamma, init,
        tol, max_iter, div_threshold, "estimation MARE",
    )


def filtered_covariance(plant: PlantModel, gamma: float, p_bar: np.ndarray) -> np.ndarray:
    """Filtered steady covariance P~ = g_tilde(P-), the fixed point of
    g_tilde(h_tilde(.)) when P- solves the estimation MARE."""
    return op_g_tilde(gamma, p_bar, plant)


def solve_lower_bound_lyapunov(
    plant: PlantModel,
    gamma: float,
    init: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    div_threshold: float = DEFAULT_DIV_THRESHOLD,
) -> FixedPointResult:
    """Fixed point of P <- (1 - gamma) A P A' + Q.

    Diverges exactly when (1 - gamma) * max|eig(A)|^2 >= 1, i.e. at the p_min
    bound of the critical observation probability.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    init = plant.P0 if init is None else init
    value, iterations, status, residual = kernels.scaled_lyapunov_fixed_point(
        np.ascontiguousarray(plant.A, dtype=float),
        np.ascontiguousarray(plant.Q, dtype=float),
        float(1.0 - gamma),
        np.ascontiguousarray(init, dtype=float),
        float(tol),
        int(max_iter),
        float(div_threshold),
    )
    if status not in (STATUS_CONVERGED, STATUS_DIVERGED):
        raise MaxIterExceeded("lower-bound Lyapunov", iterations, residual, value)
    return FixedPointResult(
        value=value,
        iterations=iterations,
        converged=status == STATUS_CONVERGED,
        diverged=status == STATUS_DIVERGED,
        residual=residual,
    )
