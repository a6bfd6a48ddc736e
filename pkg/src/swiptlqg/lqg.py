"""Finite-horizon TCP-like LQG machinery.

Backward value-matrix/gain recursion for a known control-packet arrival
probability, the Kalman filter with intermittent observations (the sender
learns within the step whether its packet arrived, so the predict step uses
the realized packet bit), and the optimal-cost assembly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import PlantModel
from .riccati import SingularInnovation


@dataclass(frozen=True)
class GainSchedule:
    """Backward-pass output: S_seq[k] = S_k for k = 0..N (S_N = W) and
    L_seq[k] the control gain applied at step k, for k = 0..N-1."""

    S_seq: list[np.ndarray]
    L_seq: list[np.ndarray]
    eta: float

    @property
    def horizon(self) -> int:
        return len(self.L_seq)


@dataclass(frozen=True)
class FilterState:
    x_hat: np.ndarray
    P: np.ndarray
    x_hat_prior: np.ndarray
    P_prior: np.ndarray


def stage_gain(plant: PlantModel, S_next: np.ndarray) -> np.ndarray:
    """L = -(B'SB + U)^-1 B'SA for the value matrix S of the next step."""
    SB = S_next @ plant.B
    inner = plant.B.T @ SB + plant.U
    return -scipy.linalg.solve(inner, SB.T @ plant.A, assume_a="pos")


def backward_gain_pass(plant: PlantModel, eta: float, N: int) -> GainSchedule:
    """Backward recursion of the value matrices S_k and gains L_k.

    S_N = W;  S_k = A'S_{k+1}A + W - eta A'S_{k+1}B(B'S_{k+1}B+U)^-1 B'S_{k+1}A.
    The schedule depends on eta only through the probability, never on a
    packet realization.
    """
    if N < 1:
        raise ValueError(f"horizon must be >= 1, got {N}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    S_seq = [None] * (N + 1)
    L_seq = [None] * N
    S_seq[N] = plant.W.copy()
    for k in range(N - 1, -1, -1):
        S_next = S_seq[k + 1]
        L_seq[k] = stage_gain(plant, S_next)
        SA = S_next @ plant.A
        SB = S_next @ plant.B
        inner = plant.B.T @ SB + plant.U
        corr = SA.T @ plant.B @ scipy.linalg.solve(inner, SB.T @ plant.A, assume_a="pos")
        S = plant.A.T @ SA + plant.W - eta * corr
        S_seq[k] = 0.5 * (S + S.T)
    return GainSchedule(S_seq=S_seq, L_seq=L_seq, eta=eta)


def filter_predict(
    state: FilterState, plant: PlantModel, u_applied: np.ndarray, eta_k: int
) -> FilterState:
    """Time update with TCP acknowledgment: the realized control-packet bit
    eta_k gates the B u term in the prior mean."""
    u = np.asarray(u_applied, dtype=float).reshape(-1)
    x_prior = plant.A @ state.x_hat + (plant.B @ u if eta_k else 0.0)
    P_prior = plant.A @ state.P @ plant.A.T
    P_prior = 0.5 * (P_prior + P_prior.T) + plant.Q
    return FilterState(
        x_hat=state.x_hat, P=state.P, x_hat_prior=x_prior, P_prior=P_prior
    )


def filter_update(
    state: FilterState,
    plant: PlantModel,
    y: np.ndarray | None,
    gamma_k: int,
    joseph: bool = False,
) -> FilterState:
    """Measurement update; with gamma_k = 0 the posterior is the prior.

    The gain is the standard innovation-form K = P-C'(CP-C'+R)^-1.  The
    Joseph-form covariance update is available behind ``joseph`` for extra
    numerical robustness (default off).
    """
    if not gamma_k:
        return FilterState(
            x_hat=state.x_hat_prior,
            P=state.P_prior,
            x_hat_prior=state.x_hat_prior,
            P_prior=state.P_prior,
        )
    if y is None:
        raise ValueError("measurement required when gamma_k = 1")
    y = np.asarray(y, dtype=float).reshape(-1)
    CP = plant.C @ state.P_prior
    innov_cov = CP @ plant.C.T + plant.R
    try:
        K = scipy.linalg.solve(innov_cov, CP, assume_a="pos").T
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularInnovation("C P- C' + R is numerically singular") from exc
    x_hat = state.x_hat_prior + K @ (y - plant.C @ state.x_hat_prior)
    if joseph:
        IKC = np.eye(plant.n) - K @ plant.C
        P = IKC @ state.P_prior @ IKC.T + K @ plant.R @ K.T
    else:
        P = state.P_prior - K @ CP
    P = 0.5 * (P + P.T)
    return FilterState(
        x_hat=x_hat, P=P, x_hat_prior=state.x_hat_prior, P_prior=state.P_prior
    )


def expected_cost_formula(
    plant: PlantModel,
    schedule: GainSchedule,
    P_seq: list[np.ndarray],
    P0: np.ndarray | None = None,
    x0_mean: np.ndarray | None = None,
) -> float:
    """Optimal finite-horizon cost for a given per-step expected posterior
    covariance sequence P_seq (k = 0..N-1):

    J = x0'S0x0 + Tr(S0 P0) + sum Tr(S_{k+1} Q)
        + sum Tr((A'S_{k+1}A + W - S_k) E[P_k]).
    """
    N = schedule.horizon
    if len(P_seq) != N:
        raise ValueError(f"P_seq must have length {N}, got {len(P_seq)}")
    P0 = plant.P0 if P0 is None else P0
    x0 = plant.x0_mean if x0_mean is None else np.asarray(x0_mean, dtype=float)
    S0 = schedule.S_seq[0]
    J = float(x0 @ S0 @ x0) + float(np.trace(S0 @ P0))
    A = plant.A
    for k in range(N):
        S_next = schedule.S_seq[k + 1]
        J += float(np.trace(S_next @ plant.Q))
        coeff = A.T @ S_next @ A + plant.W - schedule.S_seq[k]
        J += float(np.trace(coeff @ P_seq[k]))
    return J
