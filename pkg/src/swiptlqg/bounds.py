"""Finite- and infinite-horizon cost bounds over the power-splitting ratio.

The optimal cost cannot be computed exactly (it depends on the realized
packet sequence), but it is sandwiched between a lower bound built from the
scaled-Lyapunov covariance floor and an upper bound built from the
estimation-MARE fixed point.  Unboundedness is data, not an exception: sweeps
across the splitting ratio must keep running through the unstable regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import riccati
from .channels import BpskParams, PowerSplit, SwiptLink, eta_curve, gamma_curve
from .lqg import backward_gain_pass, expected_cost_formula
from .model import PlantModel

UNBOUNDED = math.inf


@dataclass(frozen=True)
class CostBounds:
    """Cost bracket at one splitting ratio.

    When ``bounded`` is false both bounds carry +inf and ``which_diverged``
    names the first solver that diverged ('control', 'estimation',
    'lyapunov', or 'undecided' when the iteration could not be classified
    within its budget, which happens only at the exact critical boundary).
    """

    j_min: float
    j_max: float
    bounded: bool
    alpha: float
    eta: float
    gamma: float
    which_diverged: str | None = None


@dataclass(frozen=True)
class InfinitePoint:
    """CostBounds plus the fixed points behind them (for warm starts)."""

    bounds: CostBounds
    S: np.ndarray | None
    P_bar: np.ndarray | None
    P_lower: np.ndarray | None
    P_tilde: np.ndarray | None


def _solve_or_classify(solve, init, max_iter, probe_retry):
    """Run a fixed-point solve; optionally extend the budget on
    MaxIterExceeded and classify a still-undecided probe as diverged.

    Growing increments across budget extensions mean no fixed point exists,
    so such probes are classified diverged early instead of iterating all the
    way to the divergence threshold; shrinking increments mean convergence is
    coming, so the budget keeps doubling until the value is actually reached
    (it is needed for the bound formulas)."""
    if not probe_retry:
        return solve(init=init, max_iter=max_iter), False
    from .critical import PROBE_ITER_CAP

    total = 0
    budget = max_iter
    current = init
    prev_res = None
    while True:
        try:
            return solve(init=current, max_iter=budget), False
        except riccati.MaxIterExceeded as exc:
            total += budget
            if prev_res is not None and exc.residual >= 2.0 * prev_res:
                return riccati.FixedPointResult(
                    value=exc.value, iterations=total, converged=False,
                    diverged=True, residual=exc.residual,
                ), False
            if total >= PROBE_ITER_CAP:
                return None, True
            prev_res = exc.residual
            current = exc.value
            budget = min(2 * budget, PROBE_ITER_CAP - total)


def infinite_point(
    plant: PlantModel,
    alpha: float,
    eta: float,
    gamma: float,
    tol: float = riccati.DEFAULT_TOL,
    max_iter: int = riccati.DEFAULT_MAX_ITER,
    div_threshold: float = riccati.DEFAULT_DIV_THRESHOLD,
    inits: dict | None = None,
    probe_retry: bool = False,
) -> InfinitePoint:
    """Infinite-horizon bounds at explicit arrival probabilities.

    J_min = Tr(SQ) + (1-gamma) Tr((A'SA + W - S) P_lower)
    J_max = Tr(SQ) + Tr((A'SA + W - S) P~),  P~ = g_tilde(gamma, P_bar).

    The point is bounded iff the control MARE, the estimation MARE, and the
    scaled Lyapunov equation all converge (the certified region is open, so
    the exact endpoints report unbounded).
    """
    inits = inits or {}

    def unbounded(which: str) -> InfinitePoint:
        return InfinitePoint(
            bounds=CostBounds(
                j_min=UNBOUNDED, j_max=UNBOUNDED, bounded=False,
                alpha=alpha, eta=eta, gamma=gamma, which_diverged=which,
            ),
            S=None, P_bar=None, P_lower=None, P_tilde=None,
        )

    def control(init, max_iter):
        return riccati.solve_control_mare(
            plant, eta, init=init, tol=tol, max_iter=max_iter,
            div_threshold=div_threshold,
        )

    def estimation(init, max_iter):
        return riccati.solve_estimation_mare(
            plant, gamma, init=init, tol=tol, max_iter=max_iter,
            div_threshold=div_threshold,
        )

    def lyapunov(init, max_iter):
        return riccati.solve_lower_bound_lyapunov(
            plant, gamma, init=init, tol=tol, max_iter=max_iter,
            div_threshold=div_threshold,
        )

    res_s, undecided = _solve_or_classify(
        control, inits.get("S", plant.W), max_iter, probe_retry
    )
    if undecided:
        return unbounded("undecided")
    if res_s.diverged:
        return unbounded("control")
    res_p, undecided = _solve_or_classify(
        estimation, inits.get("P_bar", plant.P0), max_iter, probe_retry
    )
    if undecided:
        return unbounded("undecided")
    if res_p.diverged:
        return unbounded("estimation")
    res_l, undecided = _solve_or_classify(
        lyapunov, inits.get("P_lower", plant.P0), max_iter, probe_retry
    )
    if undecided:
        return unbounded("undecided")
    if res_l.diverged:
        return unbounded("lyapunov")

    S = res_s.value
    P_bar = res_p.value
    P_lower = res_l.value
    P_tilde = riccati.filtered_covariance(plant, gamma, P_bar)
    coeff = plant.A.T @ S @ plant.A + plant.W - S
    tr_sq = float(np.trace(S @ plant.Q))
    j_min = tr_sq + (1.0 - gamma) * float(np.trace(coeff @ P_lower))
    j_max = tr_sq + float(np.trace(coeff @ P_tilde))
    return InfinitePoint(
        bounds=CostBounds(
            j_min=j_min, j_max=j_max, bounded=True,
            alpha=alpha, eta=eta, gamma=gamma, which_diverged=None,
        ),
        S=S, P_bar=P_bar, P_lower=P_lower, P_tilde=P_tilde,
    )


def infinite_horizon_bounds(
    plant: PlantModel,
    link: SwiptLink,
    bpsk: BpskParams,
    split: PowerSplit,
    tol: float = riccati.DEFAULT_TOL,
    max_iter: int = riccati.DEFAULT_MAX_ITER,
    div_threshold: float = riccati.DEFAULT_DIV_THRESHOLD,
    probe_retry: bool = False,
) -> CostBounds:
    """Infinite-horizon bounds at a splitting ratio, with the arrival
    probabilities taken from the channel curves."""
    eta = eta_curve(link, bpsk)(split.alpha)
    gamma = gamma_curve(link, bpsk)(split.alpha)
    return infinite_point(
        plant, split.alpha, eta, gamma,
        tol=tol, max_iter=max_iter, div_threshold=div_threshold,
        probe_retry=probe_retry,
    ).bounds


def finite_horizon_bounds(
    plant: PlantModel,
    link: SwiptLink,
    bpsk: BpskParams,
    split: PowerSplit,
    N: int,
) -> CostBounds:
    """Finite-horizon cost bracket (always bounded).

    No measurement arrives at step 0, so both sequences start exactly at P0.
    Afterwards the expected posterior covariance is sandwiched between the
    scaled-Lyapunov floor P^_{k+1} = (1-gamma) h~(P^_k) and the once-filtered
    Riccati iterate g~(gamma, h~(.)).
    """
    if N < 1:
        raise ValueError(f"horizon must be >= 1, got {N}")
    eta = eta_curve(link, bpsk)(split.alpha)
    gamma = gamma_curve(link, bpsk)(split.alpha)
    schedule = backward_gain_pass(plant, eta, N)

    lower_seq = [plant.P0]
    upper_seq = [plant.P0]
    for _ in range(N - 1):
        lower_seq.append((1.0 - gamma) * riccati.op_h_tilde(lower_seq[-1], plant))
        upper_seq.append(
            riccati.op_g_tilde(gamma, riccati.op_h_tilde(upper_seq[-1], plant), plant)
        )

    j_min = expected_cost_formula(plant, schedule, lower_seq)
    j_max = expected_cost_formula(plant, schedule, upper_seq)
    return CostBounds(
        j_min=j_min, j_max=j_max, bounded=True,
        alpha=split.alpha, eta=eta, gamma=gamma, which_diverged=None,
    )


def proposition1_objective(
    plant: PlantModel,
    split: PowerSplit,
    S: np.ndarray,
    P_tilde: np.ndarray,
) -> float:
    """Tr((A'SA + W - S) P~) + Tr(SQ) for converged fixed points at this
    splitting ratio; equal to the infinite-horizon upper bound."""
    coeff = plant.A.T @ S @ plant.A + plant.W - S
    return float(np.trace(coeff @ P_tilde)) + float(np.trace(S @ plant.Q))
