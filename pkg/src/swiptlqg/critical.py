"""Critical arrival probabilities and critical power-splitting ratios.

eta_c is the infimum of control-packet arrival probabilities for which the
control MARE admits a PSD solution; it is located by bisection with MARE
convergence/divergence as the feasibility predicate.  gamma_c is only known
to lie in [p_min, gamma_max] (with gamma_max <= p_max), so the right critical
splitting ratio is reported as an interval.

Near the critical probability the value iteration slows down without limit
(contraction factor -> 1), so a probe that exhausts its iteration budget is
continued from its last iterate with a geometrically growing budget up to a
hard cap, and classified as infeasible if still undecided.  The residual
misclassification band is far below the bisection tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import riccati
from .channels import BpskParams, SwiptLink, eta_curve, gamma_curve
from .model import PlantModel, unstable_eigen_products

DEFAULT_ALPHA_TOL = 1e-6
DEFAULT_PROB_TOL = 1e-6
BISECT_MAX_STEPS = 60
PROBE_ITER_CAP = 40_000_000


class PredicateNotMonotone(RuntimeError):
    """Bisection bracket invariant violated (numerical threshold problem)."""


@dataclass(frozen=True)
class CriticalRegion:
    """Critical probabilities and the induced splitting-ratio region.

    ``alpha_lower`` is the left critical ratio; the right critical ratio is
    bracketed by [alpha_upper_lo, alpha_upper_hi] because gamma_c itself is
    only bracketed.  Downstream consumers should use the conservative inner
    interval [alpha_lower, alpha_upper_lo] for certified boundedness.
    ``alpha_lower`` is +inf when no splitting ratio stabilizes the control
    link.
    """

    eta_c: float
    gamma_c_lower: float     # p_min
    gamma_c_upper: float     # gamma_max
    gamma_p_max: float       # p_max
    alpha_lower: float
    alpha_upper_lo: float
    alpha_upper_hi: float
    feasible: bool


def _probe(solve: Callable[..., riccati.FixedPointResult], init, max_iter: int):
    """Decide convergence of a fixed-point solve, extending the budget on
    MaxIterExceeded by continuing from the last iterate.

    Near the critical probability neither the convergence nor the divergence
    test fires within any reasonable budget, but the trend of the increment
    norm across budget extensions decides much earlier: the increments of the
    monotone value iteration shrink geometrically exactly when a fixed point
    exists.  A decisive trend (factor 2 either way) classifies the probe; an
    ambiguous one doubles the budget, up to PROBE_ITER_CAP.

    Returns (converged, value or None when classified by trend).
    """
    total = 0
    budget = max_iter
    current = init
    prev_res = None
    while True:
        try:
            result = solve(init=current, max_iter=budget)
        except riccati.MaxIterExceeded as exc:
            total += budget
            if prev_res is not None:
                if exc.residual <= 0.5 * prev_res:
                    return True, None
                if exc.residual >= 2.0 * prev_res:
                    return False, None
            if total >= PROBE_ITER_CAP:
                return False, None
            prev_res = exc.residual
            current = exc.value
            budget = min(2 * budget, PROBE_ITER_CAP - total)
        else:
            return result.converged, result.value if result.converged else None


def _bisect_probability(predicate: Callable[[float], bool], tol: float) -> float:
    """Bisect the monotone feasibility predicate over [0, 1]."""
    lo, hi = 0.0, 1.0
    if predicate(lo):
        raise PredicateNotMonotone("predicate already true at probability 0")
    if not predicate(hi):
        raise PredicateNotMonotone("predicate false at probability 1")
    steps = 0
    while hi - lo > tol and steps < BISECT_MAX_STEPS:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
        steps += 1
    return 0.5 * (lo + hi)


def critical_eta(
    plant: PlantModel,
    tol: float = DEFAULT_PROB_TOL,
    mare_tol: float = riccati.DEFAULT_TOL,
    max_iter: int = riccati.DEFAULT_MAX_ITER,
) -> float:
    """Critical control-packet arrival probability eta_c.

    Returns 0 for a stable plant (the MARE converges for every eta).
    """
    if not plant.unstable:
        return 0.0
    warm = {"value": None}

    def predicate(eta: float) -> bool:
        init = warm["value"] if warm["value"] is not None else plant.W

        def solve(init, max_iter):
            return riccati.solve_control_mare(
                plant, eta, init=init, tol=mare_tol, max_iter=max_iter
            )

        ok, value = _probe(solve, init, max_iter)
        if ok:
            warm["value"] = value
        return ok

    return _bisect_probability(predicate, tol)


def critical_gamma_bounds(
    plant: PlantModel,
    tol: float = DEFAULT_PROB_TOL,
    mare_tol: float = riccati.DEFAULT_TOL,
    max_iter: int = riccati.DEFAULT_MAX_ITER,
) -> tuple[float, float, float]:
    """(p_min, gamma_max, p_max) bracketing the critical observation
    probability gamma_c, with p_min <= gamma_c <= gamma_max <= p_max.

    p_min and p_max come from the closed forms over the unstable eigenvalues;
    gamma_max from bisection on estimation-MARE convergence.
    """
    max_sq, prod_sq = unstable_eigen_products(plant.A)
    p_min = 1.0 - 1.0 / max_sq
    p_max = 1.0 - 1.0 / prod_sq
    if not plant.unstable:
        return 0.0, 0.0, 0.0
    warm = {"value": None}

    def predicate(gamma: float) -> bool:
        init = warm["value"] if warm["value"] is not None else plant.P0

        def solve(init, max_iter):
            return riccati.solve_estimation_mare(
                plant, gamma, init=init, tol=mare_tol, max_iter=max_iter
            )

        ok, value = _probe(solve, init, max_iter)
        if ok:
            warm["value"] = value
        return ok

    gamma_max = _bisect_probability(predicate, tol)
    slack = max(tol, 1e-9)
    if gamma_max < p_min - slack or gamma_max > p_max + slack:
        raise PredicateNotMonotone(
            f"gamma_max={gamma_max} outside [p_min, p_max]=[{p_min}, {p_max}]"
        )
    gamma_max = min(max(gamma_max, p_min), p_max)
    return p_min, gamma_max, p_max


def _solve_decreasing_root(curve, threshold: float, tol: float) -> float:
    """Root of the nonincreasing-in-alpha curve hitting ``threshold``.

    Returns 1.0 if the curve stays above the threshold on all of [0, 1]
    (estimation never binds) and 0.0 if it is below already at alpha = 0.
    """
    if curve(1.0) > threshold:
        return 1.0
    if curve(0.0) <= threshold:
        return 0.0
    return float(brentq(lambda a: curve(a) - threshold, 0.0, 1.0, xtol=tol))


def critical_alphas(
    plant: PlantModel,
    link: SwiptLink,
    bpsk: BpskParams,
    tol: float = DEFAULT_ALPHA_TOL,
    prob_tol: float = DEFAULT_PROB_TOL,
) -> CriticalRegion:
    """Both critical splitting ratios for a plant/channel combination.

    alpha_lower solves eta(alpha) = eta_c; the right critical ratio is the
    interval obtained from the gamma_c bracket: alpha_upper_lo solves
    gamma(alpha) = gamma_max, alpha_upper_hi solves gamma(alpha) = p_min.
    Infeasibility is reported through ``feasible``, never as an exception.
    """
    eta_of = eta_curve(link, bpsk)
    gamma_of = gamma_curve(link, bpsk)
    eta_c = critical_eta(plant, tol=prob_tol)
    p_min, gamma_max, p_max = critical_gamma_bounds(plant, tol=prob_tol)

    if eta_c <= 0.0 or eta_of(0.0) > eta_c:
        alpha_lower = 0.0
    elif eta_of(1.0) <= eta_c:
        alpha_lower = math.inf
    else:
        alpha_lower = float(
            brentq(lambda a: eta_of(a) - eta_c, 0.0, 1.0, xtol=tol)
        )

    if gamma_max <= 0.0:
        alpha_upper_lo = alpha_upper_hi = 1.0
    else:
        alpha_upper_lo = _solve_decreasing_root(gamma_of, gamma_max, tol)
        alpha_upper_hi = _solve_decreasing_root(gamma_of, p_min, tol)

    feasible = bool(np.isfinite(alpha_lower) and alpha_lower < alpha_upper_hi)
    return CriticalRegion(
        eta_c=eta_c,
        gamma_c_lower=p_min,
        gamma_c_upper=gamma_max,
        gamma_p_max=p_max,
        alpha_lower=alpha_lower,
        alpha_upper_lo=alpha_upper_lo,
        alpha_upper_hi=alpha_upper_hi,
        feasible=feasible,
    )
