"""Grid search over the power-splitting ratio minimizing the upper cost bound.

The objective is non-convex, so the whole certified grid is scanned (no
unimodality assumption).  Inner fixed points may be warm-started from the
previous grid point; the fixed points are unique, so warm starting changes
only the transient, never the returned values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import riccati
from .bounds import infinite_point
from .channels import BpskParams, SwiptLink, eta_curve, gamma_curve
from .critical import CriticalRegion
from .model import PlantModel


class InfeasibleRegion(RuntimeError):
    """No splitting ratio yields a bounded infinite-horizon cost."""


@dataclass(frozen=True)
class OptimizerConfig:
    """Grid step, scan range, and inner-solver knobs.

    ``alpha_range`` defaults to the conservative certified interval
    [alpha_lower, alpha_upper_lo] of the critical region; the scan itself
    stays strictly inside it (the theorems are strict at the endpoints).
    """

    delta: float = 0.02
    alpha_range: tuple[float, float] | None = None
    warm_start: bool = True
    tol: float = riccati.DEFAULT_TOL
    max_iter: int = riccati.DEFAULT_MAX_ITER
    div_threshold: float = riccati.DEFAULT_DIV_THRESHOLD

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.alpha_range is not None:
            lo, hi = self.alpha_range
            if not (0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0):
                raise ValueError(f"alpha_range must lie in [0, 1], got {self.alpha_range}")


@dataclass(frozen=True)
class Optimum:
    alpha_star_hat: float
    j_max_at_opt: float
    profile: list[tuple[float, float, bool]] = field(repr=False)


def _grid(lo: float, hi: float, delta: float) -> list[float]:
    """Strict-interior grid {lo + k*delta} in [lo + delta, hi - delta];
    degrades to the single point lo when the range is narrower than the step."""
    pts = []
    k = 1
    while lo + k * delta <= hi - delta + 1e-15:
        pts.append(lo + k * delta)
        k += 1
    if not pts:
        pts = [lo]
    return pts


def optimize_alpha(
    plant: PlantModel,
    link: SwiptLink,
    bpsk: BpskParams,
    critical: CriticalRegion,
    cfg: OptimizerConfig,
) -> Optimum:
    """Scan the splitting-ratio grid and return the argmin of the upper bound.

    Ties break toward the smaller ratio.  Grid points whose fixed points
    diverge (possible near the right endpoint due to bisection tolerance) are
    recorded as unbounded and skipped, not raised.
    """
    if not critical.feasible:
        raise InfeasibleRegion(
            "no splitting ratio stabilizes both links (alpha_lower="
            f"{critical.alpha_lower}, alpha_upper_hi={critical.alpha_upper_hi})"
        )
    lo, hi = (
        cfg.alpha_range
        if cfg.alpha_range is not None
        else (critical.alpha_lower, critical.alpha_upper_lo)
    )
    if hi < lo:
        raise InfeasibleRegion(f"empty scan range [{lo}, {hi}]")
    eta_of = eta_curve(link, bpsk)
    gamma_of = gamma_curve(link, bpsk)

    profile: list[tuple[float, float, bool]] = []
    best_alpha = None
    best_j = np.inf
    inits: dict = {}
    for alpha in _grid(lo, hi, cfg.delta):
        point = infinite_point(
            plant, alpha, eta_of(alpha), gamma_of(alpha),
            tol=cfg.tol, max_iter=cfg.max_iter, div_threshold=cfg.div_threshold,
            inits=inits if cfg.warm_start else {},
            probe_retry=True,
        )
        b = point.bounds
        profile.append((alpha, b.j_max, b.bounded))
        if cfg.warm_start and b.bounded:
            inits = {"S": point.S, "P_bar": point.P_bar, "P_lower": point.P_lower}
        if b.bounded and b.j_max < best_j:
            best_j = b.j_max
            best_alpha = alpha
    if best_alpha is None:
        raise InfeasibleRegion("no bounded grid point in the scan range")
    return Optimum(alpha_star_hat=best_alpha, j_max_at_opt=best_j, profile=profile)
