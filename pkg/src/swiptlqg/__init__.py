"""LQG control over a SWIPT-powered lossy wireless network.

Numerical tools for a networked control loop in which a power-splitting
transmitter simultaneously drives the actuator link and wirelessly powers the
sensor: modified algebraic Riccati equation (MARE) solvers, critical packet
arrival probabilities, critical power-splitting ratios, infinite/finite-
horizon cost brackets, grid-search optimization of the splitting ratio, and a
seeded Monte Carlo closed-loop simulator.

The hot kernels (MARE value iteration and the per-step simulation loop) run
in a compiled extension when available, with a pure-Python fallback selected
at import time; see ``swiptlqg.HAVE_COMPILED``.
"""

__version__ = "0.1.0"

from ._backend import HAVE_COMPILED
from .bounds import (
    CostBounds,
    finite_horizon_bounds,
    infinite_horizon_bounds,
    infinite_point,
    proposition1_objective,
)
from .channels import (
    BpskParams,
    PowerSplit,
    SwiptLink,
    db_to_linear,
    eta_curve,
    eta_success,
    gamma_curve,
    gamma_success,
    harvest_power,
)
from .config import ConfigError, ExperimentConfig, load_config
from .critical import (
    CriticalRegion,
    critical_alphas,
    critical_eta,
    critical_gamma_bounds,
)
from .lqg import GainSchedule, backward_gain_pass, expected_cost_formula, stage_gain
from .model import HorizonSpec, PlantModel, validate_plant
from .optimizer import InfeasibleRegion, Optimum, OptimizerConfig, optimize_alpha
from .riccati import (
    FixedPointResult,
    solve_control_mare,
    solve_estimation_mare,
    solve_lower_bound_lyapunov,
)
from .sim import SimCampaignResult, SimConfig, run_campaign, run_single

__all__ = [
    "__version__",
    "HAVE_COMPILED",
    "BpskParams",
    "ConfigError",
    "CostBounds",
    "CriticalRegion",
    "ExperimentConfig",
    "FixedPointResult",
    "GainSchedule",
    "HorizonSpec",
    "InfeasibleRegion",
    "Optimum",
    "OptimizerConfig",
    "PlantModel",
    "PowerSplit",
    "SimCampaignResult",
    "SimConfig",
    "SwiptLink",
    "backward_gain_pass",
    "critical_alphas",
    "critical_eta",
    "critical_gamma_bounds",
    "db_to_linear",
    "eta_curve",
    "eta_success",
    "expected_cost_formula",
    "finite_horizon_bounds",
    "gamma_curve",
    "gamma_success",
    "harvest_power",
    "infinite_horizon_bounds",
    "infinite_point",
    "load_config",
    "optimize_alpha",
    "proposition1_objective",
    "run_campaign",
    "run_single",
    "solve_control_mare",
    "solve_estimation_mare",
    "solve_lower_bound_lyapunov",
    "stage_gain",
    "validate_plant",
]
