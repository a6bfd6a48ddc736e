"""Seeded Monte Carlo closed-loop simulator.

Each (alpha index, run index) pair owns an independent, reproducible random
stream: the per-run generator is Philox seeded with
``SeedSequence(entropy=seed, spawn_key=(alpha_index, run_index))``, so results
are bit-identical for a fixed seed regardless of how runs are distributed
across workers.  Per run, draws happen in a fixed order: x0, process noise
(T x n), measurement noise (T x p), control-link uniforms (T), sensing-link
uniforms (T).

A run whose state exceeds the overflow threshold is flagged diverged and its
cost recorded as +inf; campaign aggregates report the divergence fraction and
the mean/standard error over the non-diverged runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from . import riccati
from ._backend import kernels
from .channels import BpskParams, PowerSplit, SwiptLink, eta_curve, gamma_curve
from .lqg import backward_gain_pass, stage_gain
from .model import PlantModel, psd_sqrt

STATE_OVERFLOW = 1e150


@dataclass(frozen=True)
class SimConfig:
    horizon_T: int
    runs: int
    seed: int
    alpha_grid: tuple[float, ...]
    gain_mode: str = "stationary"   # or "schedule"
    overflow: float = STATE_OVERFLOW
    n_jobs: int = 1

    def __post_init__(self):
        if self.horizon_T < 1:
            raise ValueError(f"horizon_T must be >= 1, got {self.horizon_T}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.gain_mode not in ("stationary", "schedule"):
            raise ValueError(f"unknown gain_mode {self.gain_mode!r}")
        for a in self.alpha_grid:
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"alpha {a} outside [0, 1]")


@dataclass(frozen=True)
class AlphaPointResult:
    alpha: float
    j_emp: float                 # mean per-step cost over non-diverged runs
    std_err: float
    diverged_fraction: float
    eta_empirical: float
    gamma_empirical: float
    eta: float                   # model probabilities used for the draws
    gamma: float
    run_costs: tuple[float, ...]  # +inf marks a diverged run
    err_sq_avg: float            # time-averaged squared estimation error
    tr_p_avg: float              # time-averaged Tr(P), non-diverged runs


@dataclass(frozen=True)
class SimCampaignResult:
    per_alpha: list[AlphaPointResult]
    seed: int
    horizon_T: int
    runs: int
    gain_mode: str


def stationary_gain(plant: PlantModel, eta: float) -> np.ndarray:
    """Control gain from the MARE fixed point at arrival probability eta.

    Below the critical probability no fixed point exists; the gain of the last
    iterate is used (it approaches a finite limit), keeping sweeps through the
    unbounded region deterministic and well-defined.
    """
    try:
        res = riccati.solve_control_mare(plant, eta)
        S = res.value
    except riccati.MaxIterExceeded as exc:
        S = exc.value
    return stage_gain(plant, S)


def _run_rng(seed: int, alpha_index: int, run_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(alpha_index, run_index))
    return np.random.Generator(np.random.Philox(ss))


def _draw_run(plant, sq_p0, sq_q, sq_r, eta, gamma, T, rng):
    x0 = plant.x0_mean + sq_p0 @ rng.standard_normal(plant.n)
    w = rng.standard_normal((T, plant.n)) @ sq_q.T
    v = rng.standard_normal((T, plant.p)) @ sq_r.T
    eta_bits = (rng.random(T) < eta).astype(np.int8)
    gamma_bits = (rng.random(T) < gamma).astype(np.int8)
    return x0, w, v, eta_bits, gamma_bits


def _simulate_schedule(plant, L_seq, x0, w, v, eta_bits, gamma_bits, overflow):
    """Python-only trajectory with a per-step gain schedule."""
    T = w.shape[0]
    x = x0.copy()
    xhat = plant.x0_mean.copy()
    P = plant.P0.copy()
    cost = err_sq = tr_p = 0.0
    diverged = 0
    for k in range(T):
        e = x - xhat
        err_sq += float(e @ e)
        tr_p += float(np.trace(P))
        u = L_seq[k] @ xhat
        cost += float(x @ plant.W @ x)
        if eta_bits[k]:
            cost += float(u @ plant.U @ u)
        bu = plant.B @ u if eta_bits[k] else 0.0
        xn = plant.A @ x + bu + w[k]
        xpr = plant.A @ xhat + bu
        Ppr = plant.A @ P @ plant.A.T
        Ppr = 0.5 * (Ppr + Ppr.T) + plant.Q
        if gamma_bits[k]:
            CP = plant.C @ Ppr
            KT = np.linalg.solve(CP @ plant.C.T + plant.R, CP)
            innov = plant.C @ (xn - xpr) + v[k]
            xhat = xpr + KT.T @ innov
            KCP = KT.T @ CP
            P = Ppr - 0.5 * (KCP + KCP.T)
        else:
            xhat = xpr
            P = Ppr
        x = xn
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > overflow:
            diverged = 1
            break
    if not diverged:
        cost += float(x @ plant.W @ x)
    return cost, diverged, err_sq, tr_p

def run_single(
    plant: PlantModel,
    link: SwiptLink,
    bpsk: BpskParams,
    split: PowerSplit,
    T: int,
    rng: np.random.Generator,
    gain=None,
    overflow: float = STATE_OVERFLOW,
) -> float:
    """One closed-loop trajectory; returns the time-averaged cost, or +inf
    when the state overflowed (unbounded marker)."""
    eta = eta_curve(link, bpsk)(split.alpha)
    gamma = gamma_curve(link, bpsk)(split.alpha)
    L = stationary_gain(plant, eta) if gain is None else gain
    sq_p0, sq_q, sq_r = psd_sqrt(plant.P0), psd_sqrt(plant.Q), psd_sqrt(plant.R)
    x0, w, v, eb, gb = _draw_run(plant, sq_p0, sq_q, sq_r, eta, gamma, T, rng)
    cost, diverged, _, _, _ = kernels.simulate_path(
        plant.A, plant.B, plant.C, plant.Q, plant.R, plant.W, plant.U,
        np.ascontiguousarray(L, dtype=float), x0, plant.x0_mean.copy(),
        plant.P0, w, v, eb, gb, overflow,
    )
    return math.inf if diverged else cost / T


def _alpha_point(plant, eta, gamma, alpha, alpha_index, L, L_seq, cfg) -> AlphaPointResult:
    T = cfg.horizon_T
    sq_p0, sq_q, sq_r = psd_sqrt(plant.P0), psd_sqrt(plant.Q), psd_sqrt(plant.R)
    costs = np.empty(cfg.runs)
    err_sqs = []
    tr_ps = []
    eta_hits = 0
    gamma_hits = 0
    for ri in range(cfg.runs):
        rng = _run_rng(cfg.seed, alpha_index, ri)
        x0, w, v, eb, gb = _draw_run(plant, sq_p0, sq_q, sq_r, eta, gamma, T, rng)
        eta_hits += int(eb.sum())
        gamma_hits += int(gb.sum())
        if L_seq is not None:
            cost, diverged, err_sq, tr_p = _simulate_schedule(
                plant, L_seq, x0, w, v, eb, gb, cfg.overflow
            )
        else:
            cost, diverged, err_sq, tr_p, _ = kernels.simulate_path(
                plant.A, plant.B, plant.C, plant.Q, plant.R, plant.W, plant.U,
                L, x0, plant.x0_mean.copy(), plant.P0, w, v, eb, gb, cfg.overflow,
            )
        if diverged:
            costs[ri] = math.inf
        else:
            costs[ri] = cost / T
            err_sqs.append(err_sq / T)
            tr_ps.append(tr_p / T)
    finite = np.isfinite(costs)
    n_ok = int(finite.sum())
    j_emp = float(np.mean(costs[finite])) if n_ok else math.inf
    std_err = (
        float(np.std(costs[finite], ddof=1) / math.sqrt(n_ok)) if n_ok > 1 else 0.0
    )
    return AlphaPointResult(
        alpha=alpha,
        j_emp=j_emp,
        std_err=std_err,
        diverged_fraction=1.0 - n_ok / cfg.runs,
        eta_empirical=eta_hits / (cfg.runs * T),
        gamma_empirical=gamma_hits / (cfg.runs * T),
        eta=eta,
        gamma=gamma,
        run_costs=tuple(costs.tolist()),
        err_sq_avg=float(np.mean(err_sqs)) if err_sqs else math.nan,
        tr_p_avg=float(np.mean(tr_ps)) if tr_ps else math.nan,
    )


def run_campaign(
    plant: PlantModel,
    link: SwiptLink,
    bpsk: BpskParams,
    cfg: SimConfig,
) -> SimCampaignResult:
    """Monte Carlo sweep over the alpha grid.

    Bit-reproducible for a fixed (seed, config) at any parallelism: per-run
    streams are keyed on (alpha index, run index) and aggregation order is
    fixed by run index.
    """
    eta_of = eta_curve(link, bpsk)
    gamma_of = gamma_curve(link, bpsk)
    tasks = []
    for ai, alpha in enumerate(cfg.alpha_grid):
        eta = eta_of(alpha)
        gamma = gamma_of(alpha)
        if cfg.gain_mode == "schedule":
            L, L_seq = None, backward_gain_pass(plant, eta, cfg.horizon_T).L_seq
        else:
            L = np.ascontiguousarray(stationary_gain(plant, eta), dtype=float)
            L_seq = None
        tasks.append((plant, eta, gamma, alpha, ai, L, L_seq, cfg))
    if cfg.n_jobs == 1:
        per_alpha = [_alpha_point(*t) for t in tasks]
    else:
        per_alpha = Parallel(n_jobs=cfg.n_jobs)(
            delayed(_alpha_point)(*t) for t in tasks
        )
    return SimCampaignResult(
        per_alpha=per_alpha,
        seed=cfg.seed,
        horizon_T=cfg.horizon_T,
        runs=cfg.runs,
        gain_mode=cfg.gain_mode,
    )
