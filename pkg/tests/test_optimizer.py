import numpy as np
import pytest

from swiptlqg import critical, optimizer
from swiptlqg.channels import BpskParams, SwiptLink


@pytest.fixture(scope="module")
def fig2_region(fig2_cfg_module):
    cfg = fig2_cfg_module
    return critical.critical_alphas(cfg.plant, cfg.link, cfg.bpsk)


@pytest.fixture(scope="module")
def fig2_cfg_module():
    from swiptlqg import load_config
    from tests.conftest import FIG2
    return load_config(FIG2)


def test_optimize_interior_minimum(fig2_cfg_module, fig2_region):
    cfg = fig2_cfg_module
    opt = optimizer.optimize_alpha(
        cfg.plant, cfg.link, cfg.bpsk, fig2_region,
        optimizer.OptimizerConfig(delta=0.02),
    )
    lo, hi = fig2_region.alpha_lower, fig2_region.alpha_upper_lo
    assert lo < opt.alpha_star_hat < hi
    assert np.isfinite(opt.j_max_at_opt)
    # the profile brackets the optimum: neighbors are no better
    alphas = [a for a, _, _ in opt.profile]
    js = [j for _, j, _ in opt.profile]
    i = alphas.index(opt.alpha_star_hat)
    assert js[i] == min(js)
    assert all(b for _, _, b in opt.profile[1:-1])


def test_grid_strict_interior():
    pts = optimizer._grid(0.0, 1.0, 0.2)
    assert pts == pytest.approx([0.2, 0.4, 0.6, 0.8])
    # degenerate range degrades to the left endpoint
    assert optimizer._grid(0.4, 0.45, 0.2) == [0.4]


def test_warm_start_matches_cold(fig2_cfg_module, fig2_region):
    cfg = fig2_cfg_module
    warm = optimizer.optimize_alpha(
        cfg.plant, cfg.link, cfg.bpsk, fig2_region,
        optimizer.OptimizerConfig(delta=0.05, warm_start=True),
    )
    cold = optimizer.optimize_alpha(
        cfg.plant, cfg.link, cfg.bpsk, fig2_region,
        optimizer.OptimizerConfig(delta=0.05, warm_start=False),
    )
    assert warm.alpha_star_hat == cold.alpha_star_hat
    assert warm.j_max_at_opt == pytest.approx(cold.j_max_at_opt, abs=1e-7)


def test_explicit_range(fig2_cfg_module, fig2_region):
    cfg = fig2_cfg_module
    opt = optimizer.optimize_alpha(
        cfg.plant, cfg.link, cfg.bpsk, fig2_region,
        optimizer.OptimizerConfig(delta=0.05, alpha_range=(0.3, 0.7)),
    )
    assert 0.3 < opt.alpha_star_hat < 0.7


def test_infeasible_raises(scalar_plant):
    link = SwiptLink(h_a=1.0, h_s=1.0, h_e=1.0, p_tx=1e-6)
    bpsk = BpskParams(bits_per_packet=2, T_s=2e-7, N_0=2e-8)
    region = critical.critical_alphas(scalar_plant, link, bpsk)
    assert not region.feasible
    with pytest.raises(optimizer.InfeasibleRegion):
        optimizer.optimize_alpha(
            scalar_plant, link, bpsk, region, optimizer.OptimizerConfig()
        )


def test_config_validation():
    with pytest.raises(ValueError):
        optimizer.OptimizerConfig(delta=0.0)
    with pytest.raises(ValueError):
        optimizer.OptimizerConfig(delta=0.02, alpha_range=(-0.1, 0.5))
