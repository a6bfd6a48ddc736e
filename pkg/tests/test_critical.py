import math

import numpy as np
import pytest

from swiptlqg import critical
from swiptlqg.channels import BpskParams, SwiptLink
from swiptlqg.model import validate_plant

CLOSED_FORM = 1.0 - 1.0 / 1.44   # scalar A = 1.2


def test_critical_eta_scalar(scalar_plant):
    assert critical.critical_eta(scalar_plant) == pytest.approx(CLOSED_FORM, abs=1e-5)


def test_critical_gamma_bounds_scalar(scalar_plant):
    p_min, gamma_max, p_max = critical.critical_gamma_bounds(scalar_plant)
    # single unstable eigenvalue: the bracket collapses
    assert p_min == pytest.approx(CLOSED_FORM, abs=1e-12)
    assert p_max == pytest.approx(CLOSED_FORM, abs=1e-12)
    assert p_min - 1e-9 <= gamma_max <= p_max + 1e-9
    assert gamma_max == pytest.approx(CLOSED_FORM, abs=1e-5)


def test_stable_plant_critical_zero():
    import warnings
    from swiptlqg.model import AssumptionViolated
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AssumptionViolated)
        stable = validate_plant(0.8, 1, 1, 1, 1, 1, 1)
    assert critical.critical_eta(stable) == 0.0
    assert critical.critical_gamma_bounds(stable) == (0.0, 0.0, 0.0)


def test_two_unstable_eigenvalues_bracket():
    A = np.diag([1.3, 1.1])
    plant = validate_plant(A, np.eye(2), np.eye(2), np.eye(2),
                           np.eye(2), np.eye(2), np.eye(2))
    p_min, gamma_max, p_max = critical.critical_gamma_bounds(plant)
    assert p_min == pytest.approx(1.0 - 1.0 / 1.69, abs=1e-12)
    assert p_max == pytest.approx(1.0 - 1.0 / (1.69 * 1.21), abs=1e-12)
    assert p_min - 1e-6 <= gamma_max <= p_max + 1e-6
    # with C = I the estimation MARE converges whenever the Lyapunov lower
    # bound allows it, so gamma_max should sit near p_min here
    assert gamma_max == pytest.approx(p_min, abs=1e-4)


def test_critical_alphas_fig2(fig2_cfg):
    region = critical.critical_alphas(fig2_cfg.plant, fig2_cfg.link, fig2_cfg.bpsk)
    assert region.feasible
    assert 0.0 < region.alpha_lower < 0.05
    assert 0.95 < region.alpha_upper_lo <= region.alpha_upper_hi < 1.0
    assert region.eta_c == pytest.approx(CLOSED_FORM, abs=1e-5)
    # the certified endpoints must actually map onto the critical rates
    from swiptlqg.channels import eta_curve, gamma_curve
    eta_of = eta_curve(fig2_cfg.link, fig2_cfg.bpsk)
    gamma_of = gamma_curve(fig2_cfg.link, fig2_cfg.bpsk)
    assert eta_of(region.alpha_lower) == pytest.approx(region.eta_c, abs=1e-6)
    assert gamma_of(region.alpha_upper_lo) == pytest.approx(
        region.gamma_c_upper, abs=1e-6
    )


def test_infeasible_region_reported_not_raised(scalar_plant):
    # starved link: eta never reaches eta_c for any alpha
    link = SwiptLink(h_a=1.0, h_s=1.0, h_e=1.0, p_tx=1e-6)
    bpsk = BpskParams(bits_per_packet=2, T_s=2e-7, N_0=2e-8)
    region = critical.critical_alphas(scalar_plant, link, bpsk)
    assert not region.feasible
    assert math.isinf(region.alpha_lower)


def test_bisection_rejects_non_monotone():
    with pytest.raises(critical.PredicateNotMonotone):
        critical._bisect_probability(lambda p: True, 1e-6)
    with pytest.raises(critical.PredicateNotMonotone):
        critical._bisect_probability(lambda p: False, 1e-6)
