import math

import numpy as np
import pytest
from scipy.stats import norm

from swiptlqg.channels import (
    BpskParams,
    PowerSplit,
    SwiptLink,
    bpsk_packet_success,
    db_to_linear,
    eta_curve,
    gamma_curve,
    harvest_power,
    std_normal_cdf,
)


def test_db_to_linear():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert db_to_linear(-3.0) == pytest.approx(0.501187, abs=1e-6)


def test_std_normal_cdf_against_scipy():
    for z in np.linspace(-6, 6, 25):
        assert std_normal_cdf(z) == pytest.approx(norm.cdf(z), abs=1e-14)


def test_harvest_power_linear_model():
    link = SwiptLink(h_a=1.0, h_s=2.0, h_e=1.0, p_tx=0.5, xi=0.8, sigma_e2=0.1)
    # r = xi * (h_s (1 - alpha) p + sigma_e2)
    assert harvest_power(link, PowerSplit(0.0)) == pytest.approx(0.8 * 1.1)
    assert harvest_power(link, PowerSplit(1.0)) == pytest.approx(0.8 * 0.1)
    assert harvest_power(link, PowerSplit(0.5)) == pytest.approx(0.8 * 0.6)


def test_bpsk_packet_success_formula():
    bpsk = BpskParams(bits_per_packet=2, T_s=2e-7, N_0=2e-8)
    # z^2 = 2 P T_s / (B N_0) = 10 P; packet succeeds iff both bits do
    P = 0.3
    z = math.sqrt(10.0 * P)
    assert bpsk_packet_success(P, bpsk) == pytest.approx(std_normal_cdf(z) ** 2)
    assert bpsk_packet_success(0.0, bpsk) == pytest.approx(0.25)


def test_curve_monotonicity(fig2_cfg):
    link, bpsk = fig2_cfg.link, fig2_cfg.bpsk
    alphas = np.linspace(0.0, 1.0, 101)
    eta = [eta_curve(link, bpsk)(a) for a in alphas]
    gamma = [gamma_curve(link, bpsk)(a) for a in alphas]
    assert all(b >= a for a, b in zip(eta, eta[1:]))
    assert all(b <= a for a, b in zip(gamma, gamma[1:]))
    assert all(0.0 < v < 1.0 for v in eta + gamma)


def test_validation():
    with pytest.raises(ValueError):
        SwiptLink(h_a=-1.0, h_s=1.0, h_e=1.0, p_tx=1.0)
    with pytest.raises(ValueError):
        SwiptLink(h_a=1.0, h_s=1.0, h_e=1.0, p_tx=0.0)
    with pytest.raises(ValueError):
        SwiptLink(h_a=1.0, h_s=1.0, h_e=1.0, p_tx=1.0, xi=1.5)
    with pytest.raises(ValueError):
        BpskParams(bits_per_packet=0, T_s=1e-7, N_0=1e-8)
    with pytest.raises(ValueError):
        PowerSplit(1.2)
    with pytest.raises(ValueError):
        bpsk_packet_success(-0.1, BpskParams(2, 2e-7, 2e-8))
