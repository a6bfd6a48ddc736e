"""SWIPT physical layer: power splitting, harvesting, packet-success curves.

The transmitter spends ``alpha * p_tx`` on the control link and the sensor
harvests from the remaining ``(1 - alpha) * p_tx`` (linear harvesting model).
Packet-success probabilities follow the BPSK per-bit error model: a packet of
B bits arrives iff every bit does.  The stability/bounds machinery only relies
on these curves being monotone and continuous in alpha, so any object with the
same call signature can be substituted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SwiptLink:
    """Linear channel gains, transmit power, and harvesting parameters.

    All power-like fields (p_tx, sigma_e2, and the N_0 of the paired
    BpskParams) must be expressed in one consistent power unit; only ratios
    enter the success probabilities.
    """

    h_a: float            # transmitter -> actuator
    h_s: float            # transmitter -> sensor
    h_e: float            # sensor -> estimator
    p_tx: float
    xi: float = 1.0       # energy conversion efficiency
    sigma_e2: float = 0.0  # receiver antenna noise power

    def __post_init__(self):
        for name in ("h_a", "h_s", "h_e", "sigma_e2"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if not (self.p_tx > 0.0 and math.isfinite(self.p_tx)):
            raise ValueError(f"p_tx must be > 0, got {self.p_tx}")
        if not 0.0 <= self.xi <= 1.0:
            raise ValueError(f"xi must be in [0, 1], got {self.xi}")


@dataclass(frozen=True)
class BpskParams:
    bits_per_packet: int
    T_s: float   # symbol transmission time, seconds
    N_0: float   # noise power spectral density (two-sided density N_0/2)

    def __post_init__(self):
        if self.bits_per_packet < 1:
            raise ValueError(f"bits_per_packet must be >= 1, got {self.bits_per_packet}")
        if not self.T_s > 0.0:
            raise ValueError(f"T_s must be > 0, got {self.T_s}")
        if not self.N_0 > 0.0:
            raise ValueError(f"N_0 must be > 0, got {self.N_0}")


@dataclass(frozen=True)
class PowerSplit:
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")


def db_to_linear(g_db: float) -> float:
    """Power-convention dB to linear gain: 10^(g_db/10)."""
    return 10.0 ** (g_db / 10.0)


def std_normal_cdf(z: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-z / SQRT2)


def harvest_power(link: SwiptLink, split: PowerSplit) -> float:
    """Harvested power r = xi * (h_s * (1 - alpha) * p_tx + sigma_e2)."""
    return link.xi * (link.h_s * (1.0 - split.alpha) * link.p_tx + link.sigma_e2)


def bpsk_packet_success(received_power: float, bpsk: BpskParams) -> float:
    """Probability that all B bits of a BPSK packet are decoded correctly.

    Per-bit success is Phi(sqrt(2 * received_power * T_s / (B * N_0))).
    """
    if received_power < 0.0:
        raise ValueError(f"received power must be >= 0, got {received_power}")
    z = math.sqrt(2.0 * received_power * bpsk.T_s / (bpsk.bits_per_packet * bpsk.N_0))
    return std_normal_cdf(z) ** bpsk.bits_per_packet


def eta_success(link: SwiptLink, bpsk: BpskParams, split: PowerSplit) -> float:
    """Control-packet arrival probability eta(h_a * alpha * p_tx)."""
    return bpsk_packet_success(link.h_a * split.alpha * link.p_tx, bpsk)


def gamma_success(link: SwiptLink, bpsk: BpskParams, r: float) -> float:
    """Measurement-packet arrival probability gamma(h_e * r) at harvested power r."""
    return bpsk_packet_success(link.h_e * r, bpsk)


def eta_curve(link: SwiptLink, bpsk: BpskParams) -> Callable[[float], float]:
    """eta as a function of the splitting ratio (nondecreasing in alpha)."""
    return lambda alpha: eta_success(link, bpsk, PowerSplit(alpha))


def gamma_curve(link: SwiptLink, bpsk: BpskParams) -> Callable[[float], float]:
    """gamma composed with harvesting, as a function of the splitting ratio
    (nonincreasing in alpha)."""
    return lambda alpha: gamma_success(link, bpsk, harvest_power(link, PowerSplit(alpha)))
