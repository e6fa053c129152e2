"""Wireless link-rate model: free-space propagation, AWGN SNR, Shannon capacity."""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class LinkBudget:
    """Radio constants of one wireless link, in linear units."""

    bandwidth_hz: float
    tx_power_w: float
    tx_gain: float  # linear ratio
    rx_gain: float  # linear ratio
    noise_dbm_per_hz: float  # noise PSD, e.g. -174 dBm/Hz
    carrier_hz: float

    def __post_init__(self):
        for name in ("bandwidth_hz", "tx_power_w", "tx_gain", "rx_gain", "carrier_hz"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def from_db(
        cls,
        bandwidth_hz: float,
        tx_power_w: float,
        tx_gain_dbi: float,
        rx_gain_dbi: float,
        noise_dbm_per_hz: float,
        carrier_hz: float,
    ) -> "LinkBudget":
        return cls(
            bandwidth_hz=bandwidth_hz,
            tx_power_w=tx_power_w,
            tx_gain=10.0 ** (tx_gain_dbi / 10.0),
            rx_gain=10.0 ** (rx_gain_dbi / 10.0),
            noise_dbm_per_hz=noise_dbm_per_hz,
            carrier_hz=carrier_hz,
        )

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def noise_w_per_hz(self) -> float:
        return 10.0 ** ((self.noise_dbm_per_hz - 30.0) / 10.0)

    @property
    def noise_power_w(self) -> float:
        return self.noise_w_per_hz * self.bandwidth_hz


def received_power(budget: LinkBudget, d: float) -> float:
    """Free-space received power in watts at distance d meters."""
    if d <= 0:
        raise ValueError("free-space model requires d > 0")
    return budget.tx_power_w * budget.rx_gain * budget.tx_gain * (
        budget.wavelength_m / (4.0 * math.pi * d)
    ) ** 2


def snr(budget: LinkBudget, d: float) -> float:
    """Signal-to-noise ratio over the full channel bandwidth."""
    return received_power(budget, d) / budget.noise_power_w


def link_rate(budget: LinkBudget, d: float) -> float:
    """Shannon-capacity transmission rate in bits/second at distance d."""
    return budget.bandwidth_hz * math.log2(1.0 + snr(budget, d))


def transmission_delay(size_bits: float, rate: float) -> float:
    """Seconds needed to push size_bits through a link at `rate` bits/second."""
    if rate <= 0:
        raise ValueError("rate must be strictly positive")
    if size_bits < 0:
        raise ValueError("size_bits must be nonnegative")
    return size_bits / rate
