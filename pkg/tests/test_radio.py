import math

import numpy as np
import pytest

from vfogsim.radio import (
    SPEED_OF_LIGHT,
    LinkBudget,
    link_rate,
    received_power,
    snr,
    transmission_delay,
)

# default experiment budget: 40 MHz, 1 W, 5 dBi gains, -174 dBm/Hz, 5.9 GHz
BUDGET = LinkBudget.from_db(40e6, 1.0, 5.0, 5.0, -174.0, 5.9e9)


def db_domain_link_rate(budget: LinkBudget, d: float) -> float:
    """Independent oracle: assemble the whole link budget in dB, then convert."""
    pr_dbw = (
        10 * math.log10(budget.tx_power_w)
        + 10 * math.log10(budget.tx_gain)
        + 10 * math.log10(budget.rx_gain)
        + 20 * math.log10(budget.wavelength_m / (4 * math.pi * d))
    )
    noise_dbw = (budget.noise_dbm_per_hz - 30.0) + 10 * math.log10(budget.bandwidth_hz)
    snr_db = pr_dbw - noise_dbw
    return budget.bandwidth_hz * math.log2(1.0 + 10 ** (snr_db / 10.0))


class TestReceivedPower:
    def test_unity_identity(self):
        budget = LinkBudget(bandwidth_hz=1.0, tx_power_w=1.0, tx_gain=1.0, rx_gain=1.0,
                            noise_dbm_per_hz=-174.0, carrier_hz=1e9)
        d = budget.wavelength_m / (4 * math.pi)  # makes the path term exactly 1
        assert received_power(budget, d) == pytest.approx(1.0, rel=1e-12)

    def test_golden_500m(self):
        assert received_power(BUDGET, 500.0) == pytest.approx(6.54e-10, rel=0.01)

    def test_inverse_square(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            d = rng.uniform(1.0, 700.0)
            assert received_power(BUDGET, 2 * d) == pytest.approx(
                received_power(BUDGET, d) / 4.0, rel=1e-12
            )

    def test_zero_distance_rejected(self):
        with pytest.raises(ValueError):
            received_power(BUDGET, 0.0)


class TestLinkRate:
    def test_golden_values(self):
        assert snr(BUDGET, 500.0) == pytest.approx(4.11e3, rel=0.01)
        assert link_rate(BUDGET, 500.0) == pytest.approx(4.80e8, rel=0.01)
        assert link_rate(BUDGET, 100.0) == pytest.approx(6.66e8, rel=0.01)

    def test_unit_audit_against_db_domain(self):
        for d in (10.0, 100.0, 500.0, 707.0):
            assert link_rate(BUDGET, d) == pytest.approx(
                db_domain_link_rate(BUDGET, d), rel=1e-12
            )

    def test_strictly_decreasing(self):
        rng = np.random.default_rng(8)
        for _ in range(1000):
            d1, d2 = sorted(rng.uniform(0.5, 710.0, 2))
            if d1 == d2:
                continue
            assert link_rate(BUDGET, d1) > link_rate(BUDGET, d2)

    def test_snr_usable_within_region(self):
        # max distance from center of the 1000x1000 region is ~707 < 710 m
        for d in np.linspace(1.0, 710.0, 200):
            assert snr(BUDGET, d) > 1.0

    def test_zero_distance_propagates(self):
        with pytest.raises(ValueError):
            link_rate(BUDGET, 0.0)


class TestTransmissionDelay:
    def test_zero_size(self):
        assert transmission_delay(0.0, 123.0) == 0.0

    def test_hand_values(self):
        assert transmission_delay(2.0e7, 4.80e8) == pytest.approx(0.0417, rel=0.01)
        assert transmission_delay(1e9, 1e9) == 1.0

    def test_bad_rate_rejected(self):
        with pytest.raises(ValueError):
            transmission_delay(1.0, 0.0)
        with pytest.raises(ValueError):
            transmission_delay(1.0, -5.0)
        with pytest.raises(ValueError):
            transmission_delay(-1.0, 5.0)


class TestLinkBudget:
    def test_linear_conversions(self):
        assert BUDGET.tx_gain == pytest.approx(10 ** 0.5)
        assert BUDGET.noise_power_w == pytest.approx(10 ** (-20.4) * 40e6, rel=1e-12)
        assert BUDGET.wavelength_m == pytest.approx(SPEED_OF_LIGHT / 5.9e9)

    def test_positive_invariants(self):
        with pytest.raises(ValueError):
            LinkBudget(bandwidth_hz=0.0, tx_power_w=1.0, tx_gain=1.0, rx_gain=1.0,
                       noise_dbm_per_hz=-174.0, carrier_hz=1e9)
