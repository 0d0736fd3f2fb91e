import math

import pytest

import m2msim

SMALL = {"mtc_count": 2, "slots_per_frame": 5, "horizon": 5, "frames": 1, "grid_step": 0.1}


def test_effective_config_has_defaults():
    cfg = m2msim.effective_config()
    assert cfg["access_bandwidth"] == "5 MHz"
    assert cfg["tx_power"] == "100 mW"
    assert m2msim.effective_config({"mtc_count": 3})["mtc_count"] == 3


def test_bad_config_raises():
    with pytest.raises(m2msim.ConfigError):
        m2msim.effective_config({"no_such_key": 1})
    with pytest.raises(ValueError):
        m2msim.effective_config({"zeta": 0.7, "eta": 0.2})


def test_uplink_rate_matches_shannon():
    rate = m2msim.uplink_rate(5e6, 0.1, 1.0, 1e-3)
    assert rate == pytest.approx(5e6 * math.log2(101), rel=1e-12)
    busy = m2msim.uplink_rate(5e6, 0.1, 1.0, 1e-3, busy=True, interferer_power_w=0.1, interferer_gain=1.0)
    assert busy == pytest.approx(5e6 * math.log2(1 + 0.1 / 0.101), rel=1e-12)


def test_posterior_after_idle_observation():
    predicted = 0.5 * 0.8 + 0.5 * 0.85
    expected = predicted * 0.9 / (predicted * 0.9 + (1 - predicted) * 0.1)
    assert m2msim.posterior_idle(0.5, True) == pytest.approx(expected, rel=1e-14)


def test_sweep_rows():
    rows = m2msim.sweep("cycles", dict(SMALL, sweep_cycles=[4e8, 8e8], policies=["local_only"]))
    assert [r["axis"] for r in rows] == [4e8, 8e8]
    assert rows[0]["mean_cost"] == pytest.approx(0.5 * 0.8 + 0.5 * 4e8 * 2.5e-12)
    with pytest.raises(m2msim.ConfigError):
        m2msim.sweep("bandwidth", SMALL)


def test_solve_policy_document():
    doc = m2msim.solve_policy(SMALL)
    assert doc["format"] == "m2m-policy"
    assert doc["kind"] == "pomdp"
