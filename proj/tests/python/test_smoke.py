import math

import pytest

import dpre


def test_bracket_contains_renewal_value():
    b = dpre.free_energy_bracket(0.5, 4096)
    assert b.width <= 2e-3
    assert b.contains(dpre.free_energy_oracle(0.5))
    assert b.lower <= 0.08411 <= b.upper
    assert dpre.free_energy_bracket(0.0, 64).upper == 0.0


def test_oracle_suite_passes():
    rep = dpre.oracle_suite(seed=3, instances=20)
    assert rep["pass"]
    assert len(rep["rows"]) == 5


def test_partition_functions_are_consistent():
    # beta = 0: the quenched partition function is the annealed one.
    z = dpre.quenched_log_partition(0.0, 1.0, 40, seed=7)
    assert z == pytest.approx(dpre.annealed_log_mgf(0.0, 40), abs=1e-12)
    assert dpre.annealed_log_mgf(0.0, 40) == pytest.approx(0.0, abs=1e-12)
    # Pinned endpoint: probability of returning to 0 at time 2.
    assert dpre.annealed_log_mgf(0.0, 2, end_point=0) == pytest.approx(math.log(0.5))
    a = dpre.quenched_log_partition(0.5, 1.0, 64, seed=11)
    b = dpre.quenched_log_partition(0.5, 1.0, 64, seed=11)
    assert a == b


def test_hitting_time_tail():
    pmf = dpre.hitting_time_pmf(2000)
    assert 2000 ** 1.5 * pmf[-1] == pytest.approx(math.sqrt(1 / (4 * math.pi)), rel=0.05)


def test_quenched_below_annealed():
    e = dpre.quenched_free_energy(0.6, 0.5, 256, samples=30, seed=2)
    assert e["count"] == 30
    assert e["mean"] <= dpre.annealed_free_energy(0.6, 0.5, 256) + 3 * e["std_error"]


def test_coarse_grain_certificate():
    r = dpre.coarse_grain(0.25, 2.0, 0.3, seed=5, k0=2, horizon=10)
    assert r["geometry"]["N"] == 24
    assert r["path"] is not None
    c = r["certificate"]
    assert abs(c["log_corridor_z"] - c["link_sum"]) <= 1e-8
    assert c["log_corridor_z"] >= c["log_threshold_product"]
    assert c["free_energy_lower"] > c["lambda"]


def test_lowest_lipschitz():
    heights = 4
    open_ = [[True] * heights for _ in range(7)]
    open_[3][0] = False
    assert dpre.lowest_lipschitz(open_, heights) == [0, 0, 0, 1, 0, 0, 0]
    open_[2] = [False] * heights
    assert dpre.lowest_lipschitz(open_, heights) is None
    assert dpre.lss_threshold(1) == pytest.approx(0.75)


def test_bad_arguments_raise():
    with pytest.raises(ValueError):
        dpre.free_energy_bracket(0.5, 7)
    with pytest.raises(ValueError):
        dpre.cumulant("cauchy", 0.1)
