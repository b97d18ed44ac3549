import numpy as np
import pytest

import optrate


def test_scenarios_listed():
    assert "flatness" in optrate.scenario_names()
    assert len(optrate.scenario_names()) == 6


def test_l1_projection():
    v = np.array([3.0, -1.0, 0.5])
    p = optrate.project_l1_ball(v, 1.0)
    assert np.isclose(np.abs(p).sum(), 1.0)
    assert np.allclose(p, [1.0, 0.0, 0.0])
    inside = np.array([0.1, -0.2])
    assert np.allclose(optrate.project_l1_ball(inside, 1.0), inside)


def test_minnorm_matches_numpy():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((8, 20))
    Y = rng.standard_normal(8)
    w = optrate.least_squares_minnorm(X, Y)
    assert np.allclose(w, np.linalg.pinv(X) @ Y, atol=1e-9)


def test_psi_endpoints():
    assert optrate.statistical_dimension_psi(0.0) == 0.0
    assert optrate.statistical_dimension_psi(1.0) == 1.0
    assert optrate.chi_mean(1) == pytest.approx(np.sqrt(2.0 / np.pi))


def test_small_scenario_run():
    r = optrate.run_scenario("near-erm", ["n_list=512,1024", "trials_base=2", "c=0"])
    assert r["scenario"] == "near-erm"
    assert r["all_pass"]
    assert r["rows"]
    csv = optrate.scenario_csv("near-erm", ["n_list=512,1024", "trials_base=2", "c=0"])
    lines = [l for l in csv.splitlines() if not l.startswith("#")]
    assert lines[0] == "scenario,trial,x_key,x_value,quantity,value"


def test_bad_override_raises():
    with pytest.raises(optrate.ConfigError):
        optrate.run_scenario("lasso", ["no_such_key=1"])
