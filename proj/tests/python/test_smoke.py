"""Smoke tests for the python module (run under ctest with PYTHONPATH set)."""

import math

import numpy as np
import pytest

import lsir


def gen(case_id=1, n=300, seed=7, rep=0, alpha_tilde=0.0, eps_scale=1.0):
    return lsir.gen_case(case_id, n, "normal", alpha_tilde, eps_scale, seed, rep)


def test_smoothing_values():
    assert lsir.hinge(2.0, 0.5) == 1.5
    assert lsir.qn(0.0, 0.0, 1.0, "uniform") == pytest.approx(0.25, abs=1e-14)
    assert lsir.qn(0.0, 0.0, 1.0, "logistic") == pytest.approx(math.log(2.0), abs=1e-12)
    assert lsir.qn_dx(0.0, 0.0, 1.0, "uniform") == pytest.approx(0.5)
    assert lsir.qn_dxx(0.0, 0.0, 2.0, "epanechnikov") == pytest.approx(0.375)


def test_penalties():
    assert lsir.soft_threshold(3.0, 1.0) == 2.0
    assert lsir.prox(5.0, 1.0, "mcp", 3.0, 1.0) == 5.0
    assert lsir.prox(1.5, 1.0, "mcp", 3.0, 1.0) == pytest.approx(0.75)
    assert lsir.pen_value(10.0, 1.0, "scad", 3.7) == pytest.approx(2.35)


def test_null_fit_recovers_linear_model():
    rng = np.random.default_rng(0)
    n = 200
    x = rng.normal(size=(n, 2))
    z = rng.normal(size=(n, 1))
    w = x[:, 0] - 1.0 * x[:, 1]
    y = 0.3 + 1.2 * w + 0.5 * z[:, 0]
    f = lsir.fit_null(y, x, z)
    assert f["alpha0"] == pytest.approx(1.2, abs=1e-8)
    assert f["beta_rest"][0] == pytest.approx(-1.0, abs=1e-8)


def test_fit_selects_single_knot_on_case1():
    d = gen(case_id=1, n=600)
    res = lsir.fit(d["y"], d["x"], d["z"], seed=3)
    assert res["m_hat"] == 1
    assert abs(res["theta"]["tau"][0] - 0.0) < 0.25
    assert res["converged"]
    names = res["parameter_names"]
    assert "tau1" in names and "beta2" in names
    cov = np.asarray(res["cov"])
    assert cov.shape == (len(names), len(names))
    assert np.all(np.linalg.eigvalsh((cov + cov.T) / 2) > -1e-8)


def test_predict_matches_truth_on_noiseless_data():
    d = gen(case_id=2, n=300, eps_scale=0.0)
    t = d["true_theta"]
    yhat = lsir.predict(d["x"], d["z"], t["alpha0"], t["alpha"], t["tau"],
                        t["beta_rest"], t["gamma0"], t["gamma"])
    assert np.max(np.abs(yhat - d["y"])) < 1e-10


def test_knot_test_determinism_and_power():
    d0 = gen(case_id=4, n=400, alpha_tilde=0.0)
    r1 = lsir.test_knots(d0["y"], d0["x"], d0["z"], n_boot=200, seed=11)
    r2 = lsir.test_knots(d0["y"], d0["x"], d0["z"], n_boot=200, seed=11)
    assert r1["crit"] == r2["crit"]
    assert r1["p_value"] == r2["p_value"]

    d1 = gen(case_id=4, n=400, alpha_tilde=1.5)
    ra = lsir.test_knots(d1["y"], d1["x"], d1["z"], n_boot=200, seed=11)
    assert ra["reject"]
    assert ra["t_stat"] > r1["t_stat"]


def test_oracle_fit_noiseless_recovery():
    d = gen(case_id=1, n=400, eps_scale=0.0)
    res = lsir.fit_oracle(d["y"], d["x"], d["z"], m_true=1)
    t = d["true_theta"]
    assert res["theta"]["alpha0"] == pytest.approx(t["alpha0"], abs=1e-3)
    assert res["theta"]["tau"][0] == pytest.approx(t["tau"][0], abs=1e-3)
    assert res["r2"] == pytest.approx(1.0, abs=1e-8)
