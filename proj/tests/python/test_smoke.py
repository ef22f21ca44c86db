"""Smoke tests for the python bindings: the main operations are reachable and
agree with their documented behavior on small inputs."""

import math

import pytest

import calbench as cb


def test_simulate_determinism():
    p = cb.default_true_params("ar1")
    a = cb.simulate("ar1", p, 200, 7)
    b = cb.simulate("ar1", p, 200, 7)
    assert a.values == b.values
    assert len(a.values) == 200


def test_ar1_zero_noise_recurrence_via_moments():
    p = cb.default_true_params("ar1")
    out = cb.simulate("ar1", p, 1000, 3)
    m = cb.compute_moments(out.values)
    assert len(m) == 7
    assert m[2] == pytest.approx(0.7, abs=0.1)  # lag-1 autocorrelation near a1


def test_first_difference():
    p = cb.default_true_params("rw_break")
    out = cb.simulate("rw_break", p, 50, 3)
    d = cb.first_difference(out)
    assert len(d.values) == 49
    assert "first-difference" in d.transforms


def test_param_vector_roundtrip():
    p = cb.ParamVector([("x", 0.5, 0.0, 1.0), ("y", -1.0, -2.0, 2.0)])
    assert p.names() == ["x", "y"]
    assert p.values() == [0.5, -1.0]
    p.set("x", 0.25)
    assert p.get("x") == 0.25
    with pytest.raises(ValueError):
        p.set("x", 5.0)


def test_criteria_prefer_generating_parameters():
    truth_p = cb.default_true_params("ar1")
    real = cb.simulate("ar1", truth_p, 500, 0).values

    def ensemble(a1):
        p = cb.ParamVector([("a1", a1, 0.0, 1.0)])
        return [cb.simulate("ar1", p, 500, 1 + k).values for k in range(30)]

    near, far = ensemble(0.7), ensemble(0.05)
    assert cb.gsl_div(real, near) < cb.gsl_div(real, far)
    q = cb.default_quantizer("ar1")
    assert cb.mic_objective(real, near, q) < cb.mic_objective(real, far, q)
    assert cb.msm_objective(real, near) < cb.msm_objective(real, far)
    assert cb.kde_log_likelihood(real, near) > cb.kde_log_likelihood(real, far)


def test_gsl_shift_invariance():
    truth_p = cb.default_true_params("ar1")
    real = cb.simulate("ar1", truth_p, 400, 0).values
    ens = [cb.simulate("ar1", truth_p, 400, 1 + k).values for k in range(10)]
    shifted = [v + 5.0 for v in real]
    assert cb.gsl_div(shifted, ens) == cb.gsl_div(real, ens)


def test_optimizers_on_sphere():
    space = cb.ParamVector([("x", 0.0, -5.0, 5.0), ("y", 0.0, -5.0, 5.0)])

    def sphere(v):
        return sum(x * x for x in v)

    best, value, evals = cb.pso_minimize(sphere, space, swarm=20, budget=600, seed=1)
    assert value < 1e-2
    assert evals <= 600

    best, value, evals = cb.cors_minimize(sphere, space, budget=60, seed=1)
    assert value < 0.5
    assert evals == 60


def test_mh_sample_normal_target():
    space = cb.ParamVector([("z", 0.0, -8.0, 8.0)])
    chains, rates, mean_items = cb.mh_sample(
        lambda x: -0.5 * x[0] * x[0], space, chains=2, draws=2000, burn_in=500, seed=3
    )
    assert len(chains) == 2
    (name, mean, lo, hi) = mean_items[0]
    assert name == "z"
    assert abs(mean) < 0.3


def test_stat_tests():
    r = cb.ks_two_sample([1.0, 2.0, 3.0], [10.0, 11.0])
    assert r.statistic == pytest.approx(1.0)
    trend = [float(i) for i in range(1000)]
    s = cb.stationarity_runs_test(trend)
    assert s.p_value < 0.01


def test_degenerate_series_raises():
    with pytest.raises(Exception):
        cb.compute_moments([1.0] * 100)
