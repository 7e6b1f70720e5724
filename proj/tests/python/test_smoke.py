"""Smoke tests for the compiled extension: one pass through each operation
family with values cross-checked against the C++ suites' expectations."""

import math

import numpy as np
import pytest

import hackint


def test_ols_and_ate_interval():
    x = np.ones((2, 1))
    y = np.array([3.0, 5.0])
    fit = hackint.fit_ols(x, y)
    assert fit.beta_ls[0] == pytest.approx(4.0)
    assert fit.sse == pytest.approx(2.0)

    rng = np.random.default_rng(7)
    n, p = 40, 3
    xt = rng.normal(size=(n, p))
    w = (rng.random(n) > 0.5).astype(float)
    w[:2] = [0.0, 1.0]
    yt = xt[:, 0] + 1.5 * w + rng.normal(size=n)
    fit_t = hackint.fit_ols(xt, yt, w)
    theta = hackint.resolve_theta(fit_t.sse, theta_rel=0.2)
    iv = hackint.ate_interval(fit_t, theta)
    assert iv.lower <= fit_t.beta0_ls <= iv.upper
    width = 2.0 * math.sqrt(fit_t.v_tt) * math.sqrt(theta - fit_t.sse)
    assert iv.width() == pytest.approx(width, rel=1e-12)


def test_prediction_interval_constant_model():
    fit = hackint.fit_ols(np.ones((2, 1)), np.array([0.0, 2.0]))
    iv = hackint.prediction_interval(fit, np.array([1.0]), 4.0)
    assert iv.lower == pytest.approx(0.0)
    assert iv.upper == pytest.approx(2.0)


def test_sign_flip_and_ci_check():
    rng = np.random.default_rng(3)
    n = 50
    x = rng.normal(size=(n, 2))
    w = (rng.random(n) > 0.5).astype(float)
    w[:2] = [0.0, 1.0]
    y = x[:, 0] - 0.7 * w + rng.normal(size=n)
    fit = hackint.fit_ols(x, y, w)

    theta0 = hackint.resolve_theta(fit.sse, sign_flip=True, fit=fit)
    iv = hackint.ate_interval(fit, theta0)
    assert min(abs(iv.lower), abs(iv.upper)) < 1e-8

    rep = hackint.classical_ci_equivalence_check(fit, 0.05, "ate")
    assert rep.max_abs_gap < 1e-9


def test_generalization_bound_values():
    assert hackint.generalization_bound(50, 100, 0.05) == pytest.approx(2.08579, abs=1e-4)
    with pytest.raises(hackint.HackintError):
        hackint.generalization_bound(2, 100, 0.05)


def test_svm_interval_contains_baseline():
    rng = np.random.default_rng(11)
    n = 12
    x = np.vstack(
        [rng.normal(size=(n // 2, 2)) - [1.2, 0], rng.normal(size=(n // 2, 2)) + [1.2, 0]]
    )
    y = np.array([-1.0] * (n // 2) + [1.0] * (n // 2))
    model, min_loss = hackint.svm_min_loss(x, y, 1.0)
    x_new = np.array([1.0, 0.2])
    res = hackint.svm_hacking_interval(x, y, 1.0, x_new, 1.1 * min_loss, seed=1)
    base = model.decision(x_new)
    assert res.interval.lower <= base <= res.interval.upper
    assert not res.degraded


def test_knn_hand_instance():
    x = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([0.0, 1.0, 1.0, 0.0])
    iv, trace = hackint.knn_interval(x, y, np.array([2.2]), 1, 3)
    assert iv.lower == pytest.approx(2.0 / 3.0)
    assert iv.upper == pytest.approx(1.0)
    assert len(trace) == 3


def test_feature_interval():
    res = hackint.new_feature_interval(1.25, 1.5, 0.3, 0.2)
    assert res.interval.lower == pytest.approx(1.1, abs=1e-4)
    assert res.af_max == pytest.approx(1.136364, abs=1e-5)


def test_pca_report():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(12, 6))
    rep = hackint.subset_hacking_report(x, q=2, k=2, theta_prime=100.0)
    assert rep.total_subsets == 15
    assert rep.num_within == 15
    assert rep.features_covered == 6
    assert rep.max_hamming == 4
    assert hackint.subset_loss(x, [0, 1, 2, 3, 4, 5], 2) == pytest.approx(0.0, abs=1e-10)


def test_kernel_predict_mean():
    x = np.array([[0.0], [1.0]])
    y = np.array([2.0, 4.0])
    a = np.zeros((1, 1))
    assert hackint.kernel_predict(a, 1.0, x, y, np.array([5.0])) == pytest.approx(3.0)


def test_oracle_roundtrip():
    y = [0.0, 2.0]

    def loss(p):
        return sum((p[0] - v) ** 2 for v in y)

    def stat(p):
        return p[0]

    res = hackint.brute_force_interval(loss, stat, 4.0, [(-5.0, 5.0)], samples=5000, seed=1)
    assert res["lower"] == pytest.approx(0.0, abs=1e-3)
    assert res["upper"] == pytest.approx(2.0, abs=1e-3)
