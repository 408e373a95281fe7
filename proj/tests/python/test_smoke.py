"""Smoke tests for the python module against closed-form oracles."""

import math

import numpy as np
import pytest

import infofit


def gauss_pair(n, rho, seed):
    rng = np.random.default_rng(seed)
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    return z1, rho * z1 + math.sqrt(1 - rho * rho) * z2


def test_version():
    assert infofit.__version__ == "0.1.0"


def test_entropy_uniform_near_zero():
    rng = np.random.default_rng(1)
    r = infofit.entropy_knn(rng.random(8000))
    assert abs(r.value_nats) <= 0.05
    assert r.k == 3 and r.n == 8000


def test_gaussian_mi_matches_closed_form():
    x, y = gauss_pair(2000, 0.9, 2)
    oracle = -0.5 * math.log(1 - 0.81)
    r = infofit.mi_ksg(x, y)
    assert abs(r.value_nats - oracle) <= 0.1


def test_mi_invariant_under_monotone_maps():
    x, y = gauss_pair(2000, 0.9, 3)
    base = infofit.mi_ksg(x, y).value_nats
    transformed = infofit.mi_ksg(np.exp(x), y**3).value_nats
    assert abs(base - transformed) <= 0.05


def test_kl_between_shifted_gaussians():
    rng = np.random.default_rng(4)
    p = rng.standard_normal(4000)
    q = rng.standard_normal(4000) + 1.0
    assert abs(infofit.kl_knn(p, q).value_nats - 0.5) <= 0.1
    assert abs(infofit.kl_to_gaussian(p, 1.0, 1.0).value_nats - 0.5) <= 0.1


def test_mixed_mi_of_threshold_labels():
    rng = np.random.default_rng(5)
    values = rng.random(4000)
    labels = (values > np.median(values)).astype(int)
    r = infofit.mi_mixed(values, labels.tolist())
    assert abs(r.value_nats - math.log(2)) <= 0.07


def test_toy_series_degenerate_cases():
    t = np.linspace(0.0, 3.0, 100).tolist()
    x, y, z = infofit.toy_generate(0.0, 3.0, "linear", t, noise_std=0.0)
    assert all(v == 1.0 for v in x)
    assert infofit.toy_candidate(2.0, [0.5])[0] == pytest.approx(math.exp(-1.0))


def test_integration_conserves_resources_without_loss_terms():
    p = infofit.CogParams()
    p.k_w = 0.0
    p.k_r = 0.0
    traj = infofit.integrate_schedule(p, [("on", 20.0), ("off", 20.0)], step=0.01)
    total = p.A0_init + p.B0_init
    drift = max(abs(a + b - total) for a, b in zip(traj.A, traj.B))
    assert drift <= 1e-8
    assert len(traj.a_end) == 1
    assert traj.clamp_events == 0


def test_schedule_sampling_is_seeded():
    s1 = infofit.sample_schedule(50, seed=9)
    s2 = infofit.sample_schedule(50, seed=9)
    assert s1 == s2
    assert len(s1) == 100
    assert s1[0][0] == "on"


def test_dataset_and_objective_round_trip(tmp_path):
    params = infofit.CogParams()
    data = infofit.generate_dataset(params, n_series=2, n_tasks=60, master_seed=11, step=0.02)
    assert data.total_tasks() == 120
    assert 0.2 <= data.success_rate() <= 0.8

    v = infofit.evaluate_objective("mi", data, params, step=0.02)
    assert np.isfinite(v.value_nats)
    assert v.fc > 0.0
    assert v.n_correct + v.n_incorrect == 120

    infofit.save_dataset(data, str(tmp_path / "ds"))
    loaded = infofit.load_dataset(str(tmp_path / "ds"))
    assert loaded.pooled_a_end_true() == data.pooled_a_end_true()
    assert loaded.pooled_outcomes() == data.pooled_outcomes()


def test_spsa_quadratic_with_python_callable():
    target = np.array([1.0, -0.5, 0.25])

    def evaluate(x):
        return float(np.sum((np.asarray(x) - target) ** 2)), 1.0

    result = infofit.spsa_minimize(
        evaluate, np.zeros(3), iterations=1500, seed=12, bounds=[(-5.0, 5.0)] * 3
    )
    assert np.linalg.norm(np.asarray(result.x_best) - target) <= 0.05
    assert result.n_evals == 3000


def test_run_sweep_over_dataset():
    params = infofit.CogParams()
    data = infofit.generate_dataset(params, n_series=2, n_tasks=50, master_seed=13, step=0.05)
    curve = infofit.run_sweep("k_w", [0.1, 0.2, 0.4], "mi", data, step=0.05)
    assert len(curve.values) == 3
    assert curve.errors == ["", "", ""]
    assert curve.argopt in (0, 1, 2)
