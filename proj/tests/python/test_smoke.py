"""Smoke tests for the Python extension module."""

import math

import numpy as np
import pytest

import nclearn


def test_noise_model_uniform():
    noise = nclearn.NoiseModel.uniform(3, 0.3)
    t = noise.t
    assert t.shape == (3, 3)
    assert t[0, 0] == pytest.approx(0.7)
    assert t[1, 0] == pytest.approx(0.15)
    assert np.allclose(t.sum(axis=0), 1.0)
    assert nclearn.NoiseModel.uniform(3, 0.6).one_norm_of_inv == pytest.approx(13.0)


def test_noise_model_from_matrix_and_inverse():
    t = np.array([[0.8, 0.3], [0.2, 0.7]])
    noise = nclearn.NoiseModel.from_matrix(t)
    assert np.allclose(noise.t_inv @ t, np.eye(2), atol=1e-12)
    assert np.allclose(nclearn.invert(t), noise.t_inv)
    with pytest.raises(RuntimeError):
        nclearn.NoiseModel.from_matrix(np.array([[0.5, 0.5], [0.6, 0.5]]))


def test_flip_labels():
    noise = nclearn.NoiseModel.identity(3)
    labels = [1, 2, 3, 2, 1]
    assert nclearn.flip_labels(labels, noise, seed=4) == labels

    noisy = nclearn.NoiseModel.uniform(3, 0.4)
    a = nclearn.flip_labels(labels * 200, noisy, seed=7)
    b = nclearn.flip_labels(labels * 200, noisy, seed=7)
    assert a == b
    assert any(x != y for x, y in zip(a, labels * 200))


def test_evaluate_golden_values():
    c = np.array([[0.4, 0.1], [0.2, 0.3]])
    assert nclearn.evaluate("qmean", c) == pytest.approx(0.316228, abs=1e-6)
    assert nclearn.evaluate("hmean", c) == pytest.approx(0.314286, abs=1e-6)
    assert nclearn.evaluate("gmean", c) == pytest.approx(0.307180, abs=1e-6)


def test_micro_f1_parts_match_direct_formula():
    rng = np.random.default_rng(0)
    a, b = nclearn.micro_f1_parts(3)
    for _ in range(50):
        c = rng.random((3, 3))
        c /= c.sum()
        direct = 1 - 2 * c[1:, 1:].trace() / (2 - c[0, :].sum() - c[:, 0].sum())
        assert (a * c).sum() / ((b * c).sum()) == pytest.approx(direct, abs=1e-12)
        assert nclearn.evaluate("microf1", c) == pytest.approx(direct, abs=1e-12)


def test_corrected_evaluation_undoes_the_channel():
    rng = np.random.default_rng(1)
    t = rng.random((3, 3)) + 2 * np.eye(3)
    t /= t.sum(axis=0, keepdims=True)
    noise = nclearn.NoiseModel.from_matrix(t)
    c = rng.random((3, 3))
    c /= c.sum()
    assert nclearn.evaluate_corrected("microf1", noise, t @ c) == pytest.approx(
        nclearn.evaluate("microf1", c), abs=1e-10
    )


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(2)
    c = rng.random((3, 3)) + 0.05
    c /= c.sum()
    g = nclearn.gradient("qmean", c)
    h = 1e-6
    for i in range(3):
        for j in range(3):
            up, down = c.copy(), c.copy()
            up[i, j] += h
            down[i, j] -= h
            fd = (nclearn.evaluate("qmean", up) - nclearn.evaluate("qmean", down)) / (2 * h)
            assert g[i, j] == pytest.approx(fd, rel=1e-4, abs=1e-8)


def test_gen_synthetic_deterministic():
    xa, ya = nclearn.gen_synthetic(500, seed=3)
    xb, yb = nclearn.gen_synthetic(500, seed=3)
    assert np.array_equal(xa, xb)
    assert ya == yb
    assert xa.shape == (500, 2)
    assert set(ya) <= {1, 2, 3}

    eta = nclearn.true_eta([0.0, 0.0])
    assert sum(eta) == pytest.approx(1.0, abs=1e-12)


def test_train_cpe_probabilities():
    x, y = nclearn.gen_synthetic(400, seed=5)
    model = nclearn.train_cpe(x, y, max_iters=200)
    probs = model.predict_proba(x[:10])
    assert probs.shape == (10, 3)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-12)
    assert (probs >= 0).all()


def test_run_ncfw_smoke():
    x, y = nclearn.gen_synthetic(600, seed=6)
    noise = nclearn.NoiseModel.uniform(3, 0.3)
    y_noisy = nclearn.flip_labels(y, noise, seed=7)
    result = nclearn.run_ncfw(x, y_noisy, noise, measure="qmean", steps=20, max_iters=150)
    assert len(result.trace_psi) == 20
    assert sum(result.weights) == pytest.approx(1.0, abs=1e-9)
    assert all(l.shape == (3, 3) for l in result.losses)

    confusion = result.expected_confusion(x, y)
    assert confusion.shape == (3, 3)
    assert confusion.sum() == pytest.approx(1.0, abs=1e-9)
    assert nclearn.evaluate("qmean", confusion) <= 1.0


def test_run_ncbs_smoke():
    x, y = nclearn.gen_synthetic(600, seed=8)
    noise = nclearn.NoiseModel.uniform(3, 0.3)
    y_noisy = nclearn.flip_labels(y, noise, seed=9)
    result = nclearn.run_ncbs(x, y_noisy, noise, steps=30, max_iters=150)
    assert len(result.gammas) == 30
    assert all(0.0 <= g <= 1.0 for g in result.gammas)
    preds = result.predict(x[:50])
    assert set(preds) <= {1, 2, 3}
    confusion = result.empirical_confusion(x, y)
    assert confusion.sum() == pytest.approx(1.0, abs=1e-12)


def test_bayes_oracle_runs_small():
    value = nclearn.bayes_oracle("qmean", 3, eval_points=20000, seed=10, steps=200)
    assert 0.0 <= value <= 1.0
    assert math.isfinite(value)
