"""Optimizer update rules against hand-evaluated oracles and properties."""

import numpy as np
import pytest

from dasvdd.optim import Adam, AdaGrad


def test_adam_zero_gradient_no_decay():
    w = np.array([1.0, -2.0])
    Adam(lr=0.01).step([w], [np.zeros(2)])
    assert np.array_equal(w, np.array([1.0, -2.0]))


def test_adam_first_step_oracle():
    # m=0.1, v=0.001, bias-corrected to 1 and 1, so the step is -lr/(1+eps)
    w = np.array([0.0])
    Adam(lr=0.001).step([w], [np.array([1.0])])
    assert abs(w[0] + 0.001) < 1e-9


def test_adam_weight_decay_acts_at_zero_gradient():
    w = np.array([1.0])
    Adam(lr=0.001, weight_decay=1e-7).step([w], [np.array([0.0])])
    assert w[0] != 1.0
    assert w[0] < 1.0  # decay pulls toward zero


def test_adam_step_magnitude_bound():
    rng = np.random.default_rng(5)
    w = rng.normal(size=(3, 4))
    opt = Adam(lr=0.05)
    for _ in range(50):
        before = w.copy()
        opt.step([w], [rng.normal(size=(3, 4)) * 10.0 ** rng.integers(-3, 4)])
        assert np.abs(w - before).max() <= 0.05 * 1.01


def test_adam_deterministic():
    grads = [np.array([0.3, -0.2]), np.array([-1.0, 2.0]), np.array([0.0, 0.1])]
    results = []
    for _ in range(2):
        w = np.array([0.5, -0.5])
        opt = Adam(lr=0.01, weight_decay=1e-7)
        for g in grads:
            opt.step([w], [g])
        results.append(w)
    assert np.array_equal(results[0], results[1])


def test_adam_shape_errors():
    opt = Adam(lr=0.01)
    w = np.zeros(3)
    with pytest.raises(ValueError):
        opt.step([w], [np.zeros(2)])
    with pytest.raises(ValueError):
        opt.step([w], [np.zeros(3), np.zeros(3)])


def test_adam_rejects_bad_hyperparameters():
    with pytest.raises(ValueError):
        Adam(lr=0.0)
    with pytest.raises(ValueError):
        Adam(lr=0.01, beta1=1.0)
    with pytest.raises(ValueError):
        Adam(lr=0.01, weight_decay=-1.0)


def test_adagrad_first_step_oracle():
    c = np.array([0.0])
    AdaGrad(lr0=1.0, decay=0.1).step(c, np.array([2.0]))
    # accumulator 4 before the update, so the step is -1 * 2/(2 + 1e-10)
    assert abs(c[0] + 2.0 / (2.0 + 1e-10)) < 1e-15
    assert abs(c[0] + 1.0) < 1e-9


def test_adagrad_second_step_oracle():
    c = np.array([0.0])
    opt = AdaGrad(lr0=1.0, decay=0.1)
    opt.step(c, np.array([2.0]))
    before = c[0]
    opt.step(c, np.array([2.0]))
    expected = (1.0 / 1.1) * 2.0 / (np.sqrt(8.0) + 1e-10)
    assert abs(abs(c[0] - before) - expected) < 1e-12


def test_adagrad_zero_gradient():
    c = np.array([1.5, -0.5])
    opt = AdaGrad(lr0=1.0, decay=0.1)
    opt.step(c, np.zeros(2))
    assert np.array_equal(c, np.array([1.5, -0.5]))
    assert np.array_equal(opt._accum, np.zeros(2))


def test_adagrad_accumulator_monotone():
    rng = np.random.default_rng(11)
    c = np.zeros(4)
    opt = AdaGrad(lr0=0.5, decay=0.1)
    prev = np.zeros(4)
    for _ in range(30):
        opt.step(c, rng.normal(size=4))
        assert (opt._accum >= prev).all()
        prev = opt._accum.copy()


def test_adagrad_steps_shrink_under_constant_gradient():
    c = np.zeros(1)
    opt = AdaGrad(lr0=1.0, decay=0.1)
    deltas = []
    for _ in range(10):
        before = c[0]
        opt.step(c, np.array([1.0]))
        deltas.append(abs(c[0] - before))
    assert all(a >= b for a, b in zip(deltas, deltas[1:]))


def test_adagrad_shape_error():
    opt = AdaGrad(lr0=1.0)
    with pytest.raises(ValueError):
        opt.step(np.zeros(3), np.zeros(2))


def test_adagrad_rejects_bad_hyperparameters():
    with pytest.raises(ValueError):
        AdaGrad(lr0=0.0)
    with pytest.raises(ValueError):
        AdaGrad(lr0=1.0, decay=-0.1)
