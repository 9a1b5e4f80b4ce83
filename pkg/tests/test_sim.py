import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from solon.adversary import AttackSpec
from solon.codec import build_allocation, make_weights, validate_config
from solon.errors import DecodeError
from solon.sim import (
    TrainTask,
    gen_dataset,
    loss,
    optimum,
    run_round,
    run_training,
    sample_gradient,
    sample_loss,
    vanilla_step,
    worker_gradients,
)


def test_dataset_deterministic():
    a, b = gen_dataset(3, 50, 4, 0.1), gen_dataset(3, 50, 4, 0.1)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)
    assert not np.array_equal(a.X, gen_dataset(4, 50, 4, 0.1).X)


def test_noiseless_targets_planted():
    p = gen_dataset(0, 40, 5)
    assert np.array_equal(p.y, p.X @ p.w_star)
    assert loss(p, p.w_star) < 1e-28


def test_optimum_recovers_planted():
    sigma, n = 0.1, 256
    p = gen_dataset(1, n, 20, sigma)
    w_opt, _ = optimum(p)
    assert np.all(np.abs(w_opt - p.w_star) <= 3 * sigma / np.sqrt(n))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_gradient_finite_difference(seed):
    rng = np.random.default_rng(seed)
    x, w = rng.standard_normal((2, 6))
    y = rng.standard_normal()
    g = sample_gradient(x, y, w)
    h = 1e-6
    fd = np.array([
        (sample_loss(x, y, w + h * e) - sample_loss(x, y, w - h * e)) / (2 * h) for e in np.eye(6)
    ])
    assert np.linalg.norm(g - fd) <= 1e-5 * max(np.linalg.norm(g), 1.0)


def test_stationary_at_optimum():
    p = gen_dataset(2, 30, 4)
    G = worker_gradients(p, p.w_star, np.arange(30))
    assert np.abs(G.sum(axis=1)).max() < 1e-12


def test_duplicate_samples_identical_columns():
    p = gen_dataset(2, 30, 4)
    G = worker_gradients(p, np.ones(4), np.array([7, 3, 7]))
    assert np.array_equal(G[:, 0], G[:, 2])


def _setup(m=8):
    cfg = validate_config(12, 2, 2, m)
    task = TrainTask(n=64, m=m, gamma=0.5, iterations=30, seed=1)
    return cfg, task, gen_dataset(task.seed, task.n, task.m), make_weights(cfg)


def test_round_matches_vanilla():
    cfg, task, p, w = _setup()
    x = np.random.default_rng(0).standard_normal(8)
    nxt, row = run_round(p, x, task, cfg, w, AttackSpec.none(), 4)
    ref = vanilla_step(p, x, task, cfg.P, 4)
    assert np.linalg.norm(nxt - ref) <= 1e-10 * np.linalg.norm(ref)
    assert row.located == frozenset() and row.recovery_error < 1e-10


def test_zero_gradient_round():
    cfg, task, p, w = _setup()
    nxt, _ = run_round(p, p.w_star, task, cfg, w, AttackSpec("constant", -100.0, (0, 5)), 0)
    assert np.allclose(nxt, p.w_star, rtol=0, atol=1e-12)


def test_revgrad_round_unchanged():
    cfg, task, p, w = _setup()
    x = np.zeros(8)
    clean, _ = run_round(p, x, task, cfg, w, AttackSpec.none(), 2)
    att, row = run_round(p, x, task, cfg, w, AttackSpec("rev-grad", -100.0, (1, 7)), 2)
    assert np.linalg.norm(att - clean) <= 1e-6 * np.linalg.norm(clean)
    assert row.located == row.truth == {1, 7}


def test_constant_attack_loss_curve():
    cfg, task, p, w = _setup()
    a = run_training(task, cfg, AttackSpec.none(), w, p).losses
    b = run_training(task, cfg, AttackSpec("constant", -100.0, count=2), w, p).losses
    assert np.allclose(a, b, rtol=1e-5, atol=1e-12)


def test_zero_learning_rate():
    cfg, _, p, w = _setup()
    task = TrainTask(n=64, m=8, gamma=0.0, iterations=5, seed=1)
    losses = run_training(task, cfg, None, w, p).losses
    assert np.all(losses == losses[0])


def test_converges_to_optimum():
    cfg = validate_config(12, 2, 2, 8)
    task = TrainTask(n=64, m=8, gamma=0.5, iterations=200, seed=1)
    run = run_training(task, cfg, AttackSpec("alie", 1.0, count=2))
    _, best = optimum(gen_dataset(1, 64, 8))
    assert run.final_loss - best < 1e-6


def test_threads_identical():
    cfg, task, p, w = _setup()
    spec = AttackSpec("gaussian", 1.0, count=2, resample=True)
    a = run_training(task, cfg, spec, w, p, threads=1, keep_path=True)
    b = run_training(task, cfg, spec, w, p, threads=4, keep_path=True)
    assert all(np.array_equal(x, y) for x, y in zip(a.weights_path, b.weights_path))


def test_dimension_guard():
    cfg = validate_config(4, 1, 2, 3)
    with pytest.raises(ValueError):
        run_training(TrainTask(m=4, iterations=1), cfg)


def test_decode_failure_propagates(monkeypatch):
    import solon.sim as sim

    def broken(*args, **kwargs):
        raise DecodeError("boom", group=0)

    monkeypatch.setattr(sim, "decode", broken)
    cfg, task, p, w = _setup()
    with pytest.raises(DecodeError, match="iteration 3"):
        run_round(p, np.zeros(8), task, cfg, w, AttackSpec.none(), 3, A=build_allocation(cfg))
