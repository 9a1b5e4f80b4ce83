"""Deterministic parameter-server simulation on a synthetic least-squares task.

Each round draws a mini-batch of B = P samples (one per gradient slot),
computes the per-sample gradients, encodes them with the block code, lets
the adversaries tamper with their outputs, decodes, and takes the step
``w <- w - (gamma / P) * u``.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field

import numpy as np

from .adversary import AttackKind, AttackSpec, inject, select_adversaries
from .codec import build_allocation, encode_all, make_weights, pad_gradients
from .decoder import decode
from .errors import DecodeError


@dataclass(frozen=True)
class TrainTask:
    n: int = 256
    m: int = 8
    noise_sigma: float = 0.0
    gamma: float = 0.1
    iterations: int = 200
    seed: int = 0


@dataclass(frozen=True)
class Problem:
    X: np.ndarray
    y: np.ndarray
    w_star: np.ndarray

    @property
    def n(self):
        return self.X.shape[0]


@dataclass
class RoundMetrics:
    iteration: int
    loss: float
    recovery_error: float
    located: frozenset
    truth: frozenset
    t_encode_us: float
    t_inject_us: float
    t_decode_us: float

    @property
    def n_located(self):
        return len(self.located)

    @property
    def located_correct(self):
        return int(self.located == self.truth)


@dataclass
class RunMetrics:
    rows: list = field(default_factory=list)
    weights_path: list = field(default_factory=list)

    @property
    def losses(self):
        return np.array([row.loss for row in self.rows])

    @property
    def final_loss(self):
        return self.rows[-1].loss if self.rows else float("nan")


def _rng(seed, *stream):
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))


def gen_dataset(seed, n, m, noise_sigma=0.0) -> Problem:
    rng = _rng(seed, 0xDA7A)
    X = rng.standard_normal((n, m))
    w_star = rng.standard_normal(m)
    y = X @ w_star
    if noise_sigma:
        y = y + noise_sigma * rng.standard_normal(n)
    return Problem(X, y, w_star)


def loss(problem, w):
    resid = problem.X @ w - problem.y
    return 0.5 * float(resid @ resid) / problem.n


def optimum(problem):
    """Closed-form least-squares minimiser and its loss."""
    w_opt = np.linalg.lstsq(problem.X, problem.y, rcond=None)[0]
    return w_opt, loss(problem, w_opt)


def sample_gradient(x, y, w):
    """Gradient of 0.5 * (x.w - y)^2 with respect to w."""
    return (x @ w - y) * x


def sample_loss(x, y, w):
    return 0.5 * (x @ w - y) ** 2


def batch_indices(task, problem, P, iteration):
    rng = _rng(task.seed, 0xBA7C, iteration)
    return rng.choice(problem.n, size=P, replace=problem.n < P)


def worker_gradients(problem, w, idx) -> np.ndarray:
    """m x P matrix whose column k is the gradient on sample ``idx[k]``."""
    X = problem.X[idx]
    resid = X @ w - problem.y[idx]
    return (X * resid[:, None]).T


def _rel_error(u, target):
    denom = np.linalg.norm(target)
    err = np.linalg.norm(u - target)
    return float(err / denom) if denom > 0 else float(err)


def run_round(problem, w, task, cfg, weights, attack, iteration, A=None, executor=None):
    """One encode / inject / decode / update step.  Returns ``(w_next, RoundMetrics)``."""
    if A is None:
        A = build_allocation(cfg)
    idx = batch_indices(task, problem, cfg.P, iteration)
    G = pad_gradients(worker_gradients(problem, w, idx), cfg)
    target = G.sum(axis=1)[: cfg.d]

    t0 = time.perf_counter()
    Z = encode_all(G, A, weights, cfg, executor=executor)
    t1 = time.perf_counter()
    adversaries = select_adversaries(attack, cfg, task.seed, iteration)
    R, truth = inject(Z, attack, cfg, adversaries, rng=_rng(task.seed, 0xA77C, iteration))
    t2 = time.perf_counter()
    try:
        report = decode(cfg, weights, R, seed=task.seed, iteration=iteration, executor=executor)
    except DecodeError as exc:
        raise DecodeError(f"iteration {iteration}: {exc}", group=exc.group) from exc
    t3 = time.perf_counter()

    w_next = w - (task.gamma / cfg.P) * report.u
    row = RoundMetrics(
        iteration=iteration,
        loss=loss(problem, w_next),
        recovery_error=_rel_error(report.u, target),
        located=report.located_all,
        truth=truth,
        t_encode_us=(t1 - t0) * 1e6,
        t_inject_us=(t2 - t1) * 1e6,
        t_decode_us=(t3 - t2) * 1e6,
    )
    return w_next, row


def vanilla_step(problem, w, task, P, iteration):
    """Plain mini-batch SGD step on the same batch, no coding."""
    idx = batch_indices(task, problem, P, iteration)
    return w - (task.gamma / P) * worker_gradients(problem, w, idx).sum(axis=1)


def run_training(task, cfg, attack=None, weights=None, problem=None, threads=1,
                 keep_path=False) -> RunMetrics:
    if attack is None:
        attack = AttackSpec(AttackKind.NONE)
    if cfg.d != task.m:
        raise ValueError(f"mechanism dimension d={cfg.d} does not match model size m={task.m}")
    if problem is None:
        problem = gen_dataset(task.seed, task.n, task.m, task.noise_sigma)
    if weights is None:
        weights = make_weights(cfg)
    A = build_allocation(cfg)
    w = np.zeros(task.m)
    metrics = RunMetrics()
    if keep_path:
        metrics.weights_path.append(w.copy())
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else nullcontext()
    with pool as executor:
        for t in range(task.iterations):
            w, row = run_round(problem, w, task, cfg, weights, attack, t, A=A, executor=executor)
            metrics.rows.append(row)
            if keep_path:
                metrics.weights_path.append(w.copy())
    return metrics
