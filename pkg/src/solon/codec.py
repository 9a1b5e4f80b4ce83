"""Mechanism configuration, gradient allocation, worker weights and the
linear block encoder.

Workers are indexed from 0.  Group ``j`` (0-based) owns the contiguous
workers ``j*r .. (j+1)*r - 1``; every worker in a group is assigned the same
``r`` gradients, and worker ``k`` transmits

    z_k[v] = sum_{l < r_c} w_k**l * ybar[v*r_c + l],   v = 0 .. d_c-1

where ``ybar`` is the sum of the group's gradients (zero padded to a
multiple of ``r_c``).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, Infeasible, NotDivisible

RC_SOFT_LIMIT = 14

WEIGHT_SCHEMES = ("chebyshev", "equispaced")


class NumericalWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MechanismConfig:
    P: int
    s: int
    r_c: int
    d: int

    @property
    def r(self) -> int:
        return 2 * self.s + self.r_c

    @property
    def q(self) -> int:
        return self.P // self.r

    @property
    def d_c(self) -> int:
        return -(-self.d // self.r_c)

    @property
    def d_pad(self) -> int:
        return self.d_c * self.r_c

    def group_slice(self, j: int) -> slice:
        return slice(j * self.r, (j + 1) * self.r)

    def group_of(self, worker: int) -> int:
        return worker // self.r


def nearest_feasible_P(P, s, r_c):
    """Smallest multiple of ``2s + r_c`` that is at least ``P``."""
    r = 2 * s + r_c
    return max(r, r * math.ceil(P / r))


def validate_config(P, s, r_c, d, rc_limit=RC_SOFT_LIMIT) -> MechanismConfig:
    """Build a :class:`MechanismConfig`, rejecting parameter sets that no
    regular mechanism (or no block code) can support.

    Raises ``Infeasible`` when ``s > (P - r_c)/2`` and ``NotDivisible`` when
    ``2s + r_c`` does not divide ``P``.  A compression ratio above
    ``rc_limit`` is allowed but warned about: decoding loses accuracy there
    in double precision.
    """
    for name, value, lo in (("P", P, 1), ("s", s, 0), ("r_c", r_c, 1), ("d", d, 1)):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise TypeError(f"{name} must be an integer, got {value!r}")
        if value < lo:
            raise ValueError(f"{name} must be >= {lo}, got {value}")
    P, s, r_c, d = int(P), int(s), int(r_c), int(d)
    r = 2 * s + r_c
    if r > P:
        raise Infeasible(
            f"s={s} exceeds the adversary bound (P - r_c)/2 = {(P - r_c) / 2:g} "
            f"for P={P}, r_c={r_c}; redundancy 2s + r_c = {r} needs at least "
            f"P={nearest_feasible_P(P, s, r_c)} workers"
        )
    if P % r:
        raise NotDivisible(
            f"redundancy 2s + r_c = {r} does not divide P={P}; "
            f"nearest feasible P is {nearest_feasible_P(P, s, r_c)}"
        )
    if r_c > rc_limit:
        warnings.warn(
            f"r_c={r_c} is above {rc_limit}; Vandermonde decoding may lose accuracy",
            NumericalWarning,
            stacklevel=2,
        )
    return MechanismConfig(P, s, r_c, d)


def is_feasible(P, s, r_c):
    r = 2 * s + r_c
    return r <= P and P % r == 0


def build_allocation(cfg: MechanismConfig) -> np.ndarray:
    """P x P block allocation ``I_q kron ones(r, r)``."""
    return np.kron(np.eye(cfg.q, dtype=np.int8), np.ones((cfg.r, cfg.r), dtype=np.int8))


def make_weights(cfg: MechanismConfig, scheme="chebyshev") -> np.ndarray:
    """Distinct nonzero evaluation points, one per worker.

    ``equispaced`` gives ``w_k = (k+1)/P``.  ``chebyshev`` takes the P
    first-kind Chebyshev nodes on [-1, 1] (P+1 nodes when P is odd, so that
    0 is never a node) and deals them to groups round-robin, so each group's
    r points are spread over the whole interval.  The equispaced points
    cluster inside a group and the locator system becomes numerically
    singular once r reaches ~20.
    """
    P = cfg.P
    if scheme == "equispaced":
        return np.arange(1, P + 1, dtype=float) / P
    if scheme != "chebyshev":
        raise ValueError(f"unknown weight scheme {scheme!r}; expected one of {WEIGHT_SCHEMES}")
    n = P if P % 2 == 0 else P + 1
    nodes = np.cos(np.pi * (2 * np.arange(P) + 1) / (2 * n))
    q, r = cfg.q, cfg.r
    # node index k*q + j goes to local slot k of group j
    order = (np.arange(r)[None, :] * q + np.arange(q)[:, None]).reshape(-1)
    return nodes[order]


def group_weights(cfg, weights, j):
    return np.asarray(weights, dtype=float)[cfg.group_slice(j)]


def vandermonde(cfg, weights, j, v) -> np.ndarray:
    """r x (v+1) matrix with entry (k, l) = w_{j*r + k} ** l."""
    return np.vander(group_weights(cfg, weights, j), v + 1, increasing=True)


def pad_gradients(G, cfg) -> np.ndarray:
    """Zero-pad a d x P (or d_pad x P) gradient matrix to d_pad rows."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[1] != cfg.P or G.shape[0] not in (cfg.d, cfg.d_pad):
        raise DimensionMismatch(
            f"gradient matrix must be {cfg.d}x{cfg.P} or {cfg.d_pad}x{cfg.P}, got {G.shape}"
        )
    if G.shape[0] == cfg.d_pad:
        if cfg.d_pad > cfg.d and np.any(G[cfg.d:]):
            raise DimensionMismatch("padding rows of the gradient matrix must be zero")
        return G
    out = np.zeros((cfg.d_pad, cfg.P))
    out[: cfg.d] = G
    return out


def encode_worker(ybar, w_j, cfg) -> np.ndarray:
    ybar = np.asarray(ybar, dtype=float)
    if ybar.shape != (cfg.d_pad,):
        raise DimensionMismatch(f"ybar must have length {cfg.d_pad}, got {ybar.shape}")
    powers = float(w_j) ** np.arange(cfg.r_c)
    return ybar.reshape(cfg.d_c, cfg.r_c) @ powers


def group_sums(G, A, cfg) -> np.ndarray:
    """d_pad x q matrix whose column j is the summed gradients of group j."""
    G = pad_gradients(G, cfg)
    A = np.asarray(A)
    if A.shape != (cfg.P, cfg.P):
        raise DimensionMismatch(f"allocation must be {cfg.P}x{cfg.P}, got {A.shape}")
    out = np.empty((cfg.d_pad, cfg.q))
    for j in range(cfg.q):
        # all rows of a group coincide; read the first one
        out[:, j] = G[:, A[j * cfg.r] != 0].sum(axis=1)
    return out


def encode_group(ybar, cfg, weights, j) -> np.ndarray:
    """d_c x r block of encodings for the workers of group j."""
    Ymat = np.asarray(ybar, dtype=float).reshape(cfg.d_c, cfg.r_c)
    return Ymat @ vandermonde(cfg, weights, j, cfg.r_c - 1).T


def encode_all(G, A, weights, cfg, executor=None) -> np.ndarray:
    """Honest d_c x P matrix Z of worker outputs.

    Groups are independent; with an ``executor`` they are encoded
    concurrently and written into disjoint column blocks.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (cfg.P,):
        raise DimensionMismatch(f"expected {cfg.P} weights, got {weights.shape}")
    Ybar = group_sums(G, A, cfg)
    Z = np.empty((cfg.d_c, cfg.P))

    def work(j):
        Z[:, cfg.group_slice(j)] = encode_group(Ybar[:, j], cfg, weights, j)

    if executor is None:
        for j in range(cfg.q):
            work(j)
    else:
        list(executor.map(work, range(cfg.q)))
    return Z
