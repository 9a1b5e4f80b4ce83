"""Slow reference implementations used to check the fast paths."""
from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from .codec import group_weights
from .errors import AmbiguousRecovery, DimensionMismatch, NoConsistentSubset

ACCEPT_TOL = 1e-8
MAX_R = 12


def encoder_matrix(w, d_c, r_c):
    """The full d_c x (d_c*r_c) matrix kron(I_{d_c}, [1, w, ..., w^(r_c-1)])."""
    return np.kron(np.eye(d_c), (float(w) ** np.arange(r_c))[None, :])


def dense_encode(ybar, w, cfg):
    ybar = np.asarray(ybar, dtype=float)
    if ybar.shape != (cfg.d_pad,):
        raise DimensionMismatch(f"ybar must have length {cfg.d_pad}, got {ybar.shape}")
    return encoder_matrix(w, cfg.d_c, cfg.r_c) @ ybar


def subset_count(r, s):
    return sum(comb(r, i) for i in range(s + 1))


def brute_force_decode(R_j, w, r_c, s, tol=ACCEPT_TOL, return_stats=False):
    """Recover the group sum by trying every set S of at most s suspect columns.

    For each S the remaining columns are assumed honest and the stacked
    system ``z_k = W_k g`` is solved in least squares; S is consistent when
    the residual is below ``tol * (1 + |R_j|)``.  All consistent solutions
    must agree.  Works for any r, including undersized groups where the
    answer is not unique (then ``AmbiguousRecovery`` is raised).
    """
    R_j = np.asarray(R_j, dtype=float)
    w = np.asarray(w, dtype=float)
    d_c, r = R_j.shape
    if w.shape != (r,):
        raise DimensionMismatch(f"{r} columns but {w.shape[0]} weights")
    if r > MAX_R:
        raise ValueError(f"brute force is capped at r <= {MAX_R}")
    blocks = [encoder_matrix(wk, d_c, r_c) for wk in w]
    thresh = tol * (1.0 + np.linalg.norm(R_j))
    found = None
    examined = 0
    for size in range(s + 1):
        for S in combinations(range(r), size):
            examined += 1
            keep = [k for k in range(r) if k not in S]
            if not keep:
                continue
            A = np.vstack([blocks[k] for k in keep])
            b = np.concatenate([R_j[:, k] for k in keep])
            g = np.linalg.lstsq(A, b, rcond=None)[0]
            if np.linalg.norm(A @ g - b) >= thresh:
                continue
            if found is None:
                found = (S, g)
            elif np.linalg.norm(g - found[1]) > tol * (1.0 + np.linalg.norm(found[1])):
                raise AmbiguousRecovery(
                    f"subsets {found[0]} and {S} explain the data with different sums"
                )
    if found is None:
        raise NoConsistentSubset(f"no set of <= {s} corrupted columns explains the data")
    if return_stats:
        return found[1], {"examined": examined, "first_subset": found[0]}
    return found[1]


def brute_force_group_decode(cfg, weights, j, R_j, tol=ACCEPT_TOL):
    R_j = np.asarray(R_j, dtype=float)
    if R_j.shape != (cfg.d_c, cfg.r):
        raise DimensionMismatch(f"group block must be {cfg.d_c}x{cfg.r}, got {R_j.shape}")
    return brute_force_decode(R_j, group_weights(cfg, weights, j), cfg.r_c, cfg.s, tol)
