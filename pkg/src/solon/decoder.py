"""Parameter-server decoding: locate the corrupted columns of every group,
recover the group's gradient sum from honest columns, and add the groups up.

Per group, with ``rj = f @ R_j`` for a random probe ``f ~ N(1, I)``, honest
entries satisfy ``rj[k] = Q(w_k)`` for a polynomial Q of degree < r_c.  The
locator fits a rational function num/den (deg num < r_c + s, den monic of
degree s) through all r points by solving one linear system; den vanishes on
the corrupted weights, so the fit disagrees with ``rj`` (or has a pole)
exactly there.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codec import MechanismConfig, encode_group, group_weights, vandermonde
from .errors import (
    DimensionMismatch,
    InsufficientHonest,
    NumericalFailure,
    PoleAtEvaluationPoint,
    SingularSubmatrix,
    TooManyAdversaries,
)

MISMATCH_TOL = 1e-6
POLE_TOL = 1e-12
SOLVE_TOL = 1e-6
VERIFY_TOL = 1e-6
MAX_PROBES = 3


@dataclass(frozen=True)
class ProbeVector:
    f: np.ndarray
    seed: int
    iteration: int
    group: int
    attempt: int = 0


@dataclass(frozen=True)
class LocatorSolution:
    a: np.ndarray
    r_c: int
    s: int
    residual: float

    @property
    def numerator(self):
        return self.a[: self.r_c + self.s]

    @property
    def denominator(self):
        # lowest degree first, monic leading term appended
        return np.concatenate([self.a[self.r_c + self.s :], [1.0]])


@dataclass
class GroupDiagnostics:
    group: int
    attempts: int
    flagged: tuple
    locator_residual: float
    vandermonde_cond: float
    verify_error: float


@dataclass
class DecodeReport:
    u: np.ndarray
    located: list
    diagnostics: list = field(default_factory=list)

    @property
    def located_all(self) -> frozenset:
        return frozenset(k for group in self.located for k in group)


def probe(cfg: MechanismConfig, seed, iteration, group, attempt=0) -> ProbeVector:
    """Mean-one Gaussian probe, one independent stream per (seed, iteration, group, attempt)."""
    ss = np.random.SeedSequence([int(seed), int(iteration), int(group), int(attempt)])
    f = np.random.default_rng(ss).normal(1.0, 1.0, size=cfg.d_c)
    return ProbeVector(f, int(seed), int(iteration), int(group), int(attempt))


def compress_received(R_j, f) -> np.ndarray:
    f = f.f if isinstance(f, ProbeVector) else np.asarray(f, dtype=float)
    R_j = np.asarray(R_j, dtype=float)
    if R_j.ndim != 2 or R_j.shape[0] != f.shape[0]:
        raise DimensionMismatch(f"probe of length {f.shape[0]} cannot compress block {R_j.shape}")
    return f @ R_j


def locator_system(cfg, weights, j, r_jc):
    """Matrix and right-hand side of the locator system for group j."""
    s, r_c = cfg.s, cfg.r_c
    r_jc = np.asarray(r_jc, dtype=float)
    if r_jc.shape != (cfg.r,):
        raise DimensionMismatch(f"r_jc must have length {cfg.r}, got {r_jc.shape}")
    w = group_weights(cfg, weights, j)
    M = np.hstack(
        [
            np.vander(w, r_c + s, increasing=True),
            -np.vander(w, s, increasing=True) * r_jc[:, None],
        ]
    )
    return M, r_jc * w**s


def solve_locator(cfg, weights, j, r_jc, tol=SOLVE_TOL) -> LocatorSolution:
    M, rhs = locator_system(cfg, weights, j, r_jc)
    # equilibrate columns; the r_jc-scaled block can be far off unit scale
    norms = np.linalg.norm(M, axis=0)
    norms[norms == 0] = 1.0
    a = np.linalg.lstsq(M / norms, rhs, rcond=None)[0] / norms
    rhs_norm = np.linalg.norm(rhs)
    residual = float(np.linalg.norm(M @ a - rhs))
    if residual > tol * max(rhs_norm, np.finfo(float).tiny):
        raise NumericalFailure(
            f"locator solve for group {j} left residual {residual:.3e} (|rhs| = {rhs_norm:.3e})"
        )
    return LocatorSolution(a, cfg.r_c, cfg.s, residual)


def _horner(coeffs, w):
    acc = 0.0
    for c in coeffs[::-1]:
        acc = acc * w + c
    return acc


def eval_locator(sol: LocatorSolution, w, pole_tol=POLE_TOL):
    num = _horner(sol.numerator, w)
    den = _horner(sol.denominator, w)
    if abs(den) <= pole_tol * (1.0 + abs(num)):
        raise PoleAtEvaluationPoint(f"locator denominator vanishes at w={w!r}")
    return num / den


def _mismatch(cfg, sol, w, r_jc, scale):
    out = np.empty(cfg.r)
    for k in range(cfg.r):
        try:
            out[k] = abs(eval_locator(sol, w[k]) - r_jc[k]) / scale
        except PoleAtEvaluationPoint:
            out[k] = np.inf
    return out


def _flag(cfg, weights, j, r_jc, tol):
    sol = solve_locator(cfg, weights, j, r_jc)
    w = group_weights(cfg, weights, j)
    scale = float(np.max(np.abs(r_jc)))
    if scale == 0.0:
        return frozenset(), sol
    rational = _mismatch(cfg, sol, w, r_jc, scale)
    flagged = set(np.flatnonzero(~(rational <= tol)).tolist())

    # Refinement: a corrupted entry can sit close to the fitted rational
    # function by accident.  Refit a plain polynomial (degree < r_c) to the
    # r - s entries that match best; if they are mutually consistent, they
    # are honest and the polynomial is the true one, so every other entry
    # is measured against it directly.
    trusted = np.argsort(rational, kind="stable")[: cfg.r - cfg.s]
    V = np.vander(w, cfg.r_c, increasing=True)
    coef = np.linalg.lstsq(V[trusted], r_jc[trusted], rcond=None)[0]
    poly = np.abs(V @ coef - r_jc) / scale
    if np.all(poly[trusted] <= tol):
        flagged = set(np.flatnonzero(~(poly <= tol)).tolist())

    if len(flagged) > cfg.s:
        raise TooManyAdversaries(
            f"group {j}: located {len(flagged)} > s={cfg.s} suspect workers", group=j
        )
    return frozenset(int(k) for k in flagged), sol


def locate_adversaries(cfg, weights, j, R_j, f, tol=MISMATCH_TOL) -> frozenset:
    """Local indices (0-based within group j) whose entry disagrees with the
    fitted locator.

    An index is flagged when ``|P_j(w_k) - rj[k]| > tol * max|rj|`` or when
    the locator has a pole at ``w_k``; the flags are then sharpened against
    a polynomial refit on the best-matching r - s entries.  Raises ``TooManyAdversaries`` if more
    than s indices are flagged.
    """
    r_jc = compress_received(R_j, f)
    if r_jc.shape != (cfg.r,):
        raise DimensionMismatch(f"group block must have {cfg.r} columns, got {r_jc.shape[0]}")
    return _flag(cfg, weights, j, r_jc, tol)[0]


def block_decode(cfg, weights, j, R_j, U) -> np.ndarray:
    """Recover group j's gradient sum (length d_pad) from the columns in U.

    Uses the first r_c indices of U in ascending order, which must all be
    honest.
    """
    R_j = np.asarray(R_j, dtype=float)
    if R_j.shape != (cfg.d_c, cfg.r):
        raise DimensionMismatch(f"group block must be {cfg.d_c}x{cfg.r}, got {R_j.shape}")
    U = sorted(U)
    if len(U) < cfg.r_c:
        raise InsufficientHonest(
            f"group {j}: {len(U)} trusted workers, need r_c={cfg.r_c}", group=j
        )
    use = U[: cfg.r_c]
    V = vandermonde(cfg, weights, j, cfg.r_c - 1)[use]
    try:
        # V @ Ymat.T = R_j[:, use].T, one right-hand side per compressed row
        Ymat_T = np.linalg.solve(V, R_j[:, use].T)
    except np.linalg.LinAlgError as exc:
        raise SingularSubmatrix(f"group {j}: Vandermonde restriction is singular", group=j) from exc
    return Ymat_T.T.reshape(-1)


def _verify(cfg, weights, j, R_j, ybar, tol):
    """Columns of R_j inconsistent with the honest encoding of ybar."""
    Zhat = encode_group(ybar, cfg, weights, j)
    scale = float(np.max(np.abs(Zhat))) if Zhat.size else 0.0
    err = np.max(np.abs(R_j - Zhat), axis=0)
    bad = frozenset(int(k) for k in np.flatnonzero(~(err <= tol * scale)))
    honest = [k for k in range(cfg.r) if k not in bad]
    rel = float(np.max(err[honest]) / scale) if honest and scale > 0 else 0.0
    return bad, rel


def decode_group(cfg, weights, j, R_j, seed=0, iteration=0, probes=None,
                 tol=MISMATCH_TOL, verify_tol=VERIFY_TOL, max_attempts=MAX_PROBES):
    """Locate, recover and certify one group.

    After recovering ybar from the trusted columns, every column is
    re-encoded and compared.  At most s inconsistent columns certify ybar:
    any two sums each consistent with r - s columns agree on at least r_c of
    them and are therefore equal.  Otherwise the group is re-probed with a
    fresh probe vector.  Returns ``(ybar, located, diagnostics)``.
    """
    R_j = np.asarray(R_j, dtype=float)
    cond = float(np.linalg.cond(vandermonde(cfg, weights, j, cfg.r_c - 1)))
    last_error = None
    for attempt in range(max_attempts):
        if probes is not None and attempt < len(probes):
            f = probes[attempt]
        else:
            f = probe(cfg, seed, iteration, j, attempt)
        try:
            flagged, sol = _flag(cfg, weights, j, compress_received(R_j, f), tol)
            resid = sol.residual
            U = [k for k in range(cfg.r) if k not in flagged]
            ybar = block_decode(cfg, weights, j, R_j, U)
        except (TooManyAdversaries, NumericalFailure, InsufficientHonest, SingularSubmatrix) as exc:
            last_error = exc
            continue
        bad, verify_err = _verify(cfg, weights, j, R_j, ybar, verify_tol)
        if len(bad) <= cfg.s:
            diag = GroupDiagnostics(j, attempt + 1, tuple(sorted(flagged)), resid, cond, verify_err)
            return ybar, bad, diag
        last_error = TooManyAdversaries(
            f"group {j}: {len(bad)} columns inconsistent with the recovered sum", group=j
        )
    raise TooManyAdversaries(
        f"group {j}: no certified decode after {max_attempts} probes ({last_error})", group=j
    )


def decode(cfg, weights, R, seed=0, iteration=0, probes=None, executor=None,
           tol=MISMATCH_TOL, verify_tol=VERIFY_TOL, max_attempts=MAX_PROBES) -> DecodeReport:
    """Recover ``G @ 1`` (length d) from the received d_c x P matrix R.

    ``probes`` optionally fixes the first probe of each group (a sequence
    indexed by group); further probes derive from ``(seed, iteration)``.
    Groups are decoded independently and summed in group order, so running
    them on an ``executor`` gives bit-identical results.
    """
    R = np.asarray(R, dtype=float)
    if R.shape != (cfg.d_c, cfg.P):
        raise DimensionMismatch(f"received matrix must be {cfg.d_c}x{cfg.P}, got {R.shape}")
    weights = np.asarray(weights, dtype=float)

    def work(j):
        first = None if probes is None else [probes[j]]
        return decode_group(cfg, weights, j, R[:, cfg.group_slice(j)], seed, iteration,
                            first, tol, verify_tol, max_attempts)

    if executor is None:
        results = [work(j) for j in range(cfg.q)]
    else:
        results = list(executor.map(work, range(cfg.q)))

    u = np.zeros(cfg.d_pad)
    located, diags = [], []
    for j, (ybar, bad, diag) in enumerate(results):
        u += ybar
        located.append(frozenset(j * cfg.r + k for k in bad))
        diags.append(diag)
    return DecodeReport(u[: cfg.d], located, diags)
