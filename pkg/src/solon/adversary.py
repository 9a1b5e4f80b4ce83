"""Byzantine attack models applied to the encoded worker outputs."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import TooManyInSpec


class AttackKind(str, Enum):
    NONE = "none"
    REVERSE_GRADIENT = "reverse_gradient"
    CONSTANT = "constant"
    ALIE = "alie"
    GAUSSIAN = "gaussian"


_ALIASES = {
    "rev-grad": AttackKind.REVERSE_GRADIENT,
    "revgrad": AttackKind.REVERSE_GRADIENT,
    "reverse-gradient": AttackKind.REVERSE_GRADIENT,
    "const": AttackKind.CONSTANT,
    "gaussian_noise": AttackKind.GAUSSIAN,
    "noise": AttackKind.GAUSSIAN,
}

DEFAULT_PARAM = {
    AttackKind.NONE: 0.0,
    AttackKind.REVERSE_GRADIENT: -100.0,
    AttackKind.CONSTANT: -100.0,
    AttackKind.ALIE: 1.0,
    AttackKind.GAUSSIAN: 1.0,
}


def parse_kind(kind) -> AttackKind:
    if isinstance(kind, AttackKind):
        return kind
    key = str(kind).strip().lower()
    if key in _ALIASES:
        return _ALIASES[key]
    return AttackKind(key)


@dataclass(frozen=True)
class AttackSpec:
    """Which workers misbehave and what they send.

    Either ``adversaries`` fixes the (0-based) Byzantine workers, or
    ``count`` of them are drawn at random each round; ``resample=False``
    keeps the first draw for the whole run.
    """

    kind: AttackKind = AttackKind.NONE
    param: float = 0.0
    adversaries: tuple = ()
    count: int | None = None
    resample: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", parse_kind(self.kind))
        object.__setattr__(self, "adversaries", tuple(sorted(int(a) for a in self.adversaries)))

    @classmethod
    def none(cls):
        return cls(AttackKind.NONE)

    @property
    def size(self) -> int:
        if self.kind is AttackKind.NONE:
            return 0
        return self.count if self.count is not None else len(self.adversaries)

    def check(self, cfg):
        if self.size > cfg.s:
            raise TooManyInSpec(f"attack names {self.size} adversaries but s={cfg.s}")
        if len(set(self.adversaries)) != len(self.adversaries):
            raise TooManyInSpec("duplicate adversary indices")
        for a in self.adversaries:
            if not 0 <= a < cfg.P:
                raise TooManyInSpec(f"adversary index {a} outside 0..{cfg.P - 1}")


def reverse_gradient(z_honest, kappa):
    return kappa * np.asarray(z_honest, dtype=float)


def constant_attack(d_c, c):
    return np.full(int(d_c), float(c))


def alie(honest_columns, z):
    """Coordinatewise mean plus z population standard deviations."""
    X = np.asarray(honest_columns, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return X.mean(axis=1) + z * X.std(axis=1)


def select_adversaries(spec: AttackSpec, cfg, seed, iteration) -> tuple:
    """Byzantine workers for one round."""
    spec.check(cfg)
    if spec.kind is AttackKind.NONE:
        return ()
    if spec.count is None:
        return spec.adversaries
    stream = iteration if spec.resample else 0
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(stream), 0x5E1EC7]))
    return tuple(sorted(int(a) for a in rng.choice(cfg.P, size=spec.count, replace=False)))


def inject(Z, spec: AttackSpec, cfg, adversaries=None, rng=None):
    """Replace the adversarial columns of Z with attack outputs.

    Returns ``(R, truth)`` where ``truth`` holds the adversaries whose column
    actually changed (beyond roundoff): e.g. reverse-gradient with kappa=1
    injects no noise and such a worker counts as honest.
    """
    Z = np.asarray(Z, dtype=float)
    spec.check(cfg)
    if adversaries is None:
        adversaries = spec.adversaries
    adversaries = tuple(sorted(int(a) for a in adversaries))
    if len(adversaries) > cfg.s:
        raise TooManyInSpec(f"{len(adversaries)} adversaries exceed s={cfg.s}")
    R = Z.copy()
    if spec.kind is AttackKind.NONE or not adversaries:
        return R, frozenset()
    advset = set(adversaries)
    for a in adversaries:
        if spec.kind is AttackKind.REVERSE_GRADIENT:
            R[:, a] = reverse_gradient(Z[:, a], spec.param)
        elif spec.kind is AttackKind.CONSTANT:
            R[:, a] = constant_attack(cfg.d_c, spec.param)
        elif spec.kind is AttackKind.ALIE:
            g = cfg.group_of(a)
            honest = [k for k in range(g * cfg.r, (g + 1) * cfg.r) if k not in advset]
            R[:, a] = alie(Z[:, honest], spec.param)
        elif spec.kind is AttackKind.GAUSSIAN:
            if rng is None:
                rng = np.random.default_rng(0)
            R[:, a] = Z[:, a] + spec.param * rng.standard_normal(cfg.d_c)
    floor = 1e-12 * float(np.max(np.abs(Z))) if Z.size else 0.0
    truth = frozenset(a for a in adversaries if np.max(np.abs(R[:, a] - Z[:, a])) > floor)
    return R, truth
