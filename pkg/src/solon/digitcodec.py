"""Digit interleaving: r_c non-negative integers packed into one.

Digit ``j`` (units = 0) of the ``l``-th input of a chunk (l = 1..r_c) is
written to decimal position ``r_c*j + l`` of the packed value, so position 0
is always zero.  This is an injective map from r_c numbers to one number:
a scalar channel can carry a whole block if the encoder is allowed to be
nonlinear.  Kept as a demonstration, not as a practical codec: packed values grow to ``r_c * digit_budget + 1`` digits.

With these positions ``pack([123, 456, 789], 3)`` is ``7418529630``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DigitOverflow, NegativeInput


@dataclass(frozen=True)
class DigitBlock:
    values: tuple
    digit_budget: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        _check_values(self.values, self.digit_budget)


def _check_values(values, budget):
    limit = 10**budget
    for v in values:
        if v < 0:
            raise NegativeInput(f"value {v} is negative")
        if v >= limit:
            raise DigitOverflow(f"value {v} has more than {budget} digits")


def _digits(v, n):
    out = []
    for _ in range(n):
        v, dgt = divmod(v, 10)
        out.append(dgt)
    return out


def pack(xs, r_c, digit_budget=None):
    if isinstance(xs, DigitBlock):
        values, budget = xs.values, xs.digit_budget
    else:
        values = tuple(int(v) for v in xs)
        budget = digit_budget if digit_budget is not None else max(
            [len(str(v)) for v in values if v >= 0] or [1]
        )
        _check_values(values, budget)
    if r_c < 1:
        raise ValueError("r_c must be >= 1")
    if len(values) % r_c:
        raise ValueError(f"block length {len(values)} is not a multiple of r_c={r_c}")
    out = []
    for k in range(0, len(values), r_c):
        y = 0
        for l, x in enumerate(values[k : k + r_c], start=1):
            for j, dgt in enumerate(_digits(x, budget)):
                y += dgt * 10 ** (r_c * j + l)
        out.append(y)
    return out


def unpack(ys, r_c, digit_budget) -> DigitBlock:
    if r_c < 1:
        raise ValueError("r_c must be >= 1")
    width = r_c * digit_budget + 1
    values = []
    for y in ys:
        y = int(y)
        if y < 0:
            raise NegativeInput(f"packed value {y} is negative")
        if y >= 10**width:
            raise DigitOverflow(f"packed value {y} exceeds {width} digits")
        if y % 10:
            raise DigitOverflow(f"packed value {y} has a nonzero units digit")
        digits = _digits(y, width)
        for l in range(1, r_c + 1):
            values.append(sum(digits[r_c * j + l] * 10**j for j in range(digit_budget)))
    return DigitBlock(tuple(values), digit_budget)
