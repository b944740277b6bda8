"""(b, n, k) Reed-Solomon code over GF(b), b = 2^w, with n = b - 1.

Evaluation-style encoding: the k message symbols are the coefficients
(lowest degree first) of a polynomial, evaluated at g^0, ..., g^(n-1) for the
field's fixed generator g.  Decoding handles erasures only; an erased
position is ``None``.
"""

from __future__ import annotations

import enum
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

from ppmwt.galois import FieldSpec, LogTables, generator, log_tables

ERASED = None


class FailureReason(enum.Enum):
    TOO_MANY_ERASURES = "TooManyErasures"
    CORRUPT = "Corrupt"


class DecodeFailure(Exception):
    def __init__(self, reason: FailureReason, erasures: int, detail: str = ""):
        self.reason = reason
        self.erasures = erasures
        super().__init__(f"{reason.value} ({erasures} erasures){': ' + detail if detail else ''}")


@dataclass(frozen=True)
class RSCodeSpec:
    field: FieldSpec
    k: int
    eval_points: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.field.m > 16:
            raise ValueError("alphabets above GF(2^16) are not supported")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"message length k={self.k} outside [1, {self.n}]")
        g = generator(self.field)
        points = []
        x = 1
        for _ in range(self.n):
            points.append(x)
            x = self.field.mul(x, g)
        object.__setattr__(self, "eval_points", tuple(points))

    @classmethod
    def for_alphabet(cls, b: int, k: int) -> RSCodeSpec:
        w = b.bit_length() - 1
        if b < 2 or b != 1 << w:
            raise ValueError(f"alphabet size {b} is not a power of two")
        return cls(FieldSpec(w), k)

    @property
    def b(self) -> int:
        return self.field.order

    @property
    def n(self) -> int:
        return self.field.order - 1

    @property
    def distance(self) -> int:
        return self.n - self.k + 1

    @property
    def tables(self) -> LogTables:
        return log_tables(self.field)


def _horner(coeffs: Sequence[int], x: int, t: LogTables) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = t.mul(acc, x) ^ c
    return acc


def rs_encode(message: Sequence[int], spec: RSCodeSpec) -> list[int]:
    if len(message) != spec.k:
        raise ValueError(f"message has {len(message)} symbols, expected {spec.k}")
    if any(not 0 <= c < spec.b for c in message):
        raise ValueError("message symbol outside the alphabet")
    t = spec.tables
    return [_horner(message, x, t) for x in spec.eval_points]


def interpolate(xs: Sequence[int], ys: Sequence[int], t: LogTables) -> list[int]:
    """Coefficients of the unique polynomial of degree < len(xs) through the points."""
    k = len(xs)
    # master(x) = prod (x - x_i), degree k, lowest degree first
    master = [1]
    for xi in xs:
        nxt = [0] * (len(master) + 1)
        for d, c in enumerate(master):
            nxt[d + 1] ^= c
            nxt[d] ^= t.mul(c, xi)
        master = nxt
    coeffs = [0] * k
    for j, (xj, yj) in enumerate(zip(xs, ys)):
        if yj == 0:
            continue
        # basis = master / (x - xj) by synthetic division
        basis = [0] * k
        carry = 0
        for d in range(k, 0, -1):
            carry = master[d] ^ t.mul(carry, xj)
            basis[d - 1] = carry
        denom = _horner(basis, xj, t)
        scale = t.div(yj, denom)
        for d in range(k):
            coeffs[d] ^= t.mul(basis[d], scale)
    return coeffs


def rs_decode_erasures(
    received: Sequence[Optional[int]],
    spec: RSCodeSpec,
    positions: Optional[Sequence[int]] = None,
) -> list[int]:
    """Recover the message from a word with erasures.

    Interpolates through ``positions`` (default: the first k unerased ones)
    and checks the result against every unerased symbol.
    """
    if len(received) != spec.n:
        raise ValueError(f"received word has {len(received)} symbols, expected {spec.n}")
    known = [i for i, y in enumerate(received) if y is not ERASED]
    erasures = spec.n - len(known)
    if len(known) < spec.k:
        raise DecodeFailure(FailureReason.TOO_MANY_ERASURES, erasures)
    if positions is None:
        positions = known[:spec.k]
    elif len(positions) != spec.k or any(received[i] is ERASED for i in positions):
        raise ValueError("interpolation positions must be k unerased indices")
    t = spec.tables
    coeffs = interpolate(
        [spec.eval_points[i] for i in positions],
        [received[i] for i in positions],
        t,
    )
    for i in known:
        if _horner(coeffs, spec.eval_points[i], t) != received[i]:
            raise DecodeFailure(
                FailureReason.CORRUPT, erasures, f"position {i} disagrees")
    return coeffs
