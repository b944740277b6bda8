"""Finite-field strong extractor and its inverter.

``extract(l, s)`` multiplies the source word by the seed in GF(2^m) and keeps
the ``lam`` most significant bits of the product.  ``invert`` goes the other
way: it places the message in the top bits, fills the rest with local
randomness and divides by the seed, so for fixed (message, seed) the map from
randomness to source word is a bijection onto the preimage set.

Bit strings (messages, randomness) are ints; a message of ``lam`` bits is an
int in ``[0, 2**lam)`` whose most significant bit is the first bit.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from ppmwt.galois import FieldSpec


@dataclass(frozen=True)
class ExtractorSpec:
    field: FieldSpec
    lam: int

    def __post_init__(self):
        if not 0 <= self.lam <= self.field.m:
            raise ValueError(
                f"output length {self.lam} outside [0, {self.field.m}]")

    @property
    def m(self) -> int:
        return self.field.m

    @property
    def randomness_bits(self) -> int:
        return self.field.m - self.lam

    @property
    def n_messages(self) -> int:
        return 1 << self.lam

    def seeds(self) -> range:
        """All admissible seeds (the nonzero field elements)."""
        return range(1, self.field.order)


def _check_seed(s: int, spec: ExtractorSpec) -> None:
    if s == 0:
        raise ZeroDivisionError("the zero seed is not admissible")
    if not 0 < s < spec.field.order:
        raise ValueError(f"seed {s} outside GF(2^{spec.m})")


def extract(l: int, s: int, spec: ExtractorSpec) -> int:
    """Top ``spec.lam`` bits of ``l * s`` in GF(2^m)."""
    if not 0 <= l < spec.field.order:
        raise ValueError(f"source word {l} outside GF(2^{spec.m})")
    return spec.field.mul(l, s) >> spec.randomness_bits


def invert(message: int, s: int, r: int, spec: ExtractorSpec) -> int:
    """Source word ``(message || r) * s^-1``; uniform over preimages when ``r`` is."""
    _check_seed(s, spec)
    if not 0 <= message < spec.n_messages:
        raise ValueError(f"message {message} is not a {spec.lam}-bit string")
    if not 0 <= r < 1 << spec.randomness_bits:
        raise ValueError(
            f"randomness {r} is not a {spec.randomness_bits}-bit string")
    product = message << spec.randomness_bits | r
    return spec.field.mul(product, spec.field.inv(s))


def statistical_distance_to_uniform(
    joint: Mapping[tuple[int, int], float],
    n_messages: int,
    tol: float = 1e-9,
) -> float:
    """Total variation between P(M, S) and uniform(M) x P(S).

    ``joint`` maps ``(message, seed)`` to probability; missing keys are zero.
    """
    total = math.fsum(joint.values())
    if abs(total - 1.0) > tol or any(p < 0 for p in joint.values()):
        raise ValueError(f"joint distribution is not normalized (sum={total})")
    per_seed: dict[int, dict[int, float]] = defaultdict(dict)
    for (msg, seed), p in joint.items():
        if not 0 <= msg < n_messages:
            raise ValueError(f"message {msg} outside alphabet of {n_messages}")
        per_seed[seed][msg] = per_seed[seed].get(msg, 0.0) + p
    terms = []
    for row in per_seed.values():
        marginal = math.fsum(row.values())
        ideal = marginal / n_messages
        terms.extend(abs(row.get(msg, 0.0) - ideal) for msg in range(n_messages))
    return 0.5 * math.fsum(terms)


def hashed_distribution(
    source: Mapping[int, float] | Iterable[int],
    spec: ExtractorSpec,
) -> dict[tuple[int, int], float]:
    """Joint law of (Ext(L, S), S) for L ~ ``source`` and S uniform nonzero.

    ``source`` is either a probability mapping or an iterable of support
    points (taken as a flat distribution).
    """
    if not isinstance(source, Mapping):
        support = list(source)
        source = {l: 1.0 / len(support) for l in support}
    seed_prob = 1.0 / (spec.field.order - 1)
    joint: dict[tuple[int, int], float] = defaultdict(float)
    for s in spec.seeds():
        for l, p in source.items():
            joint[extract(l, s, spec), s] += p * seed_prob
    return dict(joint)
