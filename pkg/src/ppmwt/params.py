"""Scheme parameters shared by the pipeline and the bound calculator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from ppmwt.channel import ChannelParams
from ppmwt.extractor import ExtractorSpec
from ppmwt.galois import FieldSpec
from ppmwt.rscode import RSCodeSpec


class InfeasibleError(ValueError):
    """Parameters for which the scheme (or a bound) is not defined."""


@dataclass(frozen=True)
class SchemeParams:
    """Physical and code parameters of one scheme instance.

    The frame length equals the alphabet size ``b = 2**w``, the block length
    is ``n = b - 1`` and the per-use photon budget is ``pulse_energy / b``.
    Field objects are built lazily, so instances with huge ``b`` can be used
    for bound evaluation alone.
    """

    eta: float
    b: int
    k: int
    pulse_energy: float
    lam: int = 0

    def __post_init__(self):
        w = self.b.bit_length() - 1
        if self.b < 2 or self.b != 1 << w:
            raise InfeasibleError(f"alphabet size {self.b} is not a power of two")
        if not 1 <= self.k <= self.n:
            raise InfeasibleError(f"k={self.k} outside [1, {self.n}]")
        if not 0 < self.eta < 1:
            raise InfeasibleError(f"transmissivity {self.eta} outside (0, 1)")
        if self.pulse_energy < 0:
            raise InfeasibleError("pulse energy must be non-negative")
        if not 0 <= self.lam <= self.source_bits:
            raise InfeasibleError(
                f"message length {self.lam} bits outside [0, {self.source_bits}]")

    @classmethod
    def from_budget(cls, eta: float, photon_budget: float, b: int, k: int,
                    lam: int = 0) -> SchemeParams:
        return cls(eta=eta, b=b, k=k, pulse_energy=b * photon_budget, lam=lam)

    @property
    def n(self) -> int:
        return self.b - 1

    @property
    def w(self) -> int:
        """Bits per code symbol."""
        return self.b.bit_length() - 1

    @property
    def source_bits(self) -> int:
        """Bit length of the source word L (k symbols of w bits)."""
        return self.k * self.w

    @property
    def photon_budget(self) -> float:
        return self.pulse_energy / self.b

    @property
    def erasure_prob(self) -> float:
        return math.exp(-self.eta * self.pulse_energy)

    @property
    def eve_mean_photons(self) -> float:
        """Mean photon number reaching Eve over the whole block."""
        return (1.0 - self.eta) * self.pulse_energy * self.n

    @property
    def channel_uses(self) -> int:
        return self.n * self.b

    def with_lam(self, lam: int) -> SchemeParams:
        return SchemeParams(self.eta, self.b, self.k, self.pulse_energy, lam)

    @cached_property
    def channel(self) -> ChannelParams:
        return ChannelParams(self.eta, self.pulse_energy, self.b)

    @cached_property
    def code(self) -> RSCodeSpec:
        return RSCodeSpec(FieldSpec(self.w), self.k)

    @cached_property
    def extractor(self) -> ExtractorSpec:
        return ExtractorSpec(FieldSpec(self.source_bits), self.lam)
