"""PPM framing and the pure-loss channel at the level of detection statistics.

A frame carries one coherent pulse of mean photon number ``pulse_energy``.
Bob's on/off detector sees it with probability 1 - exp(-eta * pulse_energy);
a classical direct-detection eavesdropper on the reflected port sees it with
probability 1 - exp(-(1 - eta) * pulse_energy).  The two outputs of a beam
splitter fed by a coherent state are a product of coherent states, so the
two draws are independent.  No dark counts, no thermal noise.

Randomness is always passed in as a ``numpy.random.Generator``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    eta: float
    pulse_energy: float
    frame_len: int

    def __post_init__(self):
        if not 0.5 < self.eta < 1:
            raise ValueError(f"transmissivity {self.eta} outside (0.5, 1)")
        if self.pulse_energy < 0 or not math.isfinite(self.pulse_energy):
            raise ValueError(f"pulse energy must be finite and >= 0, got {self.pulse_energy}")
        if self.frame_len < 1:
            raise ValueError(f"frame length must be positive, got {self.frame_len}")

    @property
    def photons_per_use(self) -> float:
        """Average photon number per channel use (one pulse per frame)."""
        return self.pulse_energy / self.frame_len


def erasure_probability(p: ChannelParams) -> float:
    """Probability that Bob's detector stays dark for a frame."""
    return math.exp(-p.eta * p.pulse_energy)


def eve_miss_probability(p: ChannelParams) -> float:
    return math.exp(-(1.0 - p.eta) * p.pulse_energy)


def modulate(symbol: int, b: int) -> int:
    """Pulse position in 1..b for a GF(b) symbol."""
    if not 0 <= symbol < b:
        raise ValueError(f"symbol {symbol} outside GF({b})")
    return symbol + 1


def demodulate(position: Optional[int], b: int) -> Optional[int]:
    if position is None:
        return None
    if not 1 <= position <= b:
        raise ValueError(f"pulse position {position} outside 1..{b}")
    return position - 1


def transmit_frame(
    position: int, p: ChannelParams, rng: np.random.Generator
) -> tuple[Optional[int], Optional[int]]:
    """One frame through the channel: ``(bob_output, eve_output)``, ``None`` = erased."""
    if not 1 <= position <= p.frame_len:
        raise ValueError(f"pulse position {position} outside 1..{p.frame_len}")
    u_bob, u_eve = rng.random(2)
    bob = None if u_bob < erasure_probability(p) else position
    eve = None if u_eve < eve_miss_probability(p) else position
    return bob, eve


def transmit(
    positions: Sequence[int], p: ChannelParams, rng: np.random.Generator
) -> tuple[list[Optional[int]], list[Optional[int]]]:
    """Frame-by-frame transmission of a whole PPM sequence."""
    bob, eve = [], []
    for pos in positions:
        y, z = transmit_frame(pos, p, rng)
        bob.append(y)
        eve.append(z)
    return bob, eve


def total_channel_uses(n: int, b: int) -> int:
    return n * b
