"""End-to-end scheme, Monte-Carlo harness and the small classical secrecy oracle."""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ppmwt.channel import demodulate, eve_miss_probability, modulate, transmit
from ppmwt.extractor import extract, invert
from ppmwt.params import InfeasibleError, SchemeParams
from ppmwt.rscode import DecodeFailure, rs_decode_erasures, rs_encode

__all__ = [
    "SchemeParams",
    "TransmissionRecord",
    "TrialResult",
    "alice_encode",
    "bob_decode",
    "classical_secrecy_oracle",
    "run_trials",
    "simulate_transmission",
    "trial_rng",
]

BLOCK = 4096
ORACLE_MAX_STATES = 1 << 24


def pack_symbols(l: int, p: SchemeParams) -> list[int]:
    """Source word -> k symbols of GF(b), most significant symbol first."""
    mask = p.b - 1
    return [(l >> (p.w * (p.k - 1 - i))) & mask for i in range(p.k)]


def unpack_symbols(symbols: Sequence[int], p: SchemeParams) -> int:
    l = 0
    for c in symbols:
        l = l << p.w | c
    return l


def alice_encode(message: int, seed: int, r: int, p: SchemeParams,
                 fault: bool = False) -> tuple[int, list[int]]:
    """Invert the extractor, then Reed-Solomon encode.  Returns (source word, codeword).

    ``fault`` flips the low bit of the first codeword symbol; it exists so
    the self-test can prove it notices corruption.
    """
    l = invert(message, seed, r, p.extractor)
    codeword = rs_encode(pack_symbols(l, p), p.code)
    if fault:
        codeword[0] ^= 1
    return l, codeword


def bob_decode(received: Sequence[Optional[int]], seed: int, p: SchemeParams) -> int:
    """Erasure-decode the frame outputs and apply the extractor.

    Raises :class:`DecodeFailure` (carrying the erasure count) when the
    Reed-Solomon decoder does.
    """
    l = unpack_symbols(rs_decode_erasures(received, p.code), p)
    return extract(l, seed, p.extractor)


@dataclass(frozen=True)
class TransmissionRecord:
    message: int
    seed: int
    randomness: int
    source_word: int
    codeword: tuple[int, ...]
    bob_output: tuple[Optional[int], ...]
    eve_record: tuple[Optional[int], ...]
    decoded: Optional[int]
    failure: Optional[str] = None

    @property
    def erasures(self) -> int:
        return sum(y is None for y in self.bob_output)

    @property
    def error(self) -> bool:
        return self.decoded != self.message


def trial_rng(rng_seed: int, index: int) -> np.random.Generator:
    """Independent stream for trial (or block) ``index`` of a run."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(rng_seed, spawn_key=(index,))))


def randbits(rng: np.random.Generator, bits: int) -> int:
    """Uniform integer in [0, 2**bits), for any bit length."""
    if bits == 0:
        return 0
    nbytes = -(-bits // 8)
    return int.from_bytes(rng.bytes(nbytes), "big") >> (8 * nbytes - bits)


def simulate_transmission(p: SchemeParams, rng: np.random.Generator,
                          fault: bool = False) -> TransmissionRecord:
    ext = p.extractor
    message = randbits(rng, ext.lam)
    seed = 0
    while seed == 0:
        seed = randbits(rng, ext.m)
    r = randbits(rng, ext.randomness_bits)
    l, codeword = alice_encode(message, seed, r, p, fault=fault)
    positions = [modulate(c, p.b) for c in codeword]
    bob, eve = transmit(positions, p.channel, rng)
    received = [demodulate(y, p.b) for y in bob]
    decoded, failure = None, None
    try:
        decoded = bob_decode(received, seed, p)
    except DecodeFailure as exc:
        failure = str(exc)
    return TransmissionRecord(message, seed, r, l, tuple(codeword), tuple(bob),
                              tuple(eve), decoded, failure)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialResult:
    trials: int
    errors: int
    engine: str

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials

    @property
    def radius(self) -> float:
        """Three-sigma binomial radius of the error rate."""
        r = self.error_rate
        return 3.0 * math.sqrt(r * (1.0 - r) / self.trials)


def _full_block(p: SchemeParams, rng_seed: int, start: int, stop: int) -> int:
    errors = 0
    for i in range(start, stop):
        if simulate_transmission(p, trial_rng(rng_seed, i)).error:
            errors += 1
    return errors


def _erasure_block(p: SchemeParams, rng_seed: int, block: int, size: int) -> int:
    rng = trial_rng(rng_seed, block)
    erased = rng.random((size, p.n)) < p.erasure_prob
    return int(np.count_nonzero(erased.sum(axis=1) > p.n - p.k))


def _blocks(trials: int, size: int) -> list[tuple[int, int]]:
    return [(start, min(start + size, trials)) for start in range(0, trials, size)]


def run_trials(p: SchemeParams, trials: int, rng_seed: int, workers: int = 1,
               engine: str = "full") -> TrialResult:
    """Empirical block error rate; decode failures count as errors.

    ``engine="full"`` runs every trial through the whole scheme with a
    per-trial random stream.  ``engine="erasure"`` only simulates Bob's
    per-frame detections (vectorised, one stream per block of trials) and
    applies the decoder's acceptance rule, unerased >= k; the full engine's
    tests establish that this rule is exactly the decoder's behaviour.

    Results do not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if engine == "full":
        jobs = [(p, rng_seed, a, b) for a, b in _blocks(trials, -(-trials // (8 * workers)))]
        fn = _full_block
    elif engine == "erasure":
        jobs = [(p, rng_seed, i, b - a) for i, (a, b) in enumerate(_blocks(trials, BLOCK))]
        fn = _erasure_block
    else:
        raise ValueError(f"unknown engine {engine!r}")
    if workers <= 1:
        errors = sum(fn(*job) for job in jobs)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            errors = sum(pool.map(fn, *zip(*jobs)))
    return TrialResult(trials, errors, engine)


# ---------------------------------------------------------------------------
# Classical secrecy oracle
# ---------------------------------------------------------------------------

def oracle_state_count(p: SchemeParams) -> int:
    ext = p.extractor
    return ext.n_messages * (ext.field.order - 1) * (1 << ext.randomness_bits) * (1 << p.n)


def _seed_distance(p: SchemeParams, seed: int, masks, mask_probs) -> float:
    """TV distance between (M, E | S=seed) and uniform(M) x (E | S=seed)."""
    ext = p.extractor
    n_msg = ext.n_messages
    n_r = 1 << ext.randomness_bits
    weight = 1.0 / (n_msg * n_r)
    joint: dict[tuple[int, tuple[int, ...]], np.ndarray] = defaultdict(lambda: np.zeros(n_msg))
    for message in range(n_msg):
        for r in range(n_r):
            _, codeword = alice_encode(message, seed, r, p)
            for mask, positions, prob in zip(masks, *mask_probs):
                key = (mask, tuple(codeword[i] for i in positions))
                joint[key][message] += weight * prob
    total = 0.0
    for row in joint.values():
        total += np.abs(row - row.sum() / n_msg).sum()
    return 0.5 * total


def classical_secrecy_oracle(p: SchemeParams, exhaustive: bool = True,
                             n_seeds: int = 16,
                             rng: Optional[np.random.Generator] = None) -> float:
    """Exact statistical distance of (M, S, Eve's record) from the ideal system.

    Eve here is a classical on/off detector on the reflected port: she sees
    each frame's pulse position with probability 1 - exp(-(1 - eta) alpha^2).
    Seeds are uniform, so the distance is the average over seeds of the
    per-seed distance.  With ``exhaustive=False`` that average is estimated
    from ``n_seeds`` seeds drawn with ``rng`` (unbiased, not exact).
    """
    states = oracle_state_count(p)
    if states > ORACLE_MAX_STATES:
        raise InfeasibleError(f"state space of {states} exceeds {ORACLE_MAX_STATES}")
    ext = p.extractor
    see = 1.0 - eve_miss_probability(p.channel)
    masks = list(range(1 << p.n))
    positions = [[i for i in range(p.n) if mask >> i & 1] for mask in masks]
    probs = [see ** len(pos) * (1.0 - see) ** (p.n - len(pos)) for pos in positions]
    seeds = list(ext.seeds())
    if not exhaustive:
        rng = rng if rng is not None else np.random.default_rng(0)
        seeds = [int(s) for s in rng.choice(seeds, size=min(n_seeds, len(seeds)), replace=False)]
    dists = [_seed_distance(p, s, masks, (positions, probs)) for s in seeds]
    return math.fsum(dists) / len(dists)
