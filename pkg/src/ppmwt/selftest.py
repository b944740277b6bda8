"""Exhaustive small-instance oracle suite behind ``ppmwt selftest``."""

from __future__ import annotations

import itertools
import random
from collections.abc import Callable

from ppmwt import bounds
from ppmwt.extractor import ExtractorSpec, extract, invert
from ppmwt.galois import FieldSpec, polymod
from ppmwt.pipeline import alice_encode, bob_decode, classical_secrecy_oracle
from ppmwt.params import SchemeParams
from ppmwt.rscode import DecodeFailure, RSCodeSpec, rs_decode_erasures, rs_encode


def schoolbook_mul(a: int, b: int, modulus: int) -> int:
    """Coefficient-list polynomial product, then reduction; independent of clmul."""
    ca = [(a >> i) & 1 for i in range(a.bit_length())]
    cb = [(b >> i) & 1 for i in range(b.bit_length())]
    prod = [0] * max(len(ca) + len(cb) - 1, 0)
    for i, x in enumerate(ca):
        for j, y in enumerate(cb):
            prod[i + j] ^= x & y
    value = sum(c << i for i, c in enumerate(prod))
    return polymod(value, modulus)


def check_field() -> None:
    for m in range(1, 7):
        f = FieldSpec(m)
        for a in range(f.order):
            for b in range(f.order):
                assert f.mul(a, b) == schoolbook_mul(a, b, f.modulus), (m, a, b)
            if a:
                assert f.mul(a, f.inv(a)) == 1, (m, a)


def check_extractor() -> None:
    for m in range(1, 7):
        field = FieldSpec(m)
        for lam in range(m + 1):
            spec = ExtractorSpec(field, lam)
            for s in spec.seeds():
                images = set()
                for msg in range(spec.n_messages):
                    for r in range(1 << spec.randomness_bits):
                        l = invert(msg, s, r, spec)
                        assert extract(l, s, spec) == msg
                        images.add(l)
                assert len(images) == field.order


def check_rs_erasures() -> None:
    spec = RSCodeSpec.for_alphabet(8, 3)
    rng = random.Random(1)
    for _ in range(20):
        msg = [rng.randrange(8) for _ in range(spec.k)]
        word = rs_encode(msg, spec)
        for weight in range(spec.n + 1):
            for erased in itertools.combinations(range(spec.n), weight):
                received = [None if i in erased else c for i, c in enumerate(word)]
                if weight <= spec.n - spec.k:
                    assert rs_decode_erasures(received, spec) == msg
                else:
                    try:
                        rs_decode_erasures(received, spec)
                    except DecodeFailure:
                        continue
                    raise AssertionError(f"decoded with {weight} erasures")


def make_lossless_check(fault: bool) -> Callable[[], None]:
    def check() -> None:
        p = SchemeParams(eta=0.8, b=8, k=2, pulse_energy=1.0, lam=3)
        ext = p.extractor
        for msg in range(ext.n_messages):
            for s in ext.seeds():
                for r in range(1 << ext.randomness_bits):
                    _, word = alice_encode(msg, s, r, p, fault=fault)
                    assert bob_decode(word, s, p) == msg, (msg, s, r)
    return check


def check_secrecy_oracle() -> None:
    for k, lam in [(1, 1), (2, 1)]:
        p = SchemeParams(eta=0.8, b=8, k=k, pulse_energy=0.5, lam=lam)
        _, report = bounds.minimize_delta(p)
        assert classical_secrecy_oracle(p) <= report.delta_bound


def run(fault: bool = False) -> list[tuple[str, bool, str]]:
    checks = [
        ("field axioms and schoolbook oracle, m <= 6", check_field),
        ("extractor round trip and preimage bijectivity, m <= 6", check_extractor),
        ("(8,7,3) Reed-Solomon erasure exhaustion", check_rs_erasures),
        ("lossless end-to-end round trip, b = 8", make_lossless_check(fault)),
        ("classical secrecy oracle <= Delta bound", check_secrecy_oracle),
    ]
    results = []
    for name, fn in checks:
        try:
            fn()
        except (AssertionError, DecodeFailure, ArithmeticError, ValueError) as exc:
            results.append((name, False, f"{type(exc).__name__}: {exc}"))
        else:
            results.append((name, True, ""))
    return results

