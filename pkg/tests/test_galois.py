import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppmwt.galois import (
    FieldElement,
    FieldMismatchError,
    FieldSpec,
    default_modulus,
    generator,
    gf_add,
    gf_inv,
    gf_mul,
    gf_pow,
    is_irreducible,
    log_tables,
    polymod,
)
from ppmwt.selftest import schoolbook_mul

GF8 = FieldSpec(3, 0b1011)


def el(v, f=GF8):
    return FieldElement(v, f)


def trial_division_irreducible(poly):
    """Independent oracle: no factor of degree 1..m/2."""
    m = poly.bit_length() - 1
    for f in range(2, 1 << (m // 2 + 1)):
        if polymod(poly, f) == 0:
            return False
    return True


def test_add_examples():
    assert gf_add(el(0b010), el(0b011)).value == 0b001
    assert gf_add(el(0b010), el(0)).value == 0b010
    assert gf_add(el(0b110), el(0b110)).value == 0


def test_mul_examples():
    assert gf_mul(el(0b010), el(0b011)).value == 0b110
    for a in range(8):
        assert gf_mul(el(a), el(1)).value == a
        assert gf_mul(el(a), el(0)).value == 0


def test_inv_examples():
    assert gf_inv(el(1)).value == 1
    # exhaustive search for the element whose product with x is 1
    assert [b for b in range(8) if GF8.mul(0b010, b) == 1] == [0b101]
    assert gf_inv(el(0b010)).value == 0b101
    with pytest.raises(ZeroDivisionError):
        gf_inv(el(0))


def test_pow_examples():
    assert gf_pow(el(5), 0).value == 1
    assert gf_pow(el(5), 1).value == 5
    x = el(0b010)
    acc = el(1)
    for _ in range(7):
        acc = gf_mul(acc, x)
    assert acc.value == 1 == gf_pow(x, 7).value


def test_mismatched_fields_rejected():
    with pytest.raises(FieldMismatchError):
        gf_add(el(1), el(1, FieldSpec(4)))
    with pytest.raises(FieldMismatchError):
        gf_mul(el(1), el(1, FieldSpec(3, 0b1101)))


def test_value_range():
    with pytest.raises(ValueError):
        el(8)


def test_modulus_validation():
    with pytest.raises(ValueError):
        FieldSpec(3, 0b1001)  # x^3 + 1 = (x + 1)(x^2 + x + 1)
    with pytest.raises(ValueError):
        FieldSpec(3, 0b10011)
    assert FieldSpec(3).modulus == 0b1011
    assert FieldSpec(8).modulus == 0x11B


@pytest.mark.parametrize("m", range(2, 15))
def test_default_modulus_is_smallest_irreducible(m):
    f = default_modulus(m)
    assert f.bit_length() - 1 == m
    assert trial_division_irreducible(f)
    assert not any(trial_division_irreducible(c) for c in range(1 << m, f))


def test_rabin_agrees_with_trial_division():
    for poly in range(2, 1 << 13):
        assert is_irreducible(poly) == trial_division_irreducible(poly), poly


def test_large_fields():
    for m in (64, 127, 246):
        f = FieldSpec(m)
        rng = random.Random(m)
        for _ in range(20):
            a = rng.randrange(1, f.order)
            assert f.mul(a, f.inv(a)) == 1
            b, c = rng.randrange(f.order), rng.randrange(f.order)
            assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)


@pytest.mark.parametrize("m", range(1, 5))
def test_mul_matches_schoolbook_exhaustive(m):
    f = FieldSpec(m)
    for a, b in itertools.product(range(f.order), repeat=2):
        assert f.mul(a, b) == schoolbook_mul(a, b, f.modulus)


@pytest.mark.parametrize("m", range(5, 17))
def test_mul_matches_schoolbook_random(m):
    f = FieldSpec(m)
    rng = random.Random(m)
    for _ in range(100_000 if m == 16 else 10_000):
        a, b = rng.randrange(f.order), rng.randrange(f.order)
        assert f.mul(a, b) == schoolbook_mul(a, b, f.modulus)


@pytest.mark.parametrize("m", range(1, 9))
def test_multiplicative_group(m):
    f = FieldSpec(m)
    nonzero = range(1, f.order)
    for a in nonzero:
        inv = f.inv(a)
        assert f.mul(a, inv) == 1
        assert f.inv(inv) == a
        assert f.pow(a, f.order - 1) == 1
    rng = random.Random(m)
    for _ in range(2000):
        a, b, c = (rng.randrange(1, f.order) for _ in range(3))
        assert f.mul(a, b) != 0
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))


@pytest.mark.parametrize("m", [2, 3, 4, 8, 12, 16])
def test_generator_and_tables(m):
    f = FieldSpec(m)
    g = generator(f)
    powers = {f.pow(g, i) for i in range(f.order - 1)}
    assert len(powers) == f.order - 1
    t = log_tables(f)
    rng = random.Random(m)
    for _ in range(2000):
        a, b = rng.randrange(f.order), rng.randrange(1, f.order)
        assert t.mul(a, b) == f.mul(a, b)
        assert t.div(a, b) == f.mul(a, f.inv(b))


fields = st.sampled_from([FieldSpec(m) for m in (3, 5, 8, 13, 31, 64)])


@settings(max_examples=200)
@given(fields, st.data())
def test_field_axioms(f, data):
    a, b, c = (data.draw(st.integers(0, f.order - 1)) for _ in range(3))
    A, B, C = f.element(a), f.element(b), f.element(c)
    assert A * B == B * A
    assert A + B == B + A
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert A + A == f.element(0)
    if b:
        assert (A / B) * B == A
