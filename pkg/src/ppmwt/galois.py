"""Arithmetic over binary extension fields GF(2^m).

Elements are plain Python ints: bit ``i`` of the value is the coefficient of
``x**i``.  The field modulus is stored the same way, with bit ``m`` set.
Multiplication is carry-less (shift and XOR) followed by reduction, which
works for any ``m``; :class:`LogTables` adds exp/log tables for the small
fields used as Reed-Solomon alphabets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


class FieldMismatchError(ValueError):
    """Operands come from different fields."""


# ---------------------------------------------------------------------------
# GF(2)[x] polynomial helpers (ints as coefficient bit masks)
# ---------------------------------------------------------------------------

def _spread_table() -> list[int]:
    table = []
    for byte in range(256):
        out = 0
        for i in range(8):
            if byte >> i & 1:
                out |= 1 << (2 * i)
        table.append(out)
    return table


_SPREAD = _spread_table()


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    out = 0
    shift = 0
    while b:
        if b & 1:
            out ^= a << shift
        b >>= 1
        shift += 1
    return out


def clsquare(a: int) -> int:
    """Square in GF(2)[x]: interleave zero bits."""
    out = 0
    shift = 0
    while a:
        out |= _SPREAD[a & 0xFF] << shift
        a >>= 8
        shift += 16
    return out


def polymod(a: int, modulus: int) -> int:
    deg = modulus.bit_length() - 1
    while True:
        top = a.bit_length() - 1
        if top < deg:
            return a
        a ^= modulus << (top - deg)


def polygcd(a: int, b: int) -> int:
    while b:
        a, b = b, polymod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    factors = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            factors.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        factors.append(n)
    return factors


def _small_irreducibles(max_degree: int) -> list[int]:
    """All irreducible polynomials up to ``max_degree`` (sieve by trial division)."""
    found: list[int] = []
    for poly in range(2, 1 << (max_degree + 1)):
        deg = poly.bit_length() - 1
        if all(
            polymod(poly, f) != 0
            for f in found
            if 2 * (f.bit_length() - 1) <= deg
        ):
            found.append(poly)
    return found


_SIEVE = _small_irreducibles(10)


def is_irreducible(poly: int) -> bool:
    """Rabin's irreducibility test over GF(2).

    ``poly`` of degree m is irreducible iff x^(2^m) = x mod poly and
    gcd(x^(2^(m/p)) - x, poly) = 1 for every prime p dividing m.
    """
    m = poly.bit_length() - 1
    if m < 1:
        return False
    if m == 1:
        return True
    if not poly & 1:
        return False
    for f in _SIEVE:
        if 2 * (f.bit_length() - 1) > m:
            break
        if polymod(poly, f) == 0:
            return False

    checkpoints = {m // p for p in _prime_factors(m)}
    x = 0b10
    power = x
    for i in range(1, m + 1):
        power = polymod(clsquare(power), poly)
        if i in checkpoints and polygcd(poly, power ^ x) != 1:
            return False
    return power == x


@lru_cache(maxsize=None)
def default_modulus(m: int) -> int:
    """Lexicographically smallest irreducible polynomial of degree ``m``."""
    if m < 1:
        raise ValueError(f"extension degree must be positive, got {m}")
    if m == 1:
        return 0b10
    base = 1 << m
    for low in range(1, base, 2):
        if is_irreducible(base | low):
            return base | low
    raise AssertionError("unreachable: irreducibles exist in every degree")


# ---------------------------------------------------------------------------
# Field description
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """GF(2^m) with a fixed modulus.

    ``FieldSpec(m)`` picks :func:`default_modulus`; pass ``modulus`` to
    override it.  The modulus is verified irreducible on construction.
    """

    m: int
    modulus: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"extension degree must be positive, got {self.m}")
        if self.modulus == 0:
            object.__setattr__(self, "modulus", default_modulus(self.m))
        elif self.modulus.bit_length() - 1 != self.m:
            raise ValueError(
                f"modulus {self.modulus:#x} does not have degree {self.m}")
        elif not _checked_irreducible(self.modulus):
            raise ValueError(f"modulus {self.modulus:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.m

    def mul(self, a: int, b: int) -> int:
        return polymod(clmul(a, b), self.modulus)

    def inv(self, a: int) -> int:
        """Inverse by the extended Euclidean algorithm in GF(2)[x]."""
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        u, v = a, self.modulus
        g1, g2 = 1, 0
        while u != 1:
            shift = u.bit_length() - v.bit_length()
            if shift < 0:
                u, v = v, u
                g1, g2 = g2, g1
                shift = -shift
            u ^= v << shift
            g1 ^= g2 << shift
        return polymod(g1, self.modulus)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise ValueError("negative exponent")
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def element(self, value: int) -> FieldElement:
        return FieldElement(value, self)


@lru_cache(maxsize=256)
def _checked_irreducible(modulus: int) -> bool:
    return is_irreducible(modulus)


@lru_cache(maxsize=None)
def generator(field: FieldSpec) -> int:
    """Smallest element of multiplicative order 2^m - 1."""
    order = field.order - 1
    if order == 1:
        return 1
    cofactors = [order // p for p in _prime_factors(order)]
    for g in range(2, field.order):
        if all(field.pow(g, c) != 1 for c in cofactors):
            return g
    raise AssertionError("multiplicative group is cyclic")


class LogTables:
    """exp/log tables for GF(2^m), m <= 16."""

    def __init__(self, field: FieldSpec):
        if field.m > 16:
            raise ValueError("log tables are limited to m <= 16")
        self.field = field
        size = field.order - 1
        g = generator(field)
        exp = [0] * (2 * size)
        log = [0] * field.order
        x = 1
        for i in range(size):
            exp[i] = x
            log[x] = i
            x = field.mul(x, g)
        exp[size:] = exp[:size]
        self.exp = exp
        self.log = log
        self.size = size

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero field element")
        if a == 0:
            return 0
        return self.exp[self.log[a] - self.log[b] + self.size]

    def inv(self, a: int) -> int:
        return self.div(1, a)


@lru_cache(maxsize=None)
def log_tables(field: FieldSpec) -> LogTables:
    return LogTables(field)


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldElement:
    value: int
    field: FieldSpec

    def __post_init__(self):
        if not 0 <= self.value < self.field.order:
            raise ValueError(
                f"{self.value} is not an element of GF(2^{self.field.m})")

    def _check(self, other: FieldElement) -> None:
        if self.field != other.field:
            raise FieldMismatchError(
                f"GF(2^{self.field.m}) vs GF(2^{other.field.m}) "
                f"(moduli {self.field.modulus:#x}, {other.field.modulus:#x})")

    def __add__(self, other: FieldElement) -> FieldElement:
        return gf_add(self, other)

    __sub__ = __add__

    def __mul__(self, other: FieldElement) -> FieldElement:
        return gf_mul(self, other)

    def __pow__(self, e: int) -> FieldElement:
        return gf_pow(self, e)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        return gf_mul(self, gf_inv(other))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value


def gf_add(a: FieldElement, b: FieldElement) -> FieldElement:
    a._check(b)
    return FieldElement(a.value ^ b.value, a.field)


def gf_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    a._check(b)
    return FieldElement(a.field.mul(a.value, b.value), a.field)


def gf_inv(a: FieldElement) -> FieldElement:
    return FieldElement(a.field.inv(a.value), a.field)


def gf_pow(a: FieldElement, e: int) -> FieldElement:
    return FieldElement(a.field.pow(a.value, e), a.field)
