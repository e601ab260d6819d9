"""Arithmetic in GF(2^n) for small widths.

Elements are plain ``int`` bit patterns at the :class:`FieldSpec` level, which
is what the mode and attack code use on hot paths.  :class:`FieldElement`
wraps a value together with its field for callers that want operator syntax
and field-mismatch checking.
"""

from __future__ import annotations

from dataclasses import dataclass

MIN_WIDTH = 6
MAX_WIDTH = 16

# Low-weight irreducible polynomials, one per supported width.
DEFAULT_POLYS = {
    6: 0b1000011,                # x^6 + x + 1
    7: 0b10000011,               # x^7 + x + 1
    8: 0b100011011,              # x^8 + x^4 + x^3 + x + 1
    9: 0b1000010001,             # x^9 + x^4 + 1
    10: 0b10000001001,           # x^10 + x^3 + 1
    11: 0b100000000101,          # x^11 + x^2 + 1
    12: 0b1000001010011,         # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,        # x^13 + x^4 + x^3 + x + 1
    14: 0b100000000100001,       # x^14 + x^5 + 1
    15: 0b1000000000000011,      # x^15 + x + 1
    16: 0b10000000000101011,     # x^16 + x^5 + x^3 + x + 1
}


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit patterns (no reduction)."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, m: int) -> int:
    """Remainder of polynomial ``a`` modulo ``m`` over GF(2)."""
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1 or not poly & 1:
        return deg == 1
    for d in range(1, deg // 2 + 1):
        for q in range(1 << d, 1 << (d + 1)):
            if poly_mod(poly, q) == 0:
                return False
    return True


@dataclass(frozen=True)
class BinaryField:
    """GF(2^width) modulo ``poly`` with no width bounds.

    Exists so small textbook fields such as GF(2^4) can be exercised; the
    mode and attack code always go through :class:`FieldSpec`.
    """

    width: int
    poly: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be positive")
        if self.poly.bit_length() != self.width + 1 or not self.poly & 1:
            raise ValueError(f"poly {self.poly:#x} is not a degree-{self.width} polynomial with constant term")
        if not is_irreducible(self.poly):
            raise ValueError(f"poly {self.poly:#x} is reducible")

    @property
    def size(self) -> int:
        return 1 << self.width

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1

    def check(self, a: int) -> int:
        if not 0 <= a <= self.mask:
            raise ValueError(f"{a!r} is not a {self.width}-bit value")
        return a

    def const(self, k: int) -> int:
        """Embed a small integer by its bit pattern, reduced modulo ``poly``."""
        if k < 0:
            raise ValueError("constant must be non-negative")
        return poly_mod(k, self.poly)

    def mul(self, a: int, b: int) -> int:
        return poly_mod(clmul(a, b), self.poly)

    def double(self, a: int) -> int:
        a <<= 1
        if a >> self.width:
            a ^= self.poly
        return a

    def inv(self, a: int) -> int:
        """Inverse via the extended Euclidean algorithm on polynomials."""
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^n)")
        r0, r1 = self.poly, a
        s0, s1 = 0, 1
        while r1 != 1:
            shift = r0.bit_length() - r1.bit_length()
            if shift < 0:
                r0, r1 = r1, r0
                s0, s1 = s1, s0
                continue
            r0 ^= r1 << shift
            s0 ^= s1 << shift
            if r0 == 0:
                raise ZeroDivisionError("element not invertible; poly reducible?")
        return poly_mod(s1, self.poly)

    def element(self, value: int) -> FieldElement:
        return FieldElement(value, self)


@dataclass(frozen=True)
class FieldSpec(BinaryField):
    """The field used by the modes: width in [6, 16], default GF(2^8).

    Six bits is the smallest width at which every mask constant the modes use
    (3, 4, 5, 8, 9, 10, 12, 13, 16, 26) is a distinct nonzero element.
    """

    width: int = 8
    poly: int | None = None

    def __post_init__(self):
        if not MIN_WIDTH <= self.width <= MAX_WIDTH:
            raise ValueError(f"width must be in [{MIN_WIDTH}, {MAX_WIDTH}], got {self.width}")
        if self.poly is None:
            object.__setattr__(self, "poly", DEFAULT_POLYS[self.width])
        super().__post_init__()


@dataclass(frozen=True)
class FieldElement:
    value: int
    spec: BinaryField

    def __post_init__(self):
        self.spec.check(self.value)

    def _same(self, other: FieldElement) -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.spec != self.spec:
            raise ValueError("field elements belong to different fields")

    def __add__(self, other: FieldElement) -> FieldElement:
        self._same(other)
        return FieldElement(self.value ^ other.value, self.spec)

    __xor__ = __add__
    __sub__ = __add__

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._same(other)
        return FieldElement(self.spec.mul(self.value, other.value), self.spec)

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"FieldElement({self.value:#0{(self.spec.width + 3) // 4 + 2}x}, n={self.spec.width})"


def fe_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def fe_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def fe_double(a: FieldElement) -> FieldElement:
    return FieldElement(a.spec.double(a.value), a.spec)


def fe_inv(a: FieldElement) -> FieldElement:
    return FieldElement(a.spec.inv(a.value), a.spec)


def fe_const(k: int, spec: BinaryField) -> FieldElement:
    return FieldElement(spec.const(k), spec)
