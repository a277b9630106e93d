"""Field towers and their square-class groups.

A tower is a base field (a finite field F_q with q odd, a real closed field,
or a quadratically closed field) followed by iterated formal Laurent series
variables ``t1, ..., tk``.  The last variable is the outermost one; every
valuation-theoretic recursion peels it off first.

Square classes are stored as a small bit mask::

    bit 0       exponent of the base nonsquare (s for F_q, -1 for R)
    bit j >= 1  exponent of the j-th uniformizer mod 2

so the group law is XOR of masks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import product

from .errors import ValidationError

FINITE = "F"
REAL = "R"
QUADCLOSED = "C"


def _is_odd_prime_power(q: int) -> bool:
    if q < 3 or q % 2 == 0:
        return False
    p = 3
    while p * p <= q:
        if q % p == 0:
            break
        p += 2
    else:
        return True  # q itself is prime
    while q % p == 0:
        q //= p
    return q == 1


@dataclass(frozen=True)
class FieldTower:
    kind: str
    q: int | None = None
    vars: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (FINITE, REAL, QUADCLOSED):
            raise ValidationError(f"unknown base field kind {self.kind!r}")
        if self.kind == FINITE:
            if self.q is None or not _is_odd_prime_power(self.q):
                raise ValidationError(f"F_q needs an odd prime power q >= 3, got {self.q}")
        elif self.q is not None:
            raise ValidationError("only finite base fields carry q")
        if len(set(self.vars)) != len(self.vars):
            raise ValidationError(f"duplicate uniformizer names in {self.vars}")
        for v in self.vars:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v) or v in ("s", "H", "x"):
                raise ValidationError(f"invalid uniformizer name {v!r}")

    @property
    def height(self) -> int:
        return len(self.vars)

    @property
    def base_size(self) -> int:
        """Number of square classes of the base field."""
        return 1 if self.kind == QUADCLOSED else 2

    @property
    def num_classes(self) -> int:
        return self.base_size << self.height

    @cached_property
    def minus_one_bits(self) -> int:
        if self.kind == REAL:
            return 1
        if self.kind == FINITE and self.q % 4 == 3:
            return 1
        return 0

    @property
    def minus_one(self) -> SquareClass:
        return SquareClass(self, self.minus_one_bits)

    @property
    def one(self) -> SquareClass:
        return SquareClass(self, 0)

    def residue(self) -> FieldTower:
        if not self.vars:
            raise ValidationError(f"{self} has no uniformizer to peel")
        return FieldTower(self.kind, self.q, self.vars[:-1])

    def extend(self, var: str) -> FieldTower:
        return FieldTower(self.kind, self.q, self.vars + (var,))

    @property
    def uniformizer(self) -> SquareClass:
        """Class of the outermost uniformizer."""
        if not self.vars:
            raise ValidationError(f"{self} has no uniformizer")
        return SquareClass(self, 1 << self.height)

    @cached_property
    def class_bits(self) -> tuple[int, ...]:
        """All masks in enumeration order: lexicographic on (base_bit, exps)."""
        out = []
        for base in range(self.base_size):
            for exps in product((0, 1), repeat=self.height):
                bits = base
                for j, e in enumerate(exps, start=1):
                    bits |= e << j
                out.append(bits)
        return tuple(out)

    @cached_property
    def class_order(self) -> dict[int, int]:
        return {b: i for i, b in enumerate(self.class_bits)}

    def __str__(self):
        base = f"F{self.q}" if self.kind == FINITE else self.kind
        if self.vars:
            return f"{base}[[{','.join(self.vars)}]]"
        return base


@dataclass(frozen=True)
class SquareClass:
    field: FieldTower
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> (self.field.height + 1):
            raise ValidationError(f"mask {self.bits} out of range for {self.field}")
        if self.field.kind == QUADCLOSED and self.bits & 1:
            raise ValidationError("a quadratically closed base has no nonsquare")

    @property
    def base_bit(self) -> int:
        return self.bits & 1

    @property
    def exps(self) -> tuple[int, ...]:
        return tuple((self.bits >> j) & 1 for j in range(1, self.field.height + 1))

    def __mul__(self, other: SquareClass) -> SquareClass:
        return mul(self, other)

    def __neg__(self) -> SquareClass:
        return SquareClass(self.field, self.bits ^ self.field.minus_one_bits)

    def sort_key(self):
        return (self.base_bit, self.exps)

    def __str__(self):
        return format_class(self.field, self.bits)

    def __repr__(self):
        return f"SquareClass({self.field}, {self})"


def mul(c1: SquareClass, c2: SquareClass) -> SquareClass:
    if c1.field != c2.field:
        raise ValidationError(f"square classes over different towers: {c1.field} vs {c2.field}")
    return SquareClass(c1.field, c1.bits ^ c2.bits)


def class_of_minus_one(field: FieldTower) -> SquareClass:
    return field.minus_one


def enumerate_classes(field: FieldTower) -> list[SquareClass]:
    return [SquareClass(field, b) for b in field.class_bits]


def split_class(c: SquareClass) -> tuple[SquareClass, int]:
    """Split off the outermost uniformizer: ``c = lift(unit) * t**t_exp``."""
    k = c.field.height
    if k == 0:
        raise ValidationError("split_class needs a tower of height >= 1")
    top = 1 << k
    return SquareClass(c.field.residue(), c.bits & ~top), (c.bits >> k) & 1


def lift_class(c: SquareClass, field: FieldTower, t_exp: int = 0) -> SquareClass:
    if field.height == 0 or field.residue() != c.field:
        raise ValidationError(f"{c.field} is not the residue tower of {field}")
    return SquareClass(field, c.bits | ((t_exp & 1) << field.height))


# --- text syntax ---------------------------------------------------------------

_FIELD_RE = re.compile(r"(?:F(\d+)|(R)|(C))(?:\[\[(.*)\]\])?")


def parse_field(src: str) -> FieldTower:
    """Parse ``F<q>[[v1,...,vk]]``, ``R[[...]]`` or ``C[[...]]``."""
    text = re.sub(r"\s+", "", src)
    m = _FIELD_RE.fullmatch(text)
    if not m:
        raise ValidationError(f"malformed field descriptor {src!r}")
    q, real, quad, inner = m.groups()
    names = tuple(inner.split(",")) if inner else ()
    if inner is not None and not inner:
        names = ()
    if any(not v for v in names):
        raise ValidationError(f"empty variable name in {src!r}")
    if q is not None:
        return FieldTower(FINITE, int(q), names)
    return FieldTower(REAL if real else QUADCLOSED, None, names)


def parse_class(src: str, field: FieldTower) -> SquareClass:
    """Parse a class literal such as ``-s*t1*t2``."""
    text = re.sub(r"\s+", "", src)
    bits = 0
    if text.startswith("-"):
        bits ^= field.minus_one_bits
        text = text[1:]
    if not text:
        raise ValidationError(f"empty square-class literal {src!r}")
    for factor in text.split("*"):
        bits ^= factor_bits(factor, field)
    return SquareClass(field, bits)


def factor_bits(factor: str, field: FieldTower) -> int:
    if factor == "1":
        return 0
    if factor == "s":
        if field.kind == QUADCLOSED:
            raise ValidationError("s is undefined over a quadratically closed base")
        return 1
    if factor in field.vars:
        return 1 << (field.vars.index(factor) + 1)
    raise ValidationError(f"unknown variable {factor}")


def format_class(field: FieldTower, bits: int) -> str:
    parts = []
    sign = ""
    if bits & 1:
        if field.kind == REAL:
            sign = "-"
        else:
            parts.append("s")
    for j, v in enumerate(field.vars, start=1):
        if bits >> j & 1:
            parts.append(v)
    return sign + ("*".join(parts) if parts else "1")
