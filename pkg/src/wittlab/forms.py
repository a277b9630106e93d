"""Diagonal quadratic forms over a field tower.

Forms are never anything but diagonal: ``Form(field, entries)`` where each
entry is a square-class mask (see :mod:`wittlab.squareclass`).  Isometry is
decided in :mod:`wittlab.witt`, never by comparing diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import ValidationError
from .squareclass import FieldTower, SquareClass, format_class


@dataclass(frozen=True)
class Form:
    field: FieldTower
    entries: tuple[int, ...] = ()

    @classmethod
    def of(cls, field: FieldTower, classes: Iterable[SquareClass | int]) -> Form:
        bits = []
        for c in classes:
            if isinstance(c, SquareClass):
                if c.field != field:
                    raise ValidationError(f"class {c} does not belong to {field}")
                bits.append(c.bits)
            else:
                bits.append(SquareClass(field, c).bits)
        return cls(field, tuple(bits))

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def diag(self) -> list[SquareClass]:
        return [SquareClass(self.field, b) for b in self.entries]

    def __len__(self):
        return len(self.entries)

    def __add__(self, other: Form) -> Form:
        return perp(self, other)

    def __mul__(self, other: Form) -> Form:
        return tensor(self, other)

    def __neg__(self) -> Form:
        return negate(self)

    def __str__(self):
        return format_form(self)


@dataclass(frozen=True)
class PfisterSpec:
    field: FieldTower
    slots: tuple[int, ...] = ()

    @classmethod
    def of(cls, field: FieldTower, classes: Iterable[SquareClass | int]) -> PfisterSpec:
        return cls(field, Form.of(field, classes).entries)

    @property
    def fold(self) -> int:
        return len(self.slots)

    def __str__(self):
        return "<<" + ",".join(format_class(self.field, b) for b in self.slots) + ">>"


def _same_field(f: Form, g: Form):
    if f.field != g.field:
        raise ValidationError(f"forms over different towers: {f.field} vs {g.field}")


def perp(f: Form, g: Form) -> Form:
    _same_field(f, g)
    return Form(f.field, f.entries + g.entries)


def tensor(f: Form, g: Form) -> Form:
    _same_field(f, g)
    return Form(f.field, tuple(a ^ b for a in f.entries for b in g.entries))


def scale(c: SquareClass | int, f: Form) -> Form:
    if isinstance(c, SquareClass):
        if c.field != f.field:
            raise ValidationError(f"class over {c.field} cannot scale a form over {f.field}")
        c = c.bits
    return Form(f.field, tuple(a ^ c for a in f.entries))


def negate(f: Form) -> Form:
    return scale(f.field.minus_one_bits, f)


def hyperbolic(field: FieldTower, planes: int = 1) -> Form:
    return Form(field, (0, field.minus_one_bits) * planes)


def pfister(spec: PfisterSpec) -> Form:
    """Expand ``<<a1,...,an>>`` as the tensor product of the ``<1,-a_i>``."""
    field = spec.field
    m1 = field.minus_one_bits
    out = (0,)
    for a in spec.slots:
        out = out + tuple(x ^ a ^ m1 for x in out)
    return Form(field, out)


def det(f: Form) -> SquareClass:
    bits = 0
    for a in f.entries:
        bits ^= a
    return SquareClass(f.field, bits)


def disc(f: Form) -> SquareClass:
    d = f.dim
    bits = det(f).bits
    if (d * (d - 1) // 2) % 2:
        bits ^= f.field.minus_one_bits
    return SquareClass(f.field, bits)


def residue_split(f: Form) -> tuple[Form, Form]:
    """Return the first and second residue forms with respect to the outermost uniformizer."""
    k = f.field.height
    if k == 0:
        raise ValidationError("residue_split needs a tower of height >= 1")
    res = f.field.residue()
    top = 1 << k
    first = tuple(a for a in f.entries if not a & top)
    second = tuple(a ^ top for a in f.entries if a & top)
    return Form(res, first), Form(res, second)


def lift(f: Form, field: FieldTower, twist: int = 0) -> Form:
    if field.height == 0 or field.residue() != f.field:
        raise ValidationError(f"{f.field} is not the residue tower of {field}")
    shift = (twist & 1) << field.height
    return Form(field, tuple(a | shift for a in f.entries))


def specialize(f: Form, unit: SquareClass | None = None) -> Form:
    """Substitute a unit class for the outermost uniformizer.

    This is the ring homomorphism ``W(K) -> W(F)`` sending ``<u t^e>`` to
    ``<u * unit^e>``; it is the identity on lifted forms and sends similarity
    classes of Pfister forms to similarity classes of Pfister forms.
    """
    res = f.field.residue()
    ubits = 0 if unit is None else unit.bits
    if unit is not None and unit.field != res:
        raise ValidationError(f"unit must live over {res}")
    top = 1 << f.field.height
    return Form(res, tuple((a & ~top) ^ (ubits if a & top else 0) for a in f.entries))


def format_form(f: Form) -> str:
    return "<" + ",".join(format_class(f.field, b) for b in f.entries) + ">"
