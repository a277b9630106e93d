"""Isotropy, anisotropic parts and isometry by Springer recursion.

Every tower here is 2-Henselian, so a form ``f = f1 + t*f2`` (unimodular
``f1, f2``) is anisotropic exactly when both residue forms are, and its
anisotropic part is ``lift(an(f1)) + t*lift(an(f2))``.  Recursing down to the
base field leaves the explicit rules for F_q, R and C.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import ValidationError
from .forms import Form, negate, perp, scale
from .squareclass import QUADCLOSED, REAL, FieldTower, SquareClass, enumerate_classes


@dataclass(frozen=True)
class WittClass:
    """Anisotropic representative of a Witt class, canonically ordered."""

    field: FieldTower
    entries: tuple[int, ...]

    @property
    def form(self) -> Form:
        return Form(self.field, self.entries)

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def diag(self) -> list[SquareClass]:
        return self.form.diag

    def is_zero(self) -> bool:
        return not self.entries

    def __str__(self):
        return str(self.form)


# --- base fields -------------------------------------------------------------


def _base_isotropic(field: FieldTower, entries: tuple[int, ...]) -> bool:
    d = len(entries)
    if field.kind == QUADCLOSED:
        return d >= 2
    if field.kind == REAL:
        return 0 in entries and 1 in entries
    if d >= 3:
        return True
    if d == 2:
        a, b = entries
        return (a ^ b ^ field.minus_one_bits) == 0
    return False


def _base_anisotropic(field: FieldTower, entries: tuple[int, ...]) -> tuple[int, ...]:
    d = len(entries)
    if field.kind == QUADCLOSED:
        return (0,) * (d % 2)
    if field.kind == REAL:
        sig = entries.count(0) - entries.count(1)
        return (0,) * sig if sig >= 0 else (1,) * (-sig)
    # F_q: forms are classified by (dim, det) and every form of dim >= 3 is
    # isotropic, so split off (dim - r)/2 hyperbolic planes, r in {1, 2}
    m1 = field.minus_one_bits
    det = 0
    for a in entries:
        det ^= a
    if d % 2:
        planes = (d - 1) // 2
        return (det ^ (m1 if planes % 2 else 0),)
    if d == 0:
        return ()
    planes = (d - 2) // 2
    rdet = det ^ (m1 if planes % 2 else 0)
    if rdet ^ m1 == 0:
        return ()  # <1, -1> up to isometry
    if not _base_isotropic(field, (0, rdet)):
        return (0, rdet)
    return (1, 1 ^ rdet)


# --- Springer recursion ------------------------------------------------------


def _split(field: FieldTower, entries):
    top = 1 << field.height
    first = tuple(a for a in entries if not a & top)
    second = tuple(a ^ top for a in entries if a & top)
    return first, second


@lru_cache(maxsize=1 << 16)
def _isotropic(field: FieldTower, entries: tuple[int, ...]) -> bool:
    if field.height == 0:
        return _base_isotropic(field, entries)
    res = field.residue()
    f1, f2 = _split(field, entries)
    return _isotropic(res, tuple(sorted(f1))) or _isotropic(res, tuple(sorted(f2)))


@lru_cache(maxsize=1 << 16)
def _anisotropic(field: FieldTower, entries: tuple[int, ...]) -> tuple[int, ...]:
    if field.height == 0:
        return _base_anisotropic(field, entries)
    res = field.residue()
    top = 1 << field.height
    f1, f2 = _split(field, entries)
    a1 = _anisotropic(res, tuple(sorted(f1)))
    a2 = _anisotropic(res, tuple(sorted(f2)))
    return a1 + tuple(b | top for b in a2)


def is_isotropic(f: Form) -> bool:
    return _isotropic(f.field, tuple(sorted(f.entries)))


def anisotropic_part(f: Form) -> WittClass:
    return WittClass(f.field, _anisotropic(f.field, tuple(sorted(f.entries))))


def diman(f: Form) -> int:
    return anisotropic_part(f).dim


def witt_index(f: Form) -> int:
    return (f.dim - diman(f)) // 2


def is_hyperbolic(f: Form) -> bool:
    return diman(f) == 0


def witt_equal(f: Form, g: Form) -> bool:
    return diman(perp(f, negate(g))) == 0


def isometric(f: Form, g: Form) -> bool:
    return f.dim == g.dim and witt_equal(f, g)


def represents(f: Form, a: SquareClass) -> bool:
    if f.dim < 1:
        raise ValidationError("the zero form represents nothing")
    if is_isotropic(f):
        return True
    return is_isotropic(perp(f, Form(f.field, (a.bits ^ f.field.minus_one_bits,))))


def is_subform(s: Form, f: Form) -> bool:
    if s.field != f.field:
        raise ValidationError(f"forms over different towers: {s.field} vs {f.field}")
    if is_isotropic(s) or is_isotropic(f):
        raise ValidationError("is_subform expects anisotropic forms; reduce them first")
    if s.dim > f.dim:
        return False
    return witt_index(perp(f, negate(s))) == s.dim


def similar(f: Form, g: Form) -> SquareClass | None:
    """First class ``x`` (in enumeration order) with ``f = x*g``, or None."""
    if f.field != g.field:
        raise ValidationError(f"forms over different towers: {f.field} vs {g.field}")
    if f.dim != g.dim:
        return None
    for x in enumerate_classes(f.field):
        if isometric(f, scale(x, g)):
            return x
    return None
