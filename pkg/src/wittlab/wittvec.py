"""Group-ring coordinates for Witt classes.

For an iterated Laurent tower over a base field ``E`` the Witt ring is the
group ring ``W(E)[G]`` with ``G`` the elementary abelian group generated by
the uniformizers.  A Witt class is therefore a short integer vector:

==========  =========  ===========================================
base        modulus    coordinates
==========  =========  ===========================================
C           2          one per monomial ``t^e``
F_q, q=1(4) 2          one per full square class (``W(F_q)=Z/2[C2]``)
F_q, q=3(4) 4          one per monomial, ``<s t^e> = -<t^e>``
R           0 (= Z)    one per monomial, ``<-t^e> = -<t^e>``
==========  =========  ===========================================

The outermost uniformizer is always the top bit of the coordinate index, so
the two residue forms are the two halves of the vector.  The search code in
:mod:`wittlab.ideals` and :mod:`wittlab.structure` runs on these vectors; the
public decision procedures in :mod:`wittlab.witt` use the Springer recursion
on diagonals and serve as the independent check of every witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .squareclass import FINITE, QUADCLOSED, REAL, FieldTower

Vec = tuple[int, ...]


@dataclass(frozen=True)
class VecSpace:
    field: FieldTower
    modulus: int
    length: int
    index: tuple[int, ...]  # class mask -> coordinate
    sign: tuple[int, ...]  # class mask -> +1 / -1
    perms: tuple[tuple[int, ...], ...]  # class mask -> coordinate permutation (an involution)

    @property
    def zero(self) -> Vec:
        return (0,) * self.length

    def basis(self, bits: int) -> Vec:
        v = [0] * self.length
        v[self.index[bits]] = self.sign[bits] % self.modulus if self.modulus else self.sign[bits]
        return tuple(v)

    def of_entries(self, entries) -> Vec:
        v = [0] * self.length
        idx, sgn = self.index, self.sign
        for b in entries:
            v[idx[b]] += sgn[b]
        if self.modulus:
            m = self.modulus
            return tuple(x % m for x in v)
        return tuple(v)

    def add(self, a: Vec, b: Vec) -> Vec:
        m = self.modulus
        if m == 2:
            return tuple(x ^ y for x, y in zip(a, b))
        if m:
            return tuple((x + y) % m for x, y in zip(a, b))
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a: Vec, b: Vec) -> Vec:
        m = self.modulus
        if m == 2:
            return tuple(x ^ y for x, y in zip(a, b))
        if m:
            return tuple((x - y) % m for x, y in zip(a, b))
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a: Vec) -> Vec:
        m = self.modulus
        if m == 2:
            return a
        if m:
            return tuple((-x) % m for x in a)
        return tuple(-x for x in a)

    def scale(self, a: Vec, bits: int) -> Vec:
        perm = self.perms[bits]
        if self.sign[bits] > 0 or self.modulus == 2:
            return tuple(a[p] for p in perm)
        m = self.modulus
        if m:
            return tuple((-a[p]) % m for p in perm)
        return tuple(-a[p] for p in perm)

    def diman(self, a: Vec) -> int:
        m = self.modulus
        if m == 2:
            return sum(a)
        if m == 4:
            return sum(_Z4_DIM[x] for x in a)
        return sum(abs(x) for x in a)

    def is_zero(self, a: Vec) -> bool:
        return not any(a)

    def halves(self, a: Vec) -> tuple[Vec, Vec]:
        h = self.length // 2
        return a[:h], a[h:]

    def entries(self, a: Vec) -> tuple[int, ...]:
        """Canonical anisotropic diagonal (as class masks) of the class ``a``."""
        out: list[int] = []
        kind = self.field.kind
        if self.modulus == 2:
            if kind == QUADCLOSED:
                return tuple(i << 1 for i, x in enumerate(a) if x)
            return tuple(i for i, x in enumerate(a) if x)
        for i, x in enumerate(a):
            if not x:
                continue
            e = i << 1
            if self.modulus == 4:
                out.extend(_Z4_BLOCK[x](e))
            elif x > 0:
                out.extend([e] * x)
            else:
                out.extend([e | 1] * (-x))
        return tuple(out)


_Z4_DIM = (0, 1, 2, 1)
_Z4_BLOCK = (None, lambda e: (e,), lambda e: (e, e), lambda e: (e | 1,))


@lru_cache(maxsize=None)
def space(field: FieldTower) -> VecSpace:
    k = field.height
    nbits = 2 << k
    if field.kind == QUADCLOSED:
        modulus, length = 2, 1 << k
        index = [b >> 1 for b in range(nbits)]
        sign = [1] * nbits
    elif field.kind == FINITE and field.q % 4 == 1:
        modulus, length = 2, 2 << k
        index = list(range(nbits))
        sign = [1] * nbits
    else:
        modulus = 4 if field.kind == FINITE else 0
        length = 1 << k
        index = [b >> 1 for b in range(nbits)]
        sign = [-1 if b & 1 else 1 for b in range(nbits)]
    assert field.kind in (FINITE, REAL, QUADCLOSED)
    perms = []
    for c in range(nbits):
        # new[j] = sign * old[perm[j]]; multiplication by a class permutes
        # coordinates by XOR with its index, which is an involution
        shift = index[c]
        perms.append(tuple(j ^ shift for j in range(length)))
    return VecSpace(field, modulus, length, tuple(index), tuple(sign), tuple(perms))


def vector(form) -> Vec:
    return space(form.field).of_entries(form.entries)
