"""Isotropy by explicit zero search, independent of the package's decision engine.

Square classes are turned into concrete field elements: the base nonsquare is
the least quadratic nonresidue mod q (or -1 over R), and each uniformizer
exponent becomes a power of that variable.

* Height 1 over F_q (q prime): digit-by-digit search for a primitive vector
  ``x`` in ``F_q[t]/(t^PRECISION)`` with ``sum a_i x_i^2 = 0 mod t^PRECISION``.
  Each level enumerates all digit combinations at once with numpy.
* Base fields: brute force over a box (all of F_q^d, integers in [-2, 2] for R,
  Gaussian units and zero for C).
* Other towers: the outermost variable is handled by its first two digit
  equations.  Writing ``f = f0 + t*f1``, a primitive zero either has a nonzero
  ``f0``-block mod t (a zero of ``f0`` over the residue field, which lifts by
  Hensel's lemma since 2 is a unit) or a zero ``f0``-block mod t, in which case
  the ``t^1`` equation asks for a zero of ``f1``.  Both residue questions are
  answered by recursing into this oracle.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from wittlab.forms import PfisterSpec, pfister, scale
from wittlab.wittvec import space, vector

PRECISION = 8


def nonresidue(q: int) -> int:
    squares = {x * x % q for x in range(1, q)}
    return next(a for a in range(2, q) if a not in squares)


@functools.lru_cache(maxsize=None)
def _combos(q: int, m: int) -> np.ndarray:
    """All digit vectors of length m, nonzero digits first."""
    order = list(range(1, q)) + [0]
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(order, repeat=m)), dtype=np.int64).reshape(-1, m)


class _Search:
    def __init__(self, q: int, coeffs: list[int], shifts: list[int], precision: int):
        self.q = q
        self.c = coeffs
        self.s = shifts
        self.n = precision
        self.d = len(coeffs)
        self.nodes = 0

    def level_value(self, digits, k):
        """Coefficient of t^k contributed by already fixed digits (new digits excluded)."""
        q = self.q
        total = 0
        for i in range(self.d):
            m = k - self.s[i]
            if m < 0:
                continue
            xi = digits[i]
            acc = 0
            for j in range(m + 1):
                l = m - j
                if j < len(xi) and l < len(xi) and j != m and l != m:
                    acc += xi[j] * xi[l]
            total += self.c[i] * acc
        return total % q

    def run(self) -> bool:
        return self._go([[] for _ in range(self.d)], 0)

    def _go(self, digits, k) -> bool:
        self.nodes += 1
        if self.nodes > 200_000:
            raise RuntimeError("oracle search did not terminate within its node budget")
        if k == self.n:
            return True
        q = self.q
        new = [i for i in range(self.d) if k - self.s[i] >= 0]
        const = self.level_value(digits, k)
        combos = _combos(q, len(new))
        vals = np.full(len(combos), const, dtype=np.int64)
        for col, i in enumerate(new):
            m = k - self.s[i]
            if m == 0:
                vals += self.c[i] * combos[:, col] ** 2
            else:
                vals += 2 * self.c[i] * digits[i][0] * combos[:, col]
        ok = combos[vals % q == 0]
        last_zero_level = max(self.s)
        for row in ok:
            nxt = [list(x) for x in digits]
            for col, i in enumerate(new):
                nxt[i].append(int(row[col]))
            if k == last_zero_level and not any(x[0] for x in nxt):
                continue  # not primitive
            if self._go(nxt, k + 1):
                return True
        return False


def isotropic_laurent_fq(q: int, entries, precision: int = PRECISION) -> bool:
    """Zero search for ``sum c_i t^(e_i) x_i^2`` over F_q((t)); entries are (base_bit, e)."""
    s = nonresidue(q)
    coeffs = [s if b else 1 for b, _ in entries]
    shifts = [e for _, e in entries]
    if not coeffs:
        return False
    return _Search(q, coeffs, shifts, precision).run()


def isotropic_base(kind: str, q: int | None, base_bits) -> bool:
    d = len(base_bits)
    if d == 0:
        return False
    if kind == "F":
        s = nonresidue(q)
        c = np.array([s if b else 1 for b in base_bits], dtype=np.int64)
        xs = np.array(list(itertools.product(range(q), repeat=d)), dtype=np.int64)[1:]
        return bool(np.any((xs**2 @ c) % q == 0))
    if kind == "R":
        c = np.array([-1 if b else 1 for b in base_bits], dtype=np.int64)
        xs = np.array(list(itertools.product(range(-2, 3), repeat=d)), dtype=np.int64)
        xs = xs[np.any(xs != 0, axis=1)]
        return bool(np.any(xs**2 @ c == 0))
    units = [0, 1, -1, 1j, -1j]
    for x in itertools.product(units, repeat=d):
        if any(x) and sum(v * v for v in x) == 0:
            return True
    return False


def is_isotropic(kind: str, q: int | None, height: int, entries) -> bool:
    """Oracle verdict for the diagonal form with square-class masks ``entries``.

    Mask layout: bit 0 is the base nonsquare (or -1), bit j the exponent of t_j.
    """
    if height == 0:
        return isotropic_base(kind, q, [a & 1 for a in entries])
    top = 1 << height
    if height == 1 and kind == "F":
        return isotropic_laurent_fq(q, [(a & 1, 1 if a & top else 0) for a in entries])
    first = [a for a in entries if not a & top]
    second = [a ^ top for a in entries if a & top]
    return is_isotropic(kind, q, height - 1, first) or is_isotropic(kind, q, height - 1, second)


def ideal_closure(field, n):
    """Subgroup of W(field) generated by all scaled n-fold Pfister forms, as Witt vectors.

    Generators come from expanding every slot tuple directly, so this does not
    rely on the incremental Pfister tables or on the I^n recursion.
    """
    sp = space(field)
    gens = set()
    for slots in itertools.product(field.class_bits, repeat=n):
        p = pfister(PfisterSpec(field, slots))
        for a in field.class_bits:
            gens.add(vector(scale(a, p)))
    group = {sp.zero}
    frontier = [sp.zero]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = sp.add(v, g)
                if w not in group:
                    group.add(w)
                    nxt.append(w)
        frontier = nxt
    return group
