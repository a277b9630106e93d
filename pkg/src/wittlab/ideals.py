"""Powers of the fundamental ideal, Pfister forms and Pfister numbers.

Membership in ``I^n`` over a tower is decided by the residue recursion

    [f] in I^n(K)  <=>  [f1], [f2] in I^(n-1)(F)  and  [f1 - f2] in I^n(F)

where ``f = f1 + t*f2``.  Necessity is the usual residue statement.  For
sufficiency write ``[f] = lift([f1 - f2]) + [<1,t> (x) lift(f2)]``: the first
summand lies in ``I^n(K)`` because lifting ``I^n(F)`` lands in ``I^n(K)``, the
second because ``<1,t>`` is a 1-fold Pfister form and ``f2`` is in
``I^(n-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from . import budget
from .errors import InvariantViolation, ValidationError
from .forms import Form, PfisterSpec, disc, pfister, residue_split, scale
from .squareclass import QUADCLOSED, REAL, FieldTower, SquareClass, format_class
from .witt import WittClass, anisotropic_part, is_isotropic, witt_index
from .wittvec import Vec, VecSpace, space, vector

# --- I^n membership ------------------------------------------------------------


@dataclass(frozen=True)
class IdealTrace:
    form: Form
    n: int
    rule: str  # "trivial", "base" or "split"
    member: bool
    children: tuple[IdealTrace, ...] = ()


@dataclass(frozen=True)
class IdealCert:
    n: int
    member: bool
    reason: IdealTrace


def _base_member(f: Form, n: int) -> bool:
    kind = f.field.kind
    if kind == QUADCLOSED:
        if n == 1:
            return f.dim % 2 == 0
        return anisotropic_part(f).is_zero()
    if kind == REAL:
        sig = f.entries.count(0) - f.entries.count(1)
        return sig % (1 << n) == 0
    if n == 1:
        return f.dim % 2 == 0
    if n == 2:
        return f.dim % 2 == 0 and disc(f).bits == 0
    return anisotropic_part(f).is_zero()


def _trace(f: Form, n: int) -> IdealTrace:
    if n == 0:
        return IdealTrace(f, n, "trivial", True)
    if f.field.height == 0:
        return IdealTrace(f, n, "base", _base_member(f, n))
    f1, f2 = residue_split(f)
    second = anisotropic_part(f2).form
    first = anisotropic_part(f1).form
    diff = anisotropic_part(f1 + (-f2)).form
    children = []
    for g, m in ((second, n - 1), (first, n - 1), (diff, n)):
        child = _trace(g, m)
        children.append(child)
        if not child.member:
            break
    member = all(c.member for c in children)
    return IdealTrace(f, n, "split", member, tuple(children))


def in_In(f: Form, n: int) -> IdealCert:
    if n < 0:
        raise ValidationError("n must be nonnegative")
    t = _trace(anisotropic_part(f).form, n)
    return IdealCert(n, t.member, t)


def replay(cert: IdealCert) -> bool:
    """Re-evaluate a certificate from its leaves; raise if the trace is inconsistent."""

    def run(node: IdealTrace) -> bool:
        if node.rule == "trivial":
            ok = node.n == 0
        elif node.rule == "base":
            ok = node.form.field.height == 0 and _base_member(node.form, node.n) == node.member
        else:
            f1, f2 = residue_split(node.form)
            expect = [
                (anisotropic_part(f2).form, node.n - 1),
                (anisotropic_part(f1).form, node.n - 1),
                (anisotropic_part(f1 + (-f2)).form, node.n),
            ]
            ok = len(node.children) <= 3 and all(
                (c.form, c.n) == e for c, e in zip(node.children, expect)
            )
            ok = ok and all(run(c) for c in node.children)
            ok = ok and node.member == all(c.member for c in node.children)
            ok = ok and (len(node.children) == 3 or not node.member)
            return ok
        return ok

    if not run(cert.reason):
        raise InvariantViolation("ideal certificate does not replay", cert)
    return cert.reason.member


@lru_cache(maxsize=1 << 18)
def member_vec(field: FieldTower, vec: Vec, n: int) -> bool:
    """Fast I^n membership on group-ring coordinates (same recursion)."""
    if n <= 0:
        return True
    sp = space(field)
    if field.height == 0:
        if sp.modulus == 0:
            return vec[0] % (1 << n) == 0
        if n == 1:
            return sum(vec) % 2 == 0  # dimension parity
        return not any(vec)  # I^2 = 0 over F_q, I = 0 over C
    v1, v2 = sp.halves(vec)
    res = field.residue()
    rsp = space(res)
    return (
        member_vec(res, v2, n - 1)
        and member_vec(res, v1, n - 1)
        and member_vec(res, rsp.sub(v1, v2), n)
    )


def is_gp_n(f: Form, n: int) -> bool:
    """Similar to an n-fold Pfister form (hyperbolic forms included)."""
    if f.dim != 1 << n:
        return False
    if witt_index(f) * 2 == f.dim:
        return True
    if is_isotropic(f):
        return False
    return in_In(f, n).member


# --- Pfister tables ------------------------------------------------------------


def pfister_vec(sp: VecSpace, slots) -> Vec:
    m1 = sp.field.minus_one_bits
    v = sp.basis(0)
    for a in slots:
        v = sp.add(v, sp.scale(v, a ^ m1))
    return v


@lru_cache(maxsize=None)
def pfister_table(field: FieldTower, n: int) -> tuple[tuple[tuple[int, ...], Vec], ...]:
    """Distinct isometry classes of n-fold Pfister forms as ``(slots, vec)``.

    Built one slot at a time, deduplicating at every level; isometry of
    Pfister forms of equal fold is equality of Witt vectors.
    """
    sp = space(field)
    level: dict[Vec, tuple[int, ...]] = {sp.basis(0): ()}
    m1 = field.minus_one_bits
    work = 0
    for _ in range(n):
        nxt: dict[Vec, tuple[int, ...]] = {}
        work += len(level) * field.num_classes
        budget.charge(work, f"enumerating {n}-fold Pfister forms over {field}")
        for v, slots in level.items():
            budget.tick()
            for a in field.class_bits:
                w = sp.add(v, sp.scale(v, a ^ m1))
                if w not in nxt:
                    nxt[w] = slots + (a,)
        level = nxt
    return tuple((slots, v) for v, slots in level.items())


@dataclass(frozen=True)
class PfisterWitness:
    scalar: SquareClass
    slots: PfisterSpec

    @property
    def form(self) -> Form:
        return scale(self.scalar, pfister(self.slots))

    def __str__(self):
        c = format_class(self.scalar.field, self.scalar.bits)
        return f"{c}*{self.slots}" if self.scalar.bits else str(self.slots)


@dataclass(frozen=True)
class GPEntry:
    scalar: int
    slots: tuple[int, ...]
    vec: Vec

    def witness(self, field: FieldTower) -> PfisterWitness:
        return PfisterWitness(SquareClass(field, self.scalar), PfisterSpec(field, self.slots))


@lru_cache(maxsize=None)
def gp_table(field: FieldTower, n: int) -> tuple[GPEntry, ...]:
    """Distinct nonzero Witt classes of scaled n-fold Pfister forms."""
    sp = space(field)
    seen: dict[Vec, GPEntry] = {}
    table = pfister_table(field, n)
    budget.charge(len(table) * field.num_classes, f"scaling {n}-fold Pfister forms")
    for slots, v in table:
        if not any(v):
            continue
        for x in field.class_bits:
            w = sp.scale(v, x)
            if w not in seen:
                seen[w] = GPEntry(x, slots, w)
    return tuple(seen.values())


def enumerate_pfister(field: FieldTower, n: int) -> list[WittClass]:
    sp = space(field)
    return [WittClass(field, sp.entries(v)) for _, v in pfister_table(field, n)]


# --- Pfister numbers -----------------------------------------------------------


@dataclass
class _Layers:
    """Sums of exactly j table elements, keyed by Witt vector.

    Each sum keeps the first multiset (nondecreasing table indices) that
    produced it, so the stored witnesses are deterministic.
    """

    sp: VecSpace
    table: tuple[GPEntry, ...]
    layers: list[dict[Vec, tuple[int, ...]]] = dc_field(default_factory=list)

    def __post_init__(self):
        self.layers.append({self.sp.zero: ()})

    def get(self, j: int) -> dict[Vec, tuple[int, ...]]:
        sp, table = self.sp, self.table
        while len(self.layers) <= j:
            prev = self.layers[-1]
            budget.charge(len(prev) * len(table), "Pfister-number layer")
            nxt: dict[Vec, tuple[int, ...]] = {}
            for v, path in prev.items():
                budget.tick()
                start = path[-1] if path else 0
                for i in range(start, len(table)):
                    w = sp.add(v, table[i].vec)
                    if w not in nxt:
                        nxt[w] = path + (i,)
            self.layers.append(nxt)
        return self.layers[j]


def _search(field: FieldTower, target: Vec, n: int, max_k: int):
    sp = space(field)
    table = gp_table(field, n)
    layers = _Layers(sp, table)
    block = 1 << n
    need = sp.diman(target)
    for k in range(max_k + 1):
        if need > k * block:
            continue
        a = k // 2
        b = k - a
        small = layers.get(a)
        big = layers.get(b)
        for v, path in small.items():
            rest = sp.sub(target, v)
            if sp.diman(rest) > b * block:
                continue
            other = big.get(rest)
            if other is not None:
                return k, [table[i] for i in path + other]
    return None, None


def _check_member(f: Form, n: int):
    if n < 0:
        raise ValidationError("n must be nonnegative")
    if not member_vec(f.field, vector(f), n):
        raise ValidationError(f"{f} is not in I^{n}")


def pfister_decomposition(f: Form, n: int, max_k: int) -> list[PfisterWitness] | None:
    """A shortest list of scaled n-fold Pfister forms summing to ``[f]``.

    Returns None when no decomposition with at most ``max_k`` summands exists.
    """
    _check_member(f, n)
    if max_k < 0:
        raise ValidationError("max_k must be nonnegative")
    k, entries = _search(f.field, vector(f), n, max_k)
    if k is None:
        return None
    return [e.witness(f.field) for e in entries]


def pfister_number(f: Form, n: int, max_k: int) -> int | None:
    """Exact n-Pfister number of ``f``, or None if it exceeds ``max_k``."""
    _check_member(f, n)
    if max_k < 0:
        raise ValidationError("max_k must be nonnegative")
    k, _ = _search(f.field, vector(f), n, max_k)
    return k


# --- linkage -------------------------------------------------------------------


@dataclass(frozen=True)
class Linkage:
    index: int
    r: int | None


@dataclass(frozen=True)
class Link:
    alpha: PfisterSpec
    sigma_cofactor: PfisterSpec
    pi_cofactor: PfisterSpec


def _fold(f: Form, what: str) -> int:
    d = f.dim
    n = d.bit_length() - 1
    if d < 2 or d != 1 << n or is_isotropic(f) or not is_gp_n(f, n):
        raise ValidationError(f"{what} = {f} is not an anisotropic Pfister form")
    return n


def linkage_number(sigma: Form, pi: Form, a: SquareClass | None = None, b: SquareClass | None = None) -> Linkage:
    """Witt index of ``a*sigma + b*pi`` (default ``a = 1, b = -1``)."""
    n = _fold(sigma, "sigma")
    m = _fold(pi, "pi")
    if sigma.field != pi.field:
        raise ValidationError("sigma and pi live over different towers")
    if m > n:
        raise ValidationError("expects dim pi <= dim sigma")
    field = sigma.field
    a = field.one if a is None else a
    b = field.minus_one if b is None else b
    i = witt_index(scale(a, sigma) + scale(b, pi))
    r = i.bit_length() - 1 if i >= 1 else None
    return Linkage(i, r)


def find_link(sigma: Form, pi: Form, r: int) -> Link:
    n = _fold(sigma, "sigma")
    m = _fold(pi, "pi")
    if not 1 <= r <= m <= n:
        raise ValidationError(f"need 1 <= r <= m <= n, got r={r}, m={m}, n={n}")
    field = sigma.field
    sp = space(field)
    vs, vp = vector(sigma), vector(pi)
    rest_s = pfister_table(field, n - r)
    rest_p = pfister_table(field, m - r)
    for alpha, va in pfister_table(field, r):
        if not any(va):
            continue
        budget.tick()
        s1 = next((s for s, _ in rest_s if pfister_vec(sp, alpha + s) == vs), None)
        if s1 is None:
            continue
        p1 = next((p for p, _ in rest_p if pfister_vec(sp, alpha + p) == vp), None)
        if p1 is None:
            continue
        return Link(PfisterSpec(field, alpha), PfisterSpec(field, s1), PfisterSpec(field, p1))
    raise InvariantViolation(
        f"no {r}-fold link of {sigma} and {pi} although linkage theory guarantees one",
        {"sigma": str(sigma), "pi": str(pi), "r": r},
    )


# --- divisibility --------------------------------------------------------------


def divides(p: Form, f: Form) -> Form | None:
    """Find ``tau`` with ``f = p (x) tau`` by complete backtracking, or None."""
    if p.field != f.field:
        raise ValidationError("forms over different towers")
    if p.dim == 0 or f.dim % p.dim:
        raise ValidationError(f"dim {p.dim} does not divide dim {f.dim}")
    if is_isotropic(p):
        raise ValidationError(f"divisor {p} must be anisotropic")
    field = p.field
    sp = space(field)
    vp = vector(p)
    cands: list[tuple[int, Vec]] = []
    seen = set()
    for x in field.class_bits:
        w = sp.scale(vp, x)
        if w not in seen:
            seen.add(w)
            cands.append((x, w))
    width = p.dim

    def fits(rem: Vec, dim: int, w: Vec) -> Vec | None:
        left = sp.sub(rem, w)
        return left if sp.diman(left) <= dim - width else None

    def go(rem: Vec, dim: int, start: int, chosen: list[int]):
        if dim == 0:
            return list(chosen) if not any(rem) else None
        budget.tick()
        for i in range(start, len(cands)):
            x, w = cands[i]
            left = fits(rem, dim, w)
            if left is None:
                continue
            chosen.append(x)
            found = go(left, dim - width, i, chosen)
            if found is not None:
                return found
            chosen.pop()
        return None

    found = go(vector(f), f.dim, 0, [])
    if found is None:
        return None
    return Form(field, tuple(found))
