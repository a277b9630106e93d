"""Generalised Albert forms, similarity of congruent forms, going up and going down.

Notation: ``d = 2^n + 2^(n-1)`` is the dimension of interest in ``I^n``.  A
form of that dimension is a generalised Albert form when its class is a sum
of two scaled n-fold Pfister classes; five equivalent characterisations are
searched for independently by :func:`ga_classify`.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field

from . import budget
from .errors import InvariantViolation, ValidationError
from .forms import Form, PfisterSpec, det, lift, negate, perp, pfister, residue_split, scale, specialize, tensor
from .ideals import (
    gp_table,
    in_In,
    is_gp_n,
    pfister_decomposition,
    pfister_number,
    pfister_table,
    divides,
)
from .sampling import sample_In, trial_rng
from .squareclass import FieldTower, SquareClass
from .witt import anisotropic_part, is_isotropic, is_subform, isometric, similar, witt_equal
from .wittvec import space, vector


def albert_dim(n: int) -> int:
    return (1 << n) + (1 << (n - 1))


# --- Albert factor of a Pfister multiple -----------------------------------------


def make_albert_factor(pi: Form, tau: Form, n: int) -> Form:
    """Given ``phi = pi (x) tau`` in ``I^n`` with ``pi`` in ``GP_(n-2)``, return
    ``sigma`` with ``[sigma]`` in ``I^2`` and ``phi = pi (x) sigma``."""
    if n < 3:
        raise ValidationError("make_albert_factor needs n >= 3")
    if pi.field != tau.field:
        raise ValidationError("pi and tau live over different towers")
    if is_isotropic(pi) or not is_gp_n(pi, n - 2):
        raise ValidationError(f"{pi} is not an anisotropic form in GP_{n - 2}")
    phi = tensor(pi, tau)
    if phi.dim == 0 or is_isotropic(phi):
        raise ValidationError(f"pi (x) tau = {phi} must be anisotropic of positive dimension")
    if not in_In(phi, n).member:
        raise ValidationError(f"pi (x) tau is not in I^{n}")
    if tau.dim % 2:
        # the odd case forces pi to be hyperbolic, which was excluded above
        raise InvariantViolation(
            "dim(phi)/dim(pi) is odd for an anisotropic I^n multiple of pi",
            {"pi": str(pi), "tau": str(tau), "n": n},
        )
    if in_In(tau, 2).member:
        sigma = tau
    else:
        field = tau.field
        rest = Form(field, tau.entries[1:])
        a = det(rest).bits
        if (tau.dim // 2) % 2:
            a ^= field.minus_one_bits
        sigma = Form(field, (a,) + rest.entries)
    if not (in_In(sigma, 2).member and isometric(phi, tensor(pi, sigma))):
        raise InvariantViolation(
            "Albert factor failed verification", {"pi": str(pi), "tau": str(tau), "sigma": str(sigma)}
        )
    return sigma


# --- classification ---------------------------------------------------------------


@dataclass
class GAClassification:
    form: Form
    n: int
    c1: bool = False
    c2: bool = False
    c3: bool = False
    c4: bool = False
    c5: bool = False
    pfister_pair: tuple[Form, Form] | None = None
    albert: tuple[Form, Form] | None = None  # (pi in GP_(n-2), alpha)
    triple: tuple[Form, Form, Form] | None = None
    subform: Form | None = None
    neighbor: tuple[Form, Form] | None = None  # (psi, pfister form containing psi)

    @property
    def flags(self) -> tuple[bool, ...]:
        return (self.c1, self.c2, self.c3, self.c4, self.c5)

    @property
    def consistent(self) -> bool:
        return len(set(self.flags)) == 1

    def verify(self) -> list[str]:
        """Re-check every witness through the Springer engine; return the problems."""
        f, n = self.form, self.n
        bad = []
        if self.c1:
            p1, p2 = self.pfister_pair
            if not (witt_equal(f, perp(p1, p2)) and is_gp_n(p1, n) and is_gp_n(p2, n)):
                bad.append("c1 witness")
        if self.c2:
            p, alpha = self.albert
            ok = is_gp_n(p, n - 2) and alpha.dim == 6 and in_In(alpha, 2).member
            if not (ok and isometric(f, tensor(p, alpha))):
                bad.append("c2 witness")
        if self.c3:
            s1, s2, s3 = self.triple
            ok = all(is_gp_n(s, n - 1) for s in self.triple)
            if not (ok and isometric(f, perp(perp(s1, s2), s3))):
                bad.append("c3 witness")
        if self.c4:
            s = self.subform
            if not (is_gp_n(s, n - 1) and not is_isotropic(s) and is_subform(s, f)):
                bad.append("c4 witness")
        if self.c5:
            psi, p = self.neighbor
            ok = psi.dim == (1 << (n - 1)) + 1 and is_gp_n(p, n) and not is_isotropic(p)
            if not (ok and is_subform(psi, f) and is_subform(psi, p)):
                bad.append("c5 witness")
        return bad


def _check_albert_input(f: Form, n: int):
    if n < 2:
        raise ValidationError("n must be >= 2")
    if f.dim != albert_dim(n):
        raise ValidationError(f"dim {f.dim} != 2^n + 2^(n-1) = {albert_dim(n)}")
    if is_isotropic(f):
        raise ValidationError(f"{f} is isotropic")
    if not in_In(f, n).member:
        raise ValidationError(f"{f} is not in I^{n}")


def _entry_form(field: FieldTower, e) -> Form:
    return e.witness(field).form


def ga_classify(f: Form, n: int) -> GAClassification:
    _check_albert_input(f, n)
    field = f.field
    sp = space(field)
    vf = vector(f)
    d = f.dim
    out = GAClassification(f, n)
    half = 1 << (n - 1)

    # (i) two scaled n-fold Pfister forms
    top = gp_table(field, n)
    index = {e.vec: e for e in top}
    for e in top:
        other = index.get(sp.sub(vf, e.vec))
        if other is not None:
            out.c1 = True
            out.pfister_pair = (_entry_form(field, e), _entry_form(field, other))
            break

    # (ii) a GP_(n-2) factor with Albert cofactor
    for e in gp_table(field, n - 2):
        p = _entry_form(field, e)
        tau = divides(p, f)
        if tau is None:
            continue
        alpha = scale(e.scalar, f) if n == 2 else make_albert_factor(p, tau, n)
        if alpha.dim == 6 and in_In(alpha, 2).member:
            out.c2 = True
            out.albert = (p, alpha)
            break

    # (iii) and (iv): GP_(n-1) subforms
    mid = gp_table(field, n - 1)
    mid_index = {e.vec: e for e in mid}
    inside = [e for e in mid if sp.diman(sp.sub(vf, e.vec)) <= d - half]
    if inside:
        out.c4 = True
        out.subform = _entry_form(field, inside[0])
    for i, e1 in enumerate(inside):
        rem = sp.sub(vf, e1.vec)
        for e2 in inside[i:]:
            rem2 = sp.sub(rem, e2.vec)
            if sp.diman(rem2) > d - 2 * half:
                continue
            e3 = mid_index.get(rem2)
            if e3 is not None:
                out.c3 = True
                out.triple = tuple(_entry_form(field, e) for e in (e1, e2, e3))
                break
        if out.c3:
            break

    # (v) Pfister neighbour of dimension 2^(n-1) + 1
    need = half + 1
    for e in top:
        vp = e.vec
        if (d + 2 * half - sp.diman(sp.sub(vf, vp))) // 2 < need:
            continue
        psi = _common_subform(field, vf, d, vp, 2 * half, need)
        if psi is not None:
            out.c5 = True
            out.neighbor = (Form(field, tuple(psi)), _entry_form(field, e))
            break
    return out


def _common_subform(field, va, da, vb, db, need):
    """Diagonal of a common subform of two anisotropic classes, built greedily.

    Each step keeps the Witt index of the remainders large enough, which is
    exact: for anisotropic forms ``i_W(a - b)`` is the largest dimension of a
    common subform.
    """
    sp = space(field)
    chosen = []
    for step in range(need):
        left = need - step - 1
        for a in field.class_bits:
            e = sp.basis(a)
            la, lb = sp.sub(va, e), sp.sub(vb, e)
            if sp.diman(la) > da - 1 or sp.diman(lb) > db - 1:
                continue
            if (da - 1 + db - 1 - sp.diman(sp.sub(la, lb))) // 2 >= left:
                chosen.append(a)
                va, da, vb, db = la, da - 1, lb, db - 1
                break
        else:
            return None
    return chosen


@dataclass(frozen=True)
class AlbertVerdict:
    is_albert: bool
    witness: tuple[Form, Form] | None


def is_generalised_albert(f: Form, n: int) -> AlbertVerdict:
    d = f.dim
    if not (1 << n) < d < (1 << (n + 1)):
        raise ValidationError(f"dim {d} outside the open range (2^{n}, 2^{n + 1})")
    if is_isotropic(f):
        raise ValidationError(f"{f} is isotropic")
    if not in_In(f, n).member:
        raise ValidationError(f"{f} is not in I^{n}")
    field = f.field
    if d == albert_dim(n):
        # cheapest route: a GP_(n-1) subform sigma gives pi1 = sigma + x*sigma
        sp = space(field)
        vf = vector(f)
        half = 1 << (n - 1)
        for e in gp_table(field, n - 1):
            if sp.diman(sp.sub(vf, e.vec)) <= d - half:
                sigma = _entry_form(field, e)
                rest = anisotropic_part(perp(f, negate(sigma))).entries
                # sigma + <x> is a Pfister neighbour inside f and inside pi1
                pi1 = perp(sigma, scale(rest[0] ^ e.scalar, sigma))
                pi2 = anisotropic_part(perp(f, negate(pi1))).form
                if not (is_gp_n(pi2, n) and witt_equal(f, perp(pi1, pi2))):
                    raise InvariantViolation("subform route produced no Pfister pair", {"form": str(f)})
                return AlbertVerdict(True, (pi1, pi2))
        if pfister_number(f, n, 2) is not None:
            raise InvariantViolation("Pfister-number search disagrees with subform scan", {"form": str(f)})
        return AlbertVerdict(False, None)
    dec = pfister_decomposition(f, n, 2)
    if dec is None:
        return AlbertVerdict(False, None)
    return AlbertVerdict(True, (dec[0].form, dec[1].form))


# --- twisted Pfister forms -------------------------------------------------------


@dataclass(frozen=True)
class TwistedWitness:
    scalar: SquareClass
    sigma: PfisterSpec
    pi: PfisterSpec


def twisted_pfister_detect(f: Form, n: int, m: int) -> TwistedWitness | None:
    """Search ``a, sigma in P_n, pi in P_m`` (linkage number m-1) with ``[a f] = [sigma] - [pi]``."""
    if not 1 <= m < n:
        raise ValidationError("need 1 <= m < n")
    if f.dim != 1 << n:
        raise ValidationError(f"dim {f.dim} != 2^{n}")
    field = f.field
    sp = space(field)
    vf = vector(f)
    scaled = {}
    for a in field.class_bits:
        scaled.setdefault(sp.scale(vf, a), a)
    want = 1 << (m - 1)
    pis = [(s, v) for s, v in pfister_table(field, m) if any(v)]
    for s_slots, vs in pfister_table(field, n):
        if not any(vs):
            continue
        for p_slots, vp in pis:
            diff = sp.sub(vs, vp)
            if ((1 << n) + (1 << m) - sp.diman(diff)) // 2 != want:
                continue
            a = scaled.get(diff)
            if a is not None:
                return TwistedWitness(SquareClass(field, a), PfisterSpec(field, s_slots), PfisterSpec(field, p_slots))
    return None


def congruent_mod_In(f: Form, g: Form, n: int) -> bool:
    if f.field != g.field:
        raise ValidationError("forms over different towers")
    return in_In(perp(f, negate(g)), n).member


# --- going up --------------------------------------------------------------------


@dataclass(frozen=True)
class GAUpWitness:
    case: str  # "unimodular", "pfister-residue" or "similar-residues"
    pi1: Form
    pi2: Form


def ga_up_witness(f: Form, n: int) -> GAUpWitness:
    """Write ``[f] = [pi1] + [pi2]`` following the residue case analysis."""
    if f.field.height < 1:
        raise ValidationError("going up needs a tower of height >= 1")
    _check_albert_input(f, n)
    w = _ga_up(f, n)
    if not (witt_equal(f, perp(w.pi1, w.pi2)) and is_gp_n(w.pi1, n) and is_gp_n(w.pi2, n)):
        raise InvariantViolation(
            "going-up witness failed verification", {"form": str(f), "pi1": str(w.pi1), "pi2": str(w.pi2)}
        )
    return w


def _ga_up(f: Form, n: int) -> GAUpWitness:
    K = f.field
    F = K.residue()
    top = 1 << K.height
    f1, f2 = residue_split(f)
    if f1.dim == 0 or f2.dim == 0:
        twist = 0 if f2.dim == 0 else 1
        g = f1 if f2.dim == 0 else f2
        if F.height >= 1:
            inner = _ga_up(g, n)
            p1, p2 = inner.pi1, inner.pi2
        else:
            dec = pfister_decomposition(g, n, 2)
            if dec is None or len(dec) != 2:
                raise InvariantViolation("residue form is not a generalised Albert form", {"form": str(g)})
            p1, p2 = dec[0].form, dec[1].form
        return GAUpWitness("unimodular", lift(p1, K, twist), lift(p2, K, twist))

    swapped = f2.dim > f1.dim
    if swapped:
        f1, f2 = f2, f1
    half = 1 << (n - 1)
    if f2.dim == half:
        sigma = lift(f2, K, 1 ^ swapped)
        x = f1.entries[0] | (top if swapped else 0)
        # y*sigma represents 1, so sigma + <x> sits inside pi1
        pi1 = perp(sigma, scale(x ^ sigma.entries[0], sigma))
        pi2 = anisotropic_part(perp(f, negate(pi1))).form
        return GAUpWitness("pfister-residue", pi1, pi2)
    if n >= 3 and f1.dim == f2.dim == albert_dim(n - 1):
        y = similar(f2, negate(f1))
        if y is None:
            raise InvariantViolation("residue forms congruent mod I^n are not similar", {"form": str(f)})
        dec = pfister_decomposition(f1, n - 1, 2)
        if dec is None or len(dec) != 2:
            raise InvariantViolation("first residue is not a generalised Albert form", {"form": str(f1)})
        # f = f1 + t*f2 = f1 - y t f1 = <<y t>> (x) f1
        slot = y.bits | top
        factor = pfister(PfisterSpec(K, (slot,)))
        pis = [tensor(factor, lift(w.form, K, 0)) for w in dec]
        return GAUpWitness("similar-residues", pis[0], pis[1])
    raise InvariantViolation(
        "residue dimensions outside the case analysis", {"form": str(f), "dims": [f1.dim, f2.dim]}
    )


# --- campaigns -------------------------------------------------------------------


@dataclass
class CampaignReport:
    field: str
    n: int
    trials: int
    seed: int
    checks: int = 0
    failures: list[dict] = dc_field(default_factory=list)
    witnesses: int = 0
    elapsed_ms: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self, timing: bool = True) -> dict:
        out = asdict(self)
        if not timing:
            del out["elapsed_ms"]
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True)


@dataclass
class _Trial:
    checks: int = 0
    witnesses: int = 0
    failures: list[dict] = dc_field(default_factory=list)

    def fail(self, form, detail):
        self.failures.append({"form": str(form), "detail": detail})


def _run(field: FieldTower, n: int, trials: int, seed: int, threads: int, body) -> CampaignReport:
    if trials < 0:
        raise ValidationError("trials must be >= 0")
    start = time.monotonic()

    def guarded(i):
        budget.tick()
        return body(i)

    if threads > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(guarded, range(trials)))
    else:
        results = [guarded(i) for i in range(trials)]
    report = CampaignReport(str(field), n, trials, seed)
    for r in results:
        report.checks += r.checks
        report.witnesses += r.witnesses
        report.failures.extend(r.failures)
    report.elapsed_ms = int((time.monotonic() - start) * 1000)
    return report


def _congruent_partner(field: FieldTower, f: Form, n: int, rng, dims, pool_n=None):
    """Random form in the class ``[f] + [scaled (n+1)-fold Pfister]`` with diman in ``dims``."""
    sp = space(field)
    vf = vector(f)
    cands = []
    for e in gp_table(field, n + 1 if pool_n is None else pool_n):
        w = sp.add(vf, e.vec)
        if sp.diman(w) in dims:
            cands.append(w)
    if not cands:
        return None
    return Form(field, sp.entries(rng.choice(cands)))


def _check_similar(res: _Trial, f: Form, g: Form, what: str) -> SquareClass | None:
    res.checks += 1
    x = similar(f, g)
    if x is None:
        res.fail(f"{f} vs {g}", f"{what}: congruent but not similar")
    else:
        res.witnesses += 1
    return x


def sim_campaign(field: FieldTower, n: int, trials: int, seed: int, threads: int = 1) -> CampaignReport:
    """Empirical Sim(n): congruent low-dimensional I^n forms must be similar."""
    if n < 2:
        raise ValidationError("Sim(n) is defined for n >= 2")
    d = albert_dim(n)
    dims = range(1, d + 1)

    def body(i):
        res = _Trial()
        rng = trial_rng(seed, i, "sim")
        f = sample_In(field, n, rng, dims=dims)
        if f is None:
            return res
        g = _congruent_partner(field, f, n, rng, dims)
        if g is None:
            return res
        if not (in_In(g, n).member and congruent_mod_In(f, g, n + 1)):
            res.checks += 1
            res.fail(f"{f} vs {g}", "generator produced a non-congruent pair")
            return res
        _check_similar(res, f, g, f"Sim({n})")
        return res

    return _run(field, n, trials, seed, threads, body)


def ga_survey(field: FieldTower, n: int, trials: int, seed: int, threads: int = 1) -> CampaignReport:
    """Classify sampled dim-d forms in I^n and test similarity of congruent pairs."""
    d = albert_dim(n)

    def body(i):
        res = _Trial()
        rng = trial_rng(seed, i, "ga")
        f = sample_In(field, n, rng, dims={d})
        if f is None:
            return res
        cls = ga_classify(f, n)
        res.checks += 1
        problems = cls.verify()
        if not all(cls.flags):
            problems.append(f"flags {cls.flags}")
        if problems:
            res.fail(f, "; ".join(problems))
        else:
            res.witnesses += 5
        g = _congruent_partner(field, f, n, rng, {d})
        if g is not None:
            _check_similar(res, f, g, "GA -> Sim")
        return res

    return _run(field, n, trials, seed, threads, body)


def going_down_check(field: FieldTower, n: int, trials: int, seed: int, threads: int = 1) -> CampaignReport:
    """Transport GA and Sim statements from a tower to its residue tower."""
    if field.height < 1:
        raise ValidationError("going down needs a tower of height >= 1")
    if n < 2:
        raise ValidationError("n must be >= 2")
    F = field.residue()
    d = albert_dim(n)
    t = field.uniformizer
    one_t = pfister(PfisterSpec(field, (t.bits ^ field.minus_one_bits,)))

    def body(i):
        res = _Trial()
        rng = trial_rng(seed, i, "down")

        # GA_n(K, d) = I^n(K, d) restricted to lifts, read back on F
        g = sample_In(F, n, rng, dims={d})
        if g is not None:
            res.checks += 1
            dec = pfister_decomposition(lift(g, field, 0), n, 2)
            if dec is None or len(dec) != 2:
                res.fail(g, "lift is not a generalised Albert form over K")
            else:
                s1, s2 = (specialize(w.form) for w in dec)
                if witt_equal(g, perp(s1, s2)) and is_gp_n(s1, n) and is_gp_n(s2, n):
                    res.witnesses += 1
                else:
                    res.fail(g, "residues of the Pfister summands do not decompose the residue form")

        # <1, t> (x) lift(psi) has the same Pfister number one level up
        psi = sample_In(F, n - 1, rng)
        if psi is not None:
            res.checks += 1
            phi = tensor(one_t, lift(psi, field, 0))
            down = pfister_number(psi, n - 1, 3)
            up = pfister_number(phi, n, 3) if not is_isotropic(phi) else "isotropic"
            if down != up:
                res.fail(psi, f"Pfister numbers {down} (residue) vs {up} (<1,t> multiple)")
            else:
                res.witnesses += 1

        # Sim(n) over K descends to Sim(n-1) via psi + t*psi
        if n - 1 >= 1:
            a = sample_In(F, n - 1, rng, dims=range(1, d // 2 + 1))
            b = None if a is None else _congruent_partner(F, a, n - 1, rng, range(1, d // 2 + 1))
            if b is not None:
                alpha = tensor(one_t, lift(a, field, 0))
                beta = tensor(one_t, lift(b, field, 0))
                if not congruent_mod_In(alpha, beta, n + 1):
                    res.checks += 1
                    res.fail(f"{alpha} vs {beta}", "psi + t psi constructions not congruent mod I^(n+1)")
                elif _check_similar(res, alpha, beta, f"Sim({n}) over K") is not None:
                    _check_similar(res, a, b, f"Sim({n - 1}) over F")

        # Sim(n) over K descends to Sim(n) over F via unimodular lifts
        a = sample_In(F, n, rng, dims=range(1, d + 1))
        b = None if a is None else _congruent_partner(F, a, n, rng, range(1, d + 1))
        if b is not None:
            la, lb = lift(a, field, 0), lift(b, field, 0)
            if not congruent_mod_In(la, lb, n + 1):
                res.checks += 1
                res.fail(f"{la} vs {lb}", "lifts not congruent mod I^(n+1)")
            elif _check_similar(res, la, lb, f"Sim({n}) over K") is not None:
                _check_similar(res, a, b, f"Sim({n}) over F")
        return res

    return _run(field, n, trials, seed, threads, body)

