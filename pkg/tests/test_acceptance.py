"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Time limits are wall-clock seconds measured around the whole criterion.
"""

import itertools
import json
import time
from collections import Counter

import pytest

import oracle
from wittlab import (
    Form,
    PfisterSpec,
    find_link,
    ga_classify,
    ga_up_witness,
    going_down_check,
    in_In,
    is_gp_n,
    is_isotropic,
    isometric,
    lift,
    linkage_number,
    make_albert_factor,
    parse_class,
    parse_field,
    perp,
    pfister,
    pfister_number,
    residue_split,
    scale,
    sim_campaign,
    similar,
    tensor,
    witt_equal,
)
from wittlab.cli import main
from wittlab.ideals import enumerate_pfister, gp_table, member_vec
from wittlab.sampling import random_form, sample_In, trial_rng
from wittlab.structure import ga_survey
from wittlab.wittvec import space

K3 = parse_field("F3[[t1,t2,t3]]")
K4 = parse_field("F3[[t1,t2,t3,t4]]")


@pytest.fixture
def report(capsys):
    def emit(label, ok, elapsed, limit, detail=""):
        within = elapsed < limit
        status = "PASS" if ok and within else "FAIL"
        line = f"[acceptance] {label}: {status} ({elapsed:.1f}s, limit {limit}s)"
        if detail:
            line += f" {detail}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, detail
        assert within, f"{label} took {elapsed:.1f}s, limit {limit}s"

    return emit


def P(K, *slots):
    return pfister(PfisterSpec.of(K, [parse_class(x, K) for x in slots]))


def test_1_springer_and_residue_sequence(report):
    start = time.perf_counter()
    bad = []
    towers = ["F3[[t]]", "F3[[t1,t2]]", "F5[[t]]", "R[[t1,t2]]", "C[[t1,t2,t3]]"]
    for desc in towers:
        K = parse_field(desc)
        for i in range(1000):
            rng = trial_rng(101, i, desc)
            f = random_form(K, rng.randint(1, 6), rng)
            f1, f2 = residue_split(f)
            if residue_split(perp(lift(f1, K, 0), lift(f2, K, 1))) != (f1, f2):
                bad.append(("roundtrip", desc, str(f)))
            if is_isotropic(f) != oracle.is_isotropic(K.kind, K.q, K.height, f.entries):
                bad.append(("isotropy", desc, str(f)))
    report("criterion 1 (Springer suite, 5000 forms)", not bad, time.perf_counter() - start, 30, f"violations={bad[:3]}")


def test_2_aph_and_gaps(report):
    start = time.perf_counter()
    bad = []
    seen = 0
    for n in (1, 2, 3):
        gaps = {2 ** (n + 1) - 2**k for k in range(1, n + 2)}
        for i in range(500):
            f = sample_In(K3, n, trial_rng(102, i, f"aph{n}"))
            if f is None:
                continue
            seen += 1
            d = f.dim
            if 0 < d < 2**n or (d < 2 ** (n + 1) and d not in gaps) or (d == 2**n and not is_gp_n(f, n)):
                bad.append((n, str(f)))
    ok = not bad and seen == 1500
    report("criterion 2 (APH + gaps)", ok, time.perf_counter() - start, 60, f"samples={seen} violations={bad[:3]}")


def test_3_linkage_exhaustive(report):
    start = time.perf_counter()
    K = parse_field("F3[[t1,t2]]")
    forms = [w.form for w in enumerate_pfister(K, 2) if w.dim == 4]
    bad = []
    pairs = 0
    for sigma, pi in itertools.product(forms, repeat=2):
        pairs += 1
        lk = linkage_number(sigma, pi)
        if lk.index not in (1, 2, 4):
            bad.append(("index", str(sigma), str(pi), lk.index))
        if lk.r >= 1:
            link = find_link(sigma, pi, lk.r)
            alpha = pfister(link.alpha)
            if not (isometric(tensor(alpha, pfister(link.sigma_cofactor)), sigma) and isometric(tensor(alpha, pfister(link.pi_cofactor)), pi)):
                bad.append(("link", str(sigma), str(pi)))
    ok = not bad and pairs > 0
    report("criterion 3 (linkage, exhaustive P2 pairs)", ok, time.perf_counter() - start, 10, f"pairs={pairs} violations={bad[:3]}")


def test_4_sim2_campaign(report):
    start = time.perf_counter()
    r = sim_campaign(K3, 2, 200, 0, 1)
    ok = r.passed and r.trials == 200
    report("criterion 4 (Sim(2) campaign)", ok, time.perf_counter() - start, 60, f"checks={r.checks} failures={len(r.failures)}")


def dim12_i3_forms(field, count, tag):
    out = []
    seen = set()
    i = 0
    while len(out) < count and i < 20 * count:
        f = sample_In(field, 3, trial_rng(105, i, tag), dims={12})
        i += 1
        if f is not None and f not in seen:
            seen.add(f)
            out.append(f)
    return out


def congruent_partner(f, n):
    """A different dim-equal anisotropic form congruent to f mod I^(n+1)."""
    K = f.field
    sp = space(K)
    v = sp.of_entries(f.entries)
    for e in gp_table(K, n + 1):
        w = sp.add(v, e.vec)
        if w != v and sp.diman(w) == f.dim:
            return Form(K, sp.entries(w))
    return None


def check_ga_equivalence(forms):
    bad = []
    for f in forms:
        cls = ga_classify(f, 3)
        problems = cls.verify()
        if cls.flags != (True,) * 5 or problems:
            bad.append((str(f), cls.flags, problems))
    pairs = 0
    for f in forms:
        if pairs == 25:
            break
        g = congruent_partner(f, 3)
        if g is None:
            continue
        pairs += 1
        x = similar(f, g)
        if x is None or not isometric(f, scale(x, g)):
            bad.append(("not similar", str(f), str(g)))
    return bad, pairs


def test_5_ga_classification_literal_tower(report):
    # Over F3[[t1,t2,t3]] every anisotropic I^3 class has dimension 0, 8 or 16,
    # so the requested dim-12 samples do not exist (see README).
    start = time.perf_counter()
    sp = space(K3)
    group = oracle.ideal_closure(K3, 3)
    dims = sorted({sp.diman(v) for v in group})
    forms = dim12_i3_forms(K3, 50, "ga-lit")
    bad, pairs = check_ga_equivalence(forms)
    ok = len(forms) == 50 and not bad and pairs == 25
    detail = f"dim-12 forms found={len(forms)} (I^3 dims present: {dims}) pairs={pairs}"
    report("criterion 5 (GA classification, F3[[t1,t2,t3]])", ok, time.perf_counter() - start, 300, detail)


def test_5_ga_classification_next_tower(report):
    start = time.perf_counter()
    forms = dim12_i3_forms(K4, 50, "ga")
    bad, pairs = check_ga_equivalence(forms)
    ok = len(forms) == 50 and not bad and pairs == 25
    detail = f"forms={len(forms)} pairs={pairs} violations={bad[:2]}"
    report("criterion 5 variant (GA classification, F3[[t1,t2,t3,t4]])", ok, time.perf_counter() - start, 300, detail)


def collect(count, make):
    out = []
    i = 0
    while len(out) < count and i < 200 * count:
        item = make(i)
        i += 1
        if item is not None:
            out.append(item)
    return out


def test_6_pfister_number_identities(report):
    start = time.perf_counter()
    bad = []
    counts = {}
    E4 = K4.residue()
    t4 = P(K4, "t4")

    def mult(i):
        rng = trial_rng(106, i, "mult")
        n = 1 + i % 2
        f = sample_In(K3, n, rng)
        if f is None:
            return None
        p = pfister_number(f, n, 3)
        if p is None:
            return None
        q = pfister_number(tensor(pfister(PfisterSpec(K3, (rng.choice(K3.class_bits),))), f), n + 1, 3)
        return ("mult", str(f), p, q, q is not None and q <= p)

    def unimod(i):
        rng = trial_rng(106, i, "unimod")
        n = 2 + i % 2
        g = sample_In(E4, n - 1, rng)
        if g is None:
            return None
        psi = lift(g, K4, 0)
        p = pfister_number(psi, n - 1, 3)
        if p is None:
            return None
        q = pfister_number(tensor(t4, psi), n, 3)
        return ("unimod", str(psi), p, q, p == q)

    def lifted(i):
        rng = trial_rng(106, i, "lift")
        n = 1 + i % 3
        g = sample_In(E4, n, rng)
        if g is None:
            return None
        p = pfister_number(g, n, 3)
        if p is None:
            return None
        q = pfister_number(lift(g, K4, 0), n, 3)
        return ("lift", str(g), p, q, p == q)

    def linked(desc):
        K = parse_field(desc)

        def make(i):
            rng = trial_rng(106, i, desc)
            n = 1 + i % 3
            f = sample_In(K, n, rng)
            if f is None or f.dim > 3 * 2**n:
                return None
            p = pfister_number(f, n, 3)
            return ("linked " + desc, str(f), f.dim, p, f.dim % 2**n == 0 and p == f.dim // 2**n)

        return make

    for name, make in [("mult", mult), ("unimod", unimod), ("lift", lifted), ("linked C", linked("C[[t1,t2,t3]]")), ("linked F3", linked("F3[[t1,t2]]"))]:
        rows = collect(30, make)
        counts[name] = len(rows)
        bad.extend(r[:4] for r in rows if not r[4])
    ok = not bad and all(c == 30 for c in counts.values())
    report("criterion 6 (Pfister-number identities)", ok, time.perf_counter() - start, 300, f"samples={counts} violations={bad[:3]}")


def test_7_albert_factor(report):
    start = time.perf_counter()
    bad = []
    pi = P(K4, "-t4")
    tau = Form.of(K4, [parse_class(x, K4) for x in ("t4", "t1", "t2", "-t1*t2", "-t3", "-t3")])
    expected = Form.of(K4, [parse_class(x, K4) for x in ("1", "t1", "t2", "-t1*t2", "-t3", "-t3")])
    worked = make_albert_factor(pi, tau, 3) == expected

    def make(i):
        rng = trial_rng(107, i, "wlog")
        p = pfister(PfisterSpec(K4, (rng.choice(K4.class_bits),)))
        if is_isotropic(p):
            return None
        t = random_form(K4, 6, rng)
        phi = tensor(p, t)
        if is_isotropic(phi) or not in_In(phi, 3).member:
            return None
        return p, t, phi

    cases = collect(50, make)
    for p, t, phi in cases:
        sigma = make_albert_factor(p, t, 3)
        if not (in_In(sigma, 2).member and isometric(phi, tensor(p, sigma))):
            bad.append((str(p), str(t), str(sigma)))
    ok = worked and len(cases) == 50 and not bad
    report("criterion 7 (Albert factor)", ok, time.perf_counter() - start, 60, f"worked example={worked} cases={len(cases)} violations={bad[:3]}")


def split_forms(K, count):
    """Anisotropic dim-12 I^3 forms phi1 + u*phi2 with phi1, phi2 lifted from the residue field."""
    E = K.residue()
    sp = space(E)
    i2 = sorted(oracle.ideal_closure(E, 2))
    # spread the picks over the residue dimension splits (4,8), (6,6), (8,4)
    per_split = -(-count // 3)
    buckets = {}
    out = []
    for v1, v2 in itertools.product(i2, repeat=2):
        shape = (sp.diman(v1), sp.diman(v2))
        if sum(shape) != 12 or len(buckets.get(shape, ())) == per_split or not member_vec(E, sp.sub(v1, v2), 3):
            continue
        f = perp(lift(Form(E, sp.entries(v1)), K, 0), lift(Form(E, sp.entries(v2)), K, 1))
        if not is_isotropic(f) and in_In(f, 3).member:
            buckets.setdefault(shape, []).append(f)
            out.append(f)
        if len(out) == count:
            break
    return out


def going_up_check(forms):
    bad = []
    cases = Counter()
    for f in forms:
        w = ga_up_witness(f, 3)
        cases[w.case] += 1
        if not (witt_equal(f, perp(w.pi1, w.pi2)) and is_gp_n(w.pi1, 3) and is_gp_n(w.pi2, 3)):
            bad.append(str(f))
        code = main(["going-up", "--field", str(f.field), "--form", str(f), "--n", "3", "--json"])
        if code != 0:
            bad.append(("exit", code, str(f)))
    return bad, dict(cases)


def test_8_going_up_down_literal_tower(report, capsys):
    start = time.perf_counter()
    forms = split_forms(K3, 25)
    bad, _ = going_up_check(forms)
    down = going_down_check(K3, 3, 50, 0, 1)
    capsys.readouterr()
    ok = len(forms) == 25 and not bad and down.passed
    detail = f"dim-12 forms found={len(forms)} going-down checks={down.checks} failures={len(down.failures)}"
    report("criterion 8 (going up/down, F3[[t1,t2,t3]])", ok, time.perf_counter() - start, 600, detail)


def test_8_going_up_next_tower_and_real_sim3(report, capsys):
    start = time.perf_counter()
    forms = split_forms(K4, 25)
    bad, cases = going_up_check(forms)
    capsys.readouterr()
    down = going_down_check(K4, 3, 50, 0, 1)
    sim = sim_campaign(parse_field("R[[t1,t2,t3,t4]]"), 3, 100, 0, 1)
    ok = len(forms) == 25 and not bad and down.passed and sim.passed and sim.trials == 100
    detail = f"going-up forms={len(forms)} cases={cases} violations={bad[:2]} going-down checks={down.checks} sim(3) checks={sim.checks}"
    report("criterion 8 variant (F3[[t1,t2,t3,t4]] going up/down, R[[t1..t4]] Sim(3))", ok, time.perf_counter() - start, 600, detail)


def test_9_determinism(report):
    start = time.perf_counter()
    runs = [
        (sim_campaign, K3, 2, 40),
        (sim_campaign, parse_field("R[[t1,t2,t3,t4]]"), 3, 20),
        (ga_survey, K4, 3, 10),
        (going_down_check, K3, 3, 20),
        (going_down_check, K4, 3, 6),
    ]
    mismatched = []
    for campaign, K, n, trials in runs:
        outs = {campaign(K, n, trials, 11, threads).to_json(timing=False) for threads in (1, 4, 1)}
        payload = json.loads(next(iter(outs)))
        if len(outs) != 1 or "elapsed_ms" in payload:
            mismatched.append((campaign.__name__, str(K)))
    report("criterion 9 (determinism, threads 1 vs 4)", not mismatched, time.perf_counter() - start, 300, f"mismatches={mismatched}")
