"""Command-line front end.

Usage: ``wittlab <verb> --field F3[[t1,t2]] --form "<<-1,t1>>" --n 2 [--json]``.

Exit codes: 0 success, 1 property violated / engine bug / budget exhausted,
2 usage or parse error.  ``--config`` reads an INI file whose ``[wittlab]``
section may set any flag by its long name (``form`` takes one expression per
line); flags given on the command line win.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys

from . import budget
from .errors import InvariantViolation, ResourceError, ValidationError
from .expr import check_syntax, parse_form
from .forms import Form
from .ideals import divides, find_link, in_In, linkage_number, pfister_decomposition
from .squareclass import FieldTower, SquareClass, parse_field
from .structure import (
    ga_classify,
    ga_survey,
    ga_up_witness,
    going_down_check,
    make_albert_factor,
    sim_campaign,
)
from .witt import anisotropic_part, is_isotropic, isometric, witt_equal, witt_index

__all__ = ["main", "parse_form", "run"]

VERBS = (
    "witt",
    "isotropy",
    "ideal",
    "pfister-number",
    "linkage",
    "divides",
    "ga-classify",
    "albert-factor",
    "sim-check",
    "ga-survey",
    "going-up",
    "going-down",
)

DEFAULTS = {"max_k": 4, "trials": 100, "seed": 0, "threads": 1}


class UsageError(ValidationError):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _ArgumentParser(prog="wittlab", description="Quadratic forms over iterated Laurent-series towers.", allow_abbrev=False)
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--field")
    p.add_argument("--form", action="append", dest="forms")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--max-k", type=int, dest="max_k")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--json", action="store_true", default=None)
    p.add_argument("--config")
    return p


def _load_config(path: str) -> dict:
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}")
    except configparser.Error as e:
        raise UsageError(f"bad config {path}: {e}")
    if not cp.has_section("wittlab"):
        return {}
    sec = cp["wittlab"]
    out = {}
    for key, raw in sec.items():
        name = key.replace("-", "_")
        if name == "form":
            out["forms"] = [line.strip() for line in raw.splitlines() if line.strip()]
        elif name == "field":
            out["field"] = raw.strip()
        elif name == "json":
            out["json"] = sec.getboolean(key)
        elif name in ("n", "m", "max_k", "trials", "seed", "threads"):
            try:
                out[name] = int(raw)
            except ValueError:
                raise UsageError(f"config key {key} must be an integer")
        else:
            raise UsageError(f"unknown config key {key}")
    return out


def parse_args(argv) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(_load_config(args.config))
    for key, value in vars(args).items():
        if value is not None:
            merged[key] = value
    merged.setdefault("forms", [])
    merged.setdefault("json", False)
    for key in ("field", "n", "m"):
        merged.setdefault(key, None)
    return argparse.Namespace(**merged)


# --- verbs -----------------------------------------------------------------------


def _need(args, key):
    if getattr(args, key) is None:
        raise UsageError(f"--{key.replace('_', '-')} is required for {args.verb}")
    return getattr(args, key)


def _forms(args, field, count, at_most=None):
    forms = args.forms
    hi = count if at_most is None else at_most
    if not count <= len(forms) <= hi:
        want = count if hi == count else f"{count} to {hi}"
        raise UsageError(f"{args.verb} takes {want} --form argument(s), got {len(forms)}")
    return [parse_form(src, field) for src in forms]


def _single_class(f: Form, what: str) -> SquareClass:
    if f.dim != 1:
        raise UsageError(f"{what} must be a one-dimensional form <c>")
    return f.diag[0]


def _campaign_report(report):
    status = 0 if report.passed else 1
    return status, report.to_dict(), None


def _do(args, field: FieldTower):
    """Return ``(exit code, result, witness)``."""
    verb = args.verb
    if verb == "witt":
        forms = _forms(args, field, 1, 2)
        if len(forms) == 1:
            f = forms[0]
            return 0, str(anisotropic_part(f)), {"witt_index": witt_index(f)}
        f, g = forms
        return 0, witt_equal(f, g), {"isometric": isometric(f, g)}
    if verb == "isotropy":
        (f,) = _forms(args, field, 1)
        return 0, is_isotropic(f), {"witt_index": witt_index(f)}
    if verb == "ideal":
        (f,) = _forms(args, field, 1)
        cert = in_In(f, _need(args, "n"))
        return 0, cert.member, {"rule": cert.reason.rule, "anisotropic_part": str(cert.reason.form)}
    if verb == "pfister-number":
        (f,) = _forms(args, field, 1)
        n, max_k = _need(args, "n"), args.max_k
        dec = pfister_decomposition(f, n, max_k)
        if dec is None:
            return 0, "exceeds max_k", None
        return 0, len(dec), [str(w) for w in dec]
    if verb == "linkage":
        forms = _forms(args, field, 2, 4)
        sigma, pi = forms[:2]
        a = _single_class(forms[2], "a") if len(forms) > 2 else None
        b = _single_class(forms[3], "b") if len(forms) > 3 else None
        link = linkage_number(sigma, pi, a, b)
        result = {"witt_index": link.index, "r": link.r}
        witness = None
        if a is None and b is None and link.r:
            w = find_link(sigma, pi, link.r)
            witness = {"alpha": str(w.alpha), "sigma_cofactor": str(w.sigma_cofactor), "pi_cofactor": str(w.pi_cofactor)}
        return 0, result, witness
    if verb == "divides":
        p, f = _forms(args, field, 2)
        tau = divides(p, f)
        return 0, tau is not None, None if tau is None else {"tau": str(tau)}
    if verb == "ga-classify":
        (f,) = _forms(args, field, 1)
        cls = ga_classify(f, _need(args, "n"))
        problems = cls.verify()
        result = {f"c{i}": flag for i, flag in enumerate(cls.flags, start=1)}
        witness = {
            "c1": None if cls.pfister_pair is None else [str(x) for x in cls.pfister_pair],
            "c2": None if cls.albert is None else [str(x) for x in cls.albert],
            "c3": None if cls.triple is None else [str(x) for x in cls.triple],
            "c4": None if cls.subform is None else str(cls.subform),
            "c5": None if cls.neighbor is None else [str(x) for x in cls.neighbor],
        }
        ok = cls.consistent and not problems
        return (0 if ok else 1), result, witness
    if verb == "albert-factor":
        p, tau = _forms(args, field, 2)
        sigma = make_albert_factor(p, tau, _need(args, "n"))
        return 0, str(sigma), None
    if verb == "going-up":
        (f,) = _forms(args, field, 1)
        w = ga_up_witness(f, _need(args, "n"))
        return 0, {"case": w.case}, {"pi1": str(w.pi1), "pi2": str(w.pi2)}
    campaigns = {"sim-check": sim_campaign, "ga-survey": ga_survey, "going-down": going_down_check}
    if verb in campaigns:
        _forms(args, field, 0)
        if args.trials < 0 or args.threads < 1:
            raise UsageError("--trials must be >= 0 and --threads >= 1")
        report = campaigns[verb](field, _need(args, "n"), args.trials, args.seed, args.threads)
        return _campaign_report(report)
    raise UsageError(f"unknown verb {verb}")


def _input_summary(args) -> dict:
    out = {"field": args.field, "forms": list(args.forms)}
    for key in ("n", "m", "max_k", "trials", "seed"):
        if getattr(args, key) is not None:
            out[key] = getattr(args, key)
    return out


def _render_text(result, witness) -> str:
    lines = []
    if isinstance(result, dict):
        lines.extend(f"{k}: {v}" for k, v in result.items() if k != "failures")
        for fail in result.get("failures", []):
            lines.append(f"failure: {fail['form']}: {fail['detail']}")
    elif isinstance(result, bool):
        lines.append("true" if result else "false")
    else:
        lines.append(str(result))
    if isinstance(witness, dict):
        lines.extend(f"{k}: {v}" for k, v in witness.items() if v is not None)
    elif isinstance(witness, list):
        lines.extend(str(w) for w in witness)
    return "\n".join(lines)


def run(args: argparse.Namespace, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        for src in args.forms:
            check_syntax(src)
        field = parse_field(_need(args, "field"))
        with budget.time_budget(budget.env_budget_ms()):
            code, result, witness = _do(args, field)
    except ResourceError as e:
        _fail(args, out, err, "budget", str(e))
        return 1
    except InvariantViolation as e:
        _fail(args, out, err, "engine-bug", str(e), e.instance)
        return 1
    except ValidationError as e:
        _fail(args, out, err, "usage", str(e))
        return 2
    if args.json:
        payload = {"verb": args.verb, "input": _input_summary(args), "result": result}
        if witness is not None:
            payload["witness"] = witness
        print(json.dumps(payload, sort_keys=True), file=out)
    else:
        print(_render_text(result, witness), file=out)
    return code


def _fail(args, out, err, kind, message, instance=None):
    if args.json:
        payload = {"verb": args.verb, "input": _input_summary(args), "result": None, "error": {"kind": kind, "message": message}}
        if instance is not None:
            payload["error"]["instance"] = instance
        print(json.dumps(payload, sort_keys=True, default=str), file=out)
    print(f"wittlab: {kind}: {message}", file=err)
    if instance is not None:
        print(f"instance: {json.dumps(instance, sort_keys=True, default=str)}", file=err)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
    except UsageError as e:
        print(f"wittlab: usage: {e}", file=sys.stderr)
        return 2
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
