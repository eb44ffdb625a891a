"""Command-line entry point.

Every command builds a plain dict of exact values (rendered as strings),
then prints it either as JSON or as text.  Both renderings come from the
same dict, so they carry the same data.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .exactalg import Q, ParseError, UnsupportedField, fmt_scalar, parse_poly
from .foliation import (
    FoliationError,
    ProjectiveFoliation,
    parse_one_form,
    read_fol,
    singular_locus,
    write_fol,
)

SCHEMA = "folsing.report/1"

EXIT_PASS, EXIT_MISMATCH, EXIT_USAGE, EXIT_FIELD = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, category: str, message: str):
        super().__init__(message)
        self.category = category


def _s(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return fmt_scalar(v)


def _field_name(K) -> str:
    if getattr(K, "degree", 1) == 1:
        return "Q"
    return f"Q({K.name}), {K.minpoly_str()} = 0"


def _parse_params(text):
    out = {}
    for item in filter(None, (s.strip() for s in (text or "").split(","))):
        k, eq, v = item.partition("=")
        if not eq:
            raise CliError("parse", f"bad parameter assignment {item!r}")
        out[k.strip()] = Q(v.strip())
    return out


# ------------------------------------------------------------- rendering
def _render_text(obj, indent=0) -> list:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines += _render_text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {v if not isinstance(v, (dict, list)) else '-'}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, (dict, list)):
                sub = _render_text(item, indent + 1)
                lines.append(f"{pad}- " + sub[0].strip())
                lines += sub[1:]
            else:
                for i, part in enumerate(str(item).split("\n")):
                    lines.append(f"{pad}{'- ' if i == 0 else '  '}{part}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def emit(report: dict, as_json: bool, out=None):
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        out.write("\n".join(_render_text(report)) + "\n")


# --------------------------------------------------------------- analyze
def _load(args):
    if args.form:
        return "inline", "", _parse_params(args.params), parse_one_form(args.form, _parse_params(args.params))
    if not args.path:
        raise CliError("usage", "give a .fol path or --form")
    name, params, om = read_fol(args.path)
    return args.path, name, params, om


def _point_entry(fol, rec, max_depth):
    from .blowup import InapplicableLaw, reduce_singularity
    from .localsing import at_origin, bb_grothendieck, bb_index

    om = at_origin(fol.chart(rec.chart), rec.coords)
    entry = {
        "label": rec.label(),
        "chart": rec.chart,
        "coords": [_s(c) for c in rec.coords],
        "field": _field_name(rec.field),
        "orbit": rec.orbit,
        "nu": rec.nu,
        "mu": rec.mu,
        "classification": str(rec.classification),
    }
    try:
        entry["bb"] = _s(bb_index(om))
        entry["bb_method"] = "closed formula"
        return entry
    except Exception:
        pass
    g = bb_grothendieck(om)
    entry["bb"] = _s(g)
    entry["bb_method"] = "residue"
    try:
        tree = reduce_singularity(om, max_depth=max_depth)
        fold = tree.bb()
        entry["reduction"] = {
            "blowups": tree.n_blowups,
            "leaves": len(tree.leaves()),
            "bb_fold": _s(fold),
            "bb_fold_agrees": fold == g,
            "tree": tree.to_text().split("\n"),
        }
        entry["bb_method"] = "residue, reduction fold"
    except InapplicableLaw as exc:
        entry["reduction"] = {"note": str(exc)}
    return entry


def run_analyze(args) -> tuple[dict, int]:
    from .globalcheck import SearchRefused, check_global_sums, invariant_curve_search

    t0 = time.perf_counter()
    source, name, params, om = _load(args)
    fol = ProjectiveFoliation(om)
    recs = singular_locus(fol)
    report = {
        "schema": SCHEMA,
        "command": "analyze",
        "input": {
            "source": source,
            "name": name,
            "params": {k: _s(v) for k, v in params.items()},
            "form": f"({om.P}) dx + ({om.Q}) dy",
        },
        "seed": args.seed,
        "degree": fol.degree,
        "singular_points": len(recs),
        "singular_locus": [_point_entry(fol, r, args.max_depth) for r in recs],
    }
    sums = check_global_sums(fol)
    report["sums"] = [
        {"formula": l.formula, "computed": _s(l.computed), "expected": _s(l.expected), "ok": l.ok}
        for l in sums.lines
    ]
    ok = sums.ok and all(p.get("reduction", {}).get("bb_fold_agrees", True) for p in report["singular_locus"])
    if args.curves is not None:
        try:
            cert = invariant_curve_search(fol, args.curves)
            report["curve_search"] = {
                "max_degree": cert.m_max,
                "point": cert.text().split("\n")[0],
                "per_degree": [
                    {"degree": r.degree, "N": r.N,
                     "dimensions": [f"N={n}:{d}" for n, d in r.dimensions],
                     "candidates": len(r.candidates)}
                    for r in cert.per_degree
                ],
                "notes": list(cert.notes),
                "verdict": cert.verdict,
            }
        except SearchRefused as exc:
            report["curve_search"] = {"max_degree": args.curves, "verdict": f"refused: {exc}"}
    report["verdict"] = "pass" if ok else "mismatch"
    if args.timing:
        report["timing_seconds"] = f"{time.perf_counter() - t0:.3f}"
    return report, EXIT_PASS if ok else EXIT_MISMATCH


# ------------------------------------------------------------ suites
def _family_case(item):
    from .elimination import verify_family_instance

    fid, params = item
    r = verify_family_instance(fid, params)
    return {"case": r.line(), "ok": r.ok}


def _nilcat_case(spec):
    from .nilcat import verify_nilpotent

    r = verify_nilpotent(spec)
    row = r.row()
    row["ok"] = r.ok
    return row


def _audit_case(i):
    from .blowup import recursion_audit
    from .corpus import audit_corpus

    name, om, curves = audit_corpus()[i]
    r = recursion_audit(om, curves=curves)
    return {"germ": name, "ok": r.ok, "checks": [c.line() for c in r.checks]}


def _fan_out(fn, items, jobs):
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(it) for it in items]


def suite_families(jobs=1):
    from .elimination import default_family_instances

    return _fan_out(_family_case, default_family_instances(), jobs)


def suite_nilcat(jobs=1):
    from .nilcat import grid_specs

    return _fan_out(_nilcat_case, grid_specs(), jobs)


def suite_audit(jobs=1):
    from .corpus import audit_corpus

    return _fan_out(_audit_case, range(len(audit_corpus())), jobs)


def elimination_report(through: int = 13, seed: int = 0, count: int = 50) -> dict:
    from .elimination import elimination_trace, random_evaluation_check, solve_conditions

    trace = elimination_trace(through)
    rows = [{"case": f"c{j} = {trace.c[j]}", "ok": True} for j in (2, 3)]
    rows += [{"case": ch.line(), "ok": ch.ok} for ch in trace.checks if ch.j <= through]
    if through >= 13:
        rows += [{"case": b.line(), "ok": b.ok} for b in solve_conditions(trace)]
    ok, n = random_evaluation_check(trace, count=count, seed=seed)
    rows.append({"case": f"symbolic d2..d{through} agree with {n} seeded random specializations (seed {seed})",
                 "ok": ok})
    return rows


def run_verify(args) -> tuple[dict, int]:
    suite = args.suite
    if suite == "families":
        rows = suite_families(args.jobs)
    elif suite == "nilcat-grid":
        rows = suite_nilcat(args.jobs)
    elif suite == "recursion-audit":
        rows = suite_audit(args.jobs)
    else:
        rows = elimination_report(13, args.seed)
    passed = sum(1 for r in rows if r["ok"])
    report = {"schema": SCHEMA, "command": f"verify {suite}", "cases": rows,
              "summary": f"{passed}/{len(rows)} passed"}
    ok = passed == len(rows)
    report["verdict"] = "pass" if ok else "mismatch"
    return report, EXIT_PASS if ok else EXIT_MISMATCH


# ------------------------------------------------------------ smaller commands
def run_families(args) -> tuple[dict, int]:
    from .elimination import FAMILIES, family_generator

    if args.action == "verify-all":
        rows = suite_families(args.jobs)
        ok = all(r["ok"] for r in rows)
        report = {"schema": SCHEMA, "command": "families verify-all", "cases": rows}
        if args.out:
            # --out is a directory here: write the .fol corpus
            from .corpus import write_corpus

            report["written"] = [os.path.join(args.out, n) for n in write_corpus(args.out)]
        report["verdict"] = "pass" if ok else "mismatch"
        return report, EXIT_PASS if ok else EXIT_MISMATCH
    if args.id not in FAMILIES:
        raise CliError("usage", f"unknown family {args.id!r}; choose from {', '.join(FAMILIES)}")
    params = _parse_params(args.params)
    om = family_generator(args.id, params, printed=args.printed)
    text = write_fol(args.id, om, params)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return ({"schema": SCHEMA, "command": "families generate", "family": args.id,
             "params": {k: _s(v) for k, v in params.items()}, "fol": text.rstrip("\n").split("\n"),
             "written": args.out or ""}, EXIT_PASS)


def run_eliminate(args) -> tuple[dict, int]:
    j = args.through.lstrip("d")
    if not j.isdigit() or not 4 <= int(j) <= 13:
        raise CliError("usage", "--through takes d4 .. d13")
    rows = elimination_report(int(j), args.seed)
    ok = all(r["ok"] for r in rows)
    return ({"schema": SCHEMA, "command": f"eliminate --through d{j}", "cases": rows,
             "verdict": "pass" if ok else "mismatch"}, EXIT_PASS if ok else EXIT_MISMATCH)


def _U_coeffs(text):
    p = parse_poly(text, ("x",))
    return tuple(p.coeff((k,)) for k in range(p.degree() + 1))


def run_nilcat(args) -> tuple[dict, int]:
    from .nilcat import NilcatError, TakensSpec, verify_nilpotent

    try:
        spec = TakensSpec(args.n, args.p, _U_coeffs(args.U))
    except NilcatError as exc:
        raise CliError("precondition", str(exc)) from exc
    r = verify_nilpotent(spec)
    report = {"schema": SCHEMA, "command": "nilcat verify", "spec": str(spec), "case": r.case, "k": r.k,
              "table": r.text().split("\n")[1:], "reduction": r.tree.to_text().split("\n"),
              "verdict": "pass" if r.ok else "mismatch"}
    return report, EXIT_PASS if r.ok else EXIT_MISMATCH


def run_check(args) -> tuple[dict, int]:
    from .globalcheck import NotInvariant, check_curve_sums, check_global_sums

    source, name, params, om = _load(args)
    if args.what == "sums":
        rep = check_global_sums(om)
    else:
        if not args.curve:
            raise CliError("usage", "check curve needs --curve")
        try:
            rep = check_curve_sums(om, parse_poly(args.curve, ("x", "y"), params))
        except NotInvariant as exc:
            raise CliError("precondition", str(exc)) from exc
    report = {"schema": SCHEMA, "command": f"check {args.what}", "input": source, "degree": rep.degree,
              "points": list(rep.points),
              "sums": [{"formula": l.formula, "computed": _s(l.computed), "expected": _s(l.expected), "ok": l.ok}
                       for l in rep.lines],
              "verdict": "pass" if rep.ok else "mismatch"}
    return report, EXIT_PASS if rep.ok else EXIT_MISMATCH


def run_search(args) -> tuple[dict, int]:
    from .globalcheck import SearchRefused, invariant_curve_search

    source, name, params, om = _load(args)
    try:
        cert = invariant_curve_search(ProjectiveFoliation(om), args.max_degree)
    except SearchRefused as exc:
        raise CliError("precondition", str(exc)) from exc
    report = {"schema": SCHEMA, "command": "search curves", "input": source,
              "certificate": cert.text().split("\n"), "verdict": cert.verdict}
    return report, EXIT_PASS


# ------------------------------------------------------------------ parser
def _add_input(p):
    p.add_argument("path", nargs="?", help=".fol file")
    p.add_argument("--form", help="inline 1-form, e.g. \"(2*y) dx + (-x) dy\"")
    p.add_argument("--params", help="parameter values, e.g. a=1,b=1/2")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="folsing", description="Exact analysis of polynomial foliations on P^2.")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    ap.add_argument("--seed", type=int, default=0, help="seed for random evaluation points")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for corpus suites")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full pipeline on one foliation")
    _add_input(p)
    p.add_argument("--curves", type=int, metavar="M", help="search invariant curves up to degree M")
    p.add_argument("--max-depth", type=int, default=40, help="reduction depth guard")
    p.add_argument("--timing", action="store_true", help="add wall-clock time to the report")

    p = sub.add_parser("verify", help="run a built-in verification suite")
    p.add_argument("suite", choices=["families", "nilcat-grid", "recursion-audit", "elimination"])

    p = sub.add_parser("families", help="generate or verify family instances")
    p.add_argument("action", choices=["generate", "verify-all"])
    p.add_argument("--id")
    p.add_argument("--params")
    p.add_argument("--out")
    p.add_argument("--printed", action="store_true", help="use the coefficient as printed (nilpotent_4param)")

    p = sub.add_parser("eliminate", help="the saddle-node elimination chain")
    p.add_argument("--through", default="d13")

    p = sub.add_parser("nilcat", help="nilpotent catalog")
    p.add_argument("action", choices=["verify"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--U", default="1", help="U(x) as a polynomial in x")

    p = sub.add_parser("check", help="global index sums")
    p.add_argument("what", choices=["sums", "curve"])
    _add_input(p)
    p.add_argument("--curve", help="affine equation of an invariant curve")

    p = sub.add_parser("search", help="invariant curve search")
    p.add_argument("what", choices=["curves"])
    _add_input(p)
    p.add_argument("--max-degree", type=int, default=5)
    return ap


_RUNNERS = {
    "analyze": run_analyze,
    "verify": run_verify,
    "families": run_families,
    "eliminate": run_eliminate,
    "nilcat": run_nilcat,
    "check": run_check,
    "search": run_search,
}


def _error_report(category, message, command):
    return {"schema": SCHEMA, "command": command, "error": {"category": category, "message": message}}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    random.seed(args.seed)
    code_of = {"parse": EXIT_USAGE, "usage": EXIT_USAGE, "precondition": EXIT_USAGE,
               "field-support": EXIT_FIELD}
    try:
        report, code = _RUNNERS[args.command](args)
    except CliError as exc:
        report, code = _error_report(exc.category, str(exc), args.command), code_of[exc.category]
    except ParseError as exc:
        report, code = _error_report("parse", str(exc), args.command), EXIT_USAGE
    except UnsupportedField as exc:
        report, code = _error_report("field-support", str(exc), args.command), EXIT_FIELD
    except (FoliationError, ValueError, OSError) as exc:
        report, code = _error_report("precondition", str(exc), args.command), EXIT_USAGE
    emit(report, args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())
