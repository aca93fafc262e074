"""Command-line entry point: ``virlike <subcommand> [flags]``.

Exit codes: 0 success, 1 a residual or uncertified target was found,
2 invalid input.  Output is built in full before anything is written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from typing import List, Optional, Sequence, Tuple

import jsonschema

from virlike.algebra import antisymmetry_scan, bracket_basis, jacobi_scan
from virlike.catalog import Family, FamilySpec, ModVector, act_generator, family_validity
from virlike.classify import Deformation, DeformationSpec, fit_family, rigidity_sweep
from virlike.report import dumps, merge, report_csv
from virlike.scalars import format_rational, parse_rational
from virlike.span import S, S_PRIME, IndexBox, LatticeBasis, generation_witness, ghw_vanishing_set, is_z_basis
from virlike.verify import (
    ActionTable,
    TableAction,
    Window,
    fg_equation_residual,
    grading_check,
    module_axiom_residual,
    normalization_check,
    tabulate,
)

EXIT_OK = 0
EXIT_RESIDUAL = 1
EXIT_INVALID = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# table I/O
# ---------------------------------------------------------------------------


def load_table(path: str) -> ActionTable:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return ActionTable.from_dict(data)


def save_table(t: ActionTable, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(t.to_dict()))
        fh.write("\n")


# ---------------------------------------------------------------------------
# flag parsing helpers
# ---------------------------------------------------------------------------


def _rational(text: str):
    return parse_rational(text)


def _int_list(text: str, n: Optional[int] = None) -> List[int]:
    try:
        out = [int(p) for p in text.split(",")]
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from None
    if n is not None and len(out) != n:
        raise ValueError(f"expected {n} integers, got {len(out)}")
    return out


def _rational_list(text: str):
    return [parse_rational(p) for p in text.split(",")]


def _family_spec(args) -> FamilySpec:
    return FamilySpec(Family(args.family), lam=args.lam, mu=args.mu, a=args.a)


def _csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


_NEG_VALUE = re.compile(r"^-[0-9]")


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """``--lambda -1/2`` becomes ``--lambda=-1/2`` so argparse does not read the
    value as an option."""
    out: List[str] = []
    for tok in argv:
        if out and _NEG_VALUE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


# ---------------------------------------------------------------------------
# subcommands; each returns (text, exit_code)
# ---------------------------------------------------------------------------


def cmd_bracket(args) -> Tuple[str, int]:
    x = bracket_basis(args.a1, args.b1, args.a2, args.b2)
    if args.format == "csv":
        d = x.to_dict()
        rows = [("alpha", "beta", "coeff")]
        rows += [(t["alpha"], t["beta"], t["coeff"]) for t in d["terms"]]
        rows.append(("c", "", d["central"]))
        return _csv(rows), EXIT_OK
    return x.to_json(), EXIT_OK


def cmd_jacobi(args) -> Tuple[str, int]:
    beta = args.box if args.beta_box is None else args.beta_box
    checked, failures = jacobi_scan(args.box, beta)
    pairs, bad_pairs = antisymmetry_scan(args.box, beta)
    ok = not failures and not bad_pairs
    if args.format == "csv":
        rows = [("kind", "x", "y", "z", "defect")]
        rows += [("jacobi", f"{x.alpha}:{x.beta}", f"{y.alpha}:{y.beta}", f"{z.alpha}:{z.beta}", repr(d))
                 for x, y, z, d in failures]
        rows += [("antisymmetry", f"{x.alpha}:{x.beta}", f"{y.alpha}:{y.beta}", "", "") for x, y in bad_pairs]
        return _csv(rows), EXIT_OK if ok else EXIT_RESIDUAL
    out = {
        "pass": ok,
        "box": {"alpha_max": args.box, "beta_max": beta},
        "triples_checked": checked,
        "pairs_checked": pairs,
        "jacobi_failures": [
            {"x": list(x), "y": list(y), "z": list(z), "defect": d.to_dict()} for x, y, z, d in failures
        ],
        "antisymmetry_failures": [{"x": list(x), "y": list(y)} for x, y in bad_pairs],
    }
    return dumps(out), EXIT_OK if ok else EXIT_RESIDUAL


def cmd_closure(args) -> Tuple[str, int]:
    box = IndexBox.parse(args.box)
    bands = _int_list(args.bands) if args.bands else ()
    rep = generation_witness(args.m, args.n, args.variant, box, args.rounds, bands)
    code = EXIT_OK if rep.all_certified else EXIT_RESIDUAL
    if args.format == "csv":
        rows = [("alpha", "beta", "certified", "status", "group")]
        rows += [(t.alpha, t.beta, str(t.certified).lower(), t.status, t.group) for t in rep.targets]
        return _csv(rows), code
    return dumps(rep.to_dict()), code


def cmd_ghw_set(args) -> Tuple[str, int]:
    a, b, c, d = _int_list(args.basis, 4)
    basis = LatticeBasis((a, b), (c, d))
    if not is_z_basis(basis):
        raise ValueError(f"({a},{b}),({c},{d}) is not a Z-basis: determinant {basis.det()}")
    pts = ghw_vanishing_set(basis, args.k1, args.k2)
    if args.format == "csv":
        return _csv([("alpha", "beta"), *pts]), EXIT_OK
    return dumps({"basis": [[a, b], [c, d]], "k1_max": args.k1, "k2_max": args.k2,
                  "points": [list(p) for p in pts]}), EXIT_OK


def cmd_act(args) -> Tuple[str, int]:
    spec = _family_spec(args)
    family_validity(spec)
    v = act_generator(spec, args.r, args.s, ModVector.basis(args.m, args.n))
    if args.format == "csv":
        return _csv([("m", "n", "coeff"), *((m, n, format_rational(c)) for (m, n), c in v.items())]), EXIT_OK
    return dumps({"family": spec.to_dict(), **v.to_dict()}), EXIT_OK


def _table_text(t: ActionTable, fmt: str) -> str:
    if fmt == "csv":
        rows = [("table", "r", "s", "m", "n", "value")]
        for name, d in (("f", t.f), ("g", t.g)):
            rows += [(name, *key, format_rational(v)) for key, v in sorted(d.items())]
        return _csv(rows)
    return dumps(t.to_dict())


def cmd_tabulate(args) -> Tuple[str, int]:
    t = tabulate(_family_spec(args), Window.parse(args.window))
    if args.out:
        save_table(t, args.out)
        return dumps({"written": args.out, "entries": len(t.f) + len(t.g)}), EXIT_OK
    return _table_text(t, args.format), EXIT_OK


def cmd_verify(args) -> Tuple[str, int]:
    if args.table:
        if args.family:
            raise ValueError("give either --family or --table, not both")
        table = load_table(args.table)
        action = TableAction(table)
        w = table.window
    else:
        if not args.family:
            raise ValueError("one of --family or --table is required")
        action = _family_spec(args)
        w = Window.parse(args.window)
        table = tabulate(action, w)
    report = merge(
        [
            module_axiom_residual(action, w),
            fg_equation_residual(table),
            normalization_check(table),
            grading_check(action, w),
        ]
    )
    code = EXIT_OK if report.passed else EXIT_RESIDUAL
    if args.format == "csv":
        return report_csv(report), code
    return dumps(report.to_dict()), code


def cmd_classify(args) -> Tuple[str, int]:
    res = fit_family(load_table(args.table))
    code = EXIT_OK if res.matches else EXIT_RESIDUAL
    if args.format == "csv":
        rows = [("family", "paper_label", "a", "lambda", "mu")]
        rows += [tuple(m.to_dict().values()) for m in res.matches]
        return _csv(rows), code
    return dumps(res.to_dict()), code


def cmd_sweep(args) -> Tuple[str, int]:
    d = DeformationSpec(Deformation(args.deformation), args.lam, args.mu)
    rep = rigidity_sweep(d, _rational_list(args.grid), Window.parse(args.window))
    code = EXIT_OK if rep.rigid else EXIT_RESIDUAL
    if args.format == "csv":
        rows = [("t", "pass", "residuals")]
        rows += [(format_rational(p.t), str(p.passed).lower(), p.residuals) for p in rep.points]
        return _csv(rows), code
    return dumps([{"t": format_rational(p.t), "pass": p.passed} for p in rep.points]), code


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _family_flags(p, required=True):
    p.add_argument("--family", choices=[f.value for f in Family], required=required)
    p.add_argument("--lambda", dest="lam", type=_rational, default=parse_rational("0"))
    p.add_argument("--mu", type=_rational, default=parse_rational("0"))
    p.add_argument("--a", type=_rational, default=parse_rational("0"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="virlike", description="Exact computations for the non-graded Virasoro-like algebra")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.set_defaults(fn=fn)
        return p

    p = add("bracket", cmd_bracket, "bracket of two basis elements")
    for flag in ("--a1", "--b1", "--a2", "--b2"):
        p.add_argument(flag, type=int, required=True)

    p = add("jacobi", cmd_jacobi, "exhaustive Jacobi and antisymmetry scan")
    p.add_argument("--box", type=int, required=True, help="|alpha| bound (and |beta| unless --beta-box)")
    p.add_argument("--beta-box", type=int, default=None)

    p = add("closure", cmd_closure, "certified generation witness around (m, n)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--variant", choices=(S, S_PRIME), default=S)
    p.add_argument("--box", required=True, help="a0,a1,b0,b1")
    p.add_argument("--rounds", type=int, default=4)
    p.add_argument("--bands", default=None, help="extra bands k>=3, comma separated")

    p = add("ghw-set", cmd_ghw_set, "vanishing set of a lattice basis")
    p.add_argument("--basis", required=True, help="a,b,c,d for alpha1=(a,b), alpha2=(c,d)")
    p.add_argument("--k1", type=int, required=True)
    p.add_argument("--k2", type=int, required=True)

    p = add("act", cmd_act, "L[r,s] applied to v[m,n]")
    _family_flags(p)
    for flag in ("--r", "--s", "--m", "--n"):
        p.add_argument(flag, type=int, required=True)

    p = add("tabulate", cmd_tabulate, "coefficient table of a family on a window")
    _family_flags(p)
    p.add_argument("--window", default="3,3,2,2", help="M,N,R,S")
    p.add_argument("--out", default=None)

    p = add("verify", cmd_verify, "module axiom and coefficient-equation residuals")
    _family_flags(p, required=False)
    p.add_argument("--window", default="3,3,2,2", help="M,N,R,S")
    p.add_argument("--table", default=None)

    p = add("classify", cmd_classify, "recover family and parameters from a table")
    p.add_argument("--table", required=True)

    p = add("sweep", cmd_sweep, "rigidity sweep of a built-in deformation")
    p.add_argument("--deformation", choices=[d.value for d in Deformation], required=True)
    p.add_argument("--lambda", dest="lam", type=_rational, required=True)
    p.add_argument("--mu", type=_rational, default=parse_rational("0"))
    p.add_argument("--grid", default="-1,-1/2,0,1/2,1")
    p.add_argument("--window", default="3,3,3,3", help="M,N,R,S")
    return parser


def run_command(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(_join_negative_values(list(argv)))
        text, code = args.fn(args)
    except UsageError as exc:
        print(f"virlike: error: {exc}", file=stderr)
        return EXIT_INVALID
    except (ValueError, KeyError, OSError, jsonschema.ValidationError) as exc:
        msg = exc.message if isinstance(exc, jsonschema.ValidationError) else str(exc)
        print(f"virlike: error: {msg.splitlines()[0] if msg else type(exc).__name__}", file=stderr)
        return EXIT_INVALID
    stdout.write(text if text.endswith("\n") else text + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        return run_command(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
