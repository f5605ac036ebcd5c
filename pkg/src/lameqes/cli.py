"""Command-line front end.

Exit codes: 0 success, 1 failed verification, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .qes import ParameterError, PotentialParams, parse_rational, solvability_records, survey_sets
from .reference_cases import CASES, case_for
from .spectral import BandEdgeSolution, solve, solve_sets
from .verify import DEFAULT_STEPS, crosscheck, discriminant_trace

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


# -- output helpers ------------------------------------------------------------

def _num(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in output")
    text = format(x, ".17g")
    if not any(ch in text for ch in ".e"):
        text += ".0"
    return text


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _frac(q: Fraction) -> str:
    return str(q)


def eigenfunction_descriptor(alpha: Fraction, beta: Fraction, n: int) -> str:
    """E.g. ``cn(x) dn(x)^{-1} P2(sn x)``."""
    parts = []
    if alpha:
        parts.append("cn(x)" if alpha == 1 else f"cn(x)^{{{alpha}}}")
    if beta:
        parts.append(f"dn(x)^{{{beta}}}")
    if n > 0:
        parts.append(f"P{n}(sn x)")
    return " ".join(parts) if parts else "1"


def polynomial_text(s: BandEdgeSolution) -> str:
    terms = []
    for k, c in sorted(zip(s.basis_degrees, s.coeffs), reverse=True):
        if c == 0.0:
            continue
        mon = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
        coef = format(c, ".12g")
        if mon and coef in ("1", "-1"):
            terms.append(coef[:-1] + mon)
        else:
            terms.append(f"{coef}{'*' if mon else ''}{mon}")
    return " + ".join(terms).replace("+ -", "- ") or "0"


# -- parameter handling ----------------------------------------------------------

def _params_from_args(args) -> PotentialParams:
    try:
        a = parse_rational(args.a)
        b = parse_rational(args.b)
        m = float(args.m)
        shift_arg = getattr(args, "shift", None)
        if shift_arg is None:
            shift = 0.0
        elif shift_arg == "paper":
            PotentialParams(a, b, m)  # validate first so the mixed case reports itself
            case = case_for(a, b)
            if case is None:
                raise InputError(
                    f"--shift paper is only defined for (a, b) = (2, 1) and (7/2, 1/2), got ({a}, {b})"
                )
            shift = case.shift(m)
        else:
            try:
                shift = float(shift_arg)
            except ValueError:
                raise InputError(f"--shift must be a number or 'paper', got {shift_arg!r}") from None
            if not math.isfinite(shift):
                raise InputError("--shift must be finite")
        return PotentialParams(a, b, m, shift)
    except ParameterError as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


# -- document ------------------------------------------------------------------------

def solution_document(p: PotentialParams, solutions: list[BandEdgeSolution]) -> dict:
    groups: dict[int, int] = {}
    next_group = 0
    for i, s in enumerate(solutions):
        if s.degeneracy_partners and i not in groups:
            for j in (i, *s.degeneracy_partners):
                groups[j] = next_group
            next_group += 1

    records = []
    by_set = {r.set_id: r for r in solvability_records(p)}
    for rs, n, ok in survey_sets(p):
        entry = {
            "set_id": rs.set_id,
            "b1": _frac(rs.b1),
            "d1": _frac(rs.d1),
            "n": int(n) if n.denominator == 1 else _frac(n),
            "admissible": ok,
        }
        rec = by_set.get(rs.set_id)
        if rec is not None:
            entry.update(
                {
                    "lambda1": _frac(rec.lambda1),
                    "alpha": _frac(rec.alpha),
                    "beta": _frac(rec.beta),
                    "poly_parity": rec.poly_parity,
                    "period_class": rec.period_class,
                    "li_count": rec.li_count,
                    "eigenfunction": eigenfunction_descriptor(rec.alpha, rec.beta, rec.n),
                }
            )
        records.append(entry)

    sols = []
    for i, s in enumerate(solutions):
        r = s.record
        item = {
            "energy": s.energy,
            "energy_unshifted": s.energy_unshifted,
            "set_id": r.set_id,
            "alpha": _frac(r.alpha),
            "beta": _frac(r.beta),
            "n": r.n,
            "poly_coeffs": [float(c) for c in s.dense_coefficients()],
            "period_class": r.period_class,
            "eigenfunction": eigenfunction_descriptor(r.alpha, r.beta, r.n),
        }
        if i in groups:
            item["degeneracy_group"] = groups[i]
        sols.append(item)

    return {
        "params": {"a": _frac(p.a), "b": _frac(p.b), "m": p.m, "shift": p.shift},
        "records": records,
        "solutions": sols,
    }


def _text_solutions(doc: dict) -> str:
    pr = doc["params"]
    lines = [f"a = {pr['a']}, b = {pr['b']}, m = {pr['m']:.17g}, shift = {pr['shift']:.17g}", ""]
    lines.append(f"{'set':>3}  {'b1':>5}  {'d1':>5}  {'n':>3}  {'LI':>3}  eigenfunction")
    for r in doc["records"]:
        li = str(r.get("li_count", "-"))
        ef = r.get("eigenfunction", "-")
        lines.append(f"{r['set_id']:>3}  {r['b1']:>5}  {r['d1']:>5}  {str(r['n']):>3}  {li:>3}  {ef}")
    lines.append("")
    lines.append(f"{'#':>2}  {'set':>3}  {'period':>6}  {'group':>5}  {'energy':>24}  eigenfunction")
    for i, s in enumerate(doc["solutions"]):
        grp = str(s.get("degeneracy_group", "-"))
        lines.append(
            f"{i:>2}  {s['set_id']:>3}  {s['period_class']:>6}  {grp:>5}  {s['energy']:>24.17g}  {s['eigenfunction']}"
        )
    return "\n".join(lines) + "\n"


def _text_report(rep: dict) -> str:
    lines = [f"verification {'PASSED' if rep['passed'] else 'FAILED'} (steps={rep['steps']})"]
    for e in rep["entries"]:
        status = "ok  " if e["passed"] else "FAIL"
        near = "-" if e["nearest_edge"] is None else f"{e['nearest_edge']:.12f} ({e['nearest_kind']})"
        lines.append(
            f"  {status} E={e['energy']:.12f} set={e['set_id']} period={e['period_class']} "
            f"delta={e['delta']:+.12f} nearest={near}"
        )
        for msg in e["messages"]:
            lines.append(f"       {msg}")
    for msg in rep["messages"]:
        lines.append(f"  note: {msg}")
    return "\n".join(lines) + "\n"


# -- commands ------------------------------------------------------------------------

def cmd_solve(args) -> int:
    p = _params_from_args(args)
    doc = solution_document(p, solve(p))
    sys.stdout.write(dumps(doc) + "\n" if args.format == "json" else _text_solutions(doc))
    return EXIT_OK


def cmd_verify(args) -> int:
    p = _params_from_args(args)
    if args.steps < 1:
        raise InputError("--steps must be positive")
    sols = solve(p)
    report = crosscheck(sols, p, steps=args.steps)
    rep = report.to_dict()
    if args.format == "json":
        doc = solution_document(p, sols)
        doc["verification"] = rep
        sys.stdout.write(dumps(doc) + "\n")
    else:
        sys.stdout.write(_text_report(rep))
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_bands(args) -> int:
    p = _params_from_args(args)
    if not args.emin < args.emax:
        raise InputError("--emin must be below --emax")
    if args.samples < 2:
        raise InputError("--samples must be at least 2")
    if args.steps < 1:
        raise InputError("--steps must be positive")
    rows = discriminant_trace(p, args.emin, args.emax, args.samples, steps=args.steps)
    text = "energy,delta\n" + "".join(f"{format(r.energy, '.12g')},{format(r.delta, '.12g')}\n" for r in rows)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w", newline="\n", encoding="ascii") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror or exc}") from None
    return EXIT_OK


def table_rows(which: int, m: float) -> list[dict]:
    """Set-by-set rows for one of the two worked cases."""
    case = CASES[which]
    p = case.params(m)
    per_set = {r.set_id: (r, sols) for r, sols in solve_sets(p)}
    rows = []
    for rs, n, ok in survey_sets(p):
        base = {"set_id": rs.set_id, "b1": _frac(rs.b1), "d1": _frac(rs.d1), "n": int(n)}
        if not ok:
            rows.append({**base, "li_count": None, "eigenfunction": None, "polynomial": None,
                         "energy_label": None, "energy": None})
            continue
        rec, sols = per_set[rs.set_id]
        for s in sols:
            rows.append(
                {
                    **base,
                    "li_count": rec.li_count,
                    "eigenfunction": eigenfunction_descriptor(rec.alpha, rec.beta, rec.n),
                    "polynomial": polynomial_text(s),
                    "energy_label": case.label(s.energy, m),
                    "energy": s.energy,
                }
            )
    return rows


def cmd_tables(args) -> int:
    if args.which not in CASES:
        raise InputError(f"--which must be 4 or 5, got {args.which}")
    try:
        m = float(args.m)
        case = CASES[args.which]
        case.params(m)
    except (ParameterError, ValueError) as exc:
        raise InputError(str(exc)) from None
    rows = table_rows(args.which, m)
    if args.format == "json":
        doc = {"case": args.which, "a": _frac(case.a), "b": _frac(case.b), "m": m, "rows": rows}
        sys.stdout.write(dumps(doc) + "\n")
        return EXIT_OK
    dash = "-"
    out = [f"worked case {args.which}: a = {case.a}, b = {case.b}, m = {m:.17g}", ""]
    out.append(f"{'set':>3}  {'b1':>5}  {'d1':>5}  {'n':>3}  {'LI':>3}  {'eigenfunction':<28}  {'P_n(t)':<44}  {'label':<22}  energy")
    for r in rows:
        if r["energy"] is None:
            out.append(f"{r['set_id']:>3}  {r['b1']:>5}  {r['d1']:>5}  {r['n']:>3}  {dash:>3}  {dash:<28}  {dash:<44}  {dash:<22}  {dash}")
            continue
        out.append(
            f"{r['set_id']:>3}  {r['b1']:>5}  {r['d1']:>5}  {r['n']:>3}  {r['li_count']:>3}  "
            f"{r['eigenfunction']:<28}  {r['polynomial']:<44}  {r['energy_label']:<22}  {r['energy']:.17g}"
        )
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_INPUT)


def _add_params(sp, shift=True):
    sp.add_argument("--a", required=True, help="rational, e.g. 2 or 7/2")
    sp.add_argument("--b", required=True, help="rational, e.g. 1 or 1/2")
    sp.add_argument("--m", required=True, type=float, help="elliptic parameter, 0 <= m < 1")
    if shift:
        sp.add_argument("--shift", default=None, help="additive constant, or 'paper' for the two worked cases")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lame-qes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("solve", help="analytic band edges")
    _add_params(sp)
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="solve and cross-check against the discriminant oracle")
    _add_params(sp)
    sp.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    sp.add_argument("--format", choices=("json", "text"), default="text")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bands", help="discriminant delta(E) as CSV")
    _add_params(sp)
    sp.add_argument("--emin", type=float, required=True)
    sp.add_argument("--emax", type=float, required=True)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    sp.add_argument("--out", default=None, help="output path (default: standard output)")
    sp.set_defaults(func=cmd_bands)

    sp = sub.add_parser("tables", help="set-by-set layout for worked case 4 (a=2, b=1) or 5 (a=7/2, b=1/2)")
    sp.add_argument("--which", type=int, required=True)
    sp.add_argument("--m", type=float, required=True)
    sp.add_argument("--format", choices=("json", "text"), default="text")
    sp.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
