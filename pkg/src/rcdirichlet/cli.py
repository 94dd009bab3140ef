"""``rcd``: print expansions, brackets, coefficient tables and run verifications.

Usage::

    rcd expand --f E4 -N 3
    rcd expand --f E4 --deriv 1 -N 2
    rcd bracket --f E4 --g E6 -w 1 -N 3
    rcd coeffs -m 1 -n 1 --mu 4 --nu 6 --route both
    rcd verify theorem --f E4 --g E6 -m 1 -n 1 -N 50
    rcd verify section6 --w-max 8 --mu-max 12 --nu-max 12
    rcd verify roundtrip --seed 0

Exit status: 0 success, 1 verification failure or unreadable form file,
2 bad arguments, 3 grading inconsistency (an internal bug signal).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from ._rational import format_fraction
from .brackets import BracketSpec, coefficient_table, rankin_cohen
from .dirichlet import (
    VerificationReport,
    pipeline_polynomial,
    verify_equivariance,
    verify_prop31,
    verify_roundtrip,
    verify_section5,
    verify_section5_grid,
    verify_section6,
    verify_theorem,
)
from .forms import BUILTIN_NAMES, FormDescriptor, FormFileError, builtin_form, load_form
from .jets import embed_modular, lambda_map
from .qseries import GradingError, PiGradedSeries, nth_z_derivative

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GRADING = 0, 1, 2, 3

VERIFY_TARGETS = ("theorem", "prop31", "section5", "section6", "equivariance", "roundtrip")


class UsageError(Exception):
    pass


class FileProblem(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return format_fraction(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def resolve_form(selector: str | None, N: int | None, flag: str = "--f", default_N: int = 10) -> FormDescriptor:
    """Builtin name (E2, E4, E6, Delta) or a form file, optionally prefixed by '@'.

    Without -N, builtins use ``default_N`` and files their stored precision.
    """
    if selector is None:
        raise UsageError(f"{flag} is required")
    if not selector.startswith("@"):
        try:
            return builtin_form(selector, default_N if N is None else N)
        except ValueError:
            pass
    path = Path(selector[1:] if selector.startswith("@") else selector)
    try:
        fd = load_form(path)
    except OSError as exc:
        raise FileProblem(f"cannot read form file {path}: {exc.strerror or exc}") from None
    except FormFileError as exc:
        raise FileProblem(f"{path}: {exc}") from None
    if N is None:
        return fd
    if fd.precision < N:
        raise UsageError(f"{path} is known through q^{fd.precision}; -N {N} is too large")
    return FormDescriptor(fd.name, fd.weight, fd.depth, fd.series.truncate(N))


# --------------------------------------------------------------------------
# Rendering


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _series_payload(series: PiGradedSeries) -> dict:
    return {str(e): [format_fraction(c) for c in vec] for e, vec in series.slices.items()}


def render_series(meta: dict, series: PiGradedSeries, fmt: str) -> str:
    if fmt == "json":
        obj = dict(meta)
        obj.update(
            width_h=format_fraction(series.width_h),
            precision=series.precision,
            grades=list(series.grades),
            slices=_series_payload(series),
        )
        return json.dumps(obj, indent=2) + "\n"
    if fmt == "csv":
        rows = [[e, k, c] for e, vec in series.slices.items() for k, c in enumerate(vec)]
        return _csv(["grade", "k", "coefficient"], rows)
    head = ", ".join(f"{k}={v}" for k, v in meta.items())
    lines = [f"{head}, h={format_fraction(series.width_h)}, N={series.precision}"]
    if series.is_zero():
        lines.append("zero series")
    for e, vec in series.slices.items():
        lines.append(f"grade {e}: " + " ".join(format_fraction(c) for c in vec))
    return "\n".join(lines) + "\n"


def _table_rows(table: list[dict]) -> list[dict]:
    out = []
    for row in table:
        item = {"l": row["l"]}
        for key in ("printed", "derived"):
            if key in row:
                item[key] = format_fraction(row[key])
        if "agree" in row:
            item["agree"] = row["agree"]
        if "m" in row:
            item = {"m": row["m"], "n": row["n"], "mu": row["mu"], "nu": row["nu"], **item}
        out.append(item)
    return out


def report_to_dict(check: str, report: VerificationReport, extra: dict | None = None) -> dict:
    per_index = []
    for r in report.per_index:
        item = {"n": r.n, "lhs": _fmt(r.lhs), "rhs": _fmt(r.rhs), "pass": r.passed}
        if r.label:
            item["label"] = r.label
        per_index.append(item)
    obj = {
        "check": check,
        "description": report.description,
        "params": report.params,
        "per_index": per_index,
        "coefficient_table": _table_rows(report.coefficient_table),
        "pass": report.overall,
    }
    if extra:
        obj.update(extra)
    return obj


def render_report(obj: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2) + "\n"
    if fmt == "csv":
        labelled = any("label" in r for r in obj["per_index"])
        header = ["n", "lhs", "rhs", "pass"] + (["label"] if labelled else [])
        rows = [[r["n"], r["lhs"], r["rhs"], r["pass"]] + ([r.get("label", "")] if labelled else []) for r in obj["per_index"]]
        return _csv(header, rows)
    failures = [r for r in obj["per_index"] if not r["pass"]]
    lines = [
        f"{obj['check']}: {obj['description']}",
        "params: " + ", ".join(f"{k}={v}" for k, v in obj["params"].items()),
        f"checked {len(obj['per_index'])} indices, {len(failures)} failed",
    ]
    for r in failures[:20]:
        lines.append(f"  FAIL n={r['n']} lhs={r['lhs']} rhs={r['rhs']} {r.get('label', '')}".rstrip())
    if obj["coefficient_table"]:
        lines.append("coefficient table (l, printed, derived, agree):")
        for row in obj["coefficient_table"]:
            lines.append(f"  {row['l']}  {row.get('printed', '-')}  {row.get('derived', '-')}  {row.get('agree', '-')}")
    if "printed_pass" in obj:
        lines.append(f"printed route: {'PASS' if obj['printed_pass'] else 'FAIL'} (reported only)")
    lines.append("PASS" if obj["pass"] else "FAIL")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Commands


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = {"m": "-m", "n": "-n", "w": "-w", "mu": "--mu", "nu": "--nu", "f": "--f", "g": "--g"}
        raise UsageError("missing " + ", ".join(flags.get(n, n) for n in missing))


def cmd_expand(args) -> int:
    fd = resolve_form(args.f, args.N)
    if args.deriv < 0:
        raise UsageError("--deriv must be nonnegative")
    series = nth_z_derivative(fd.series, args.deriv)
    meta = {"form": fd.name, "weight": fd.weight, "depth": fd.depth, "deriv": args.deriv}
    _emit(render_series(meta, series, args.format), args.out)
    return EXIT_OK


def cmd_bracket(args) -> int:
    _need(args, "f", "g", "w")
    phi, psi = resolve_form(args.f, args.N, "--f"), resolve_form(args.g, args.N, "--g")
    try:
        spec = BracketSpec(phi.weight, psi.weight, args.w)
        series = rankin_cohen(phi, psi, spec)
    except GradingError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    meta = {"f": phi.name, "g": psi.name, "mu": spec.mu, "nu": spec.nu, "w": spec.w}
    _emit(render_series(meta, series, args.format), args.out)
    return EXIT_OK


def cmd_coeffs(args) -> int:
    _need(args, "m", "n", "mu", "nu")
    try:
        rows = coefficient_table(args.m, args.n, args.mu, args.nu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.l is not None:
        if not 0 <= args.l <= args.m + args.n:
            raise UsageError(f"-l must lie in 0..{args.m + args.n}")
        rows = [r for r in rows if r["l"] == args.l]
    keep = {"derived": ("derived",), "printed": ("printed",), "both": ("printed", "derived", "agree")}[args.route]
    rows = [{"l": r["l"], **{k: r[k] for k in keep}} for r in rows]
    table = _table_rows(rows)
    if args.format == "json":
        obj = {
            "check": "coeffs",
            "params": {"m": args.m, "n": args.n, "mu": args.mu, "nu": args.nu, "route": args.route},
            "coefficient_table": table,
        }
        text = json.dumps(obj, indent=2) + "\n"
    elif args.format == "csv":
        header = ["l", *keep]
        text = _csv(header, [[r[k] for k in header] for r in table])
    else:
        lines = [f"a(l) for m={args.m} n={args.n} mu={args.mu} nu={args.nu}, (2 pi i/h)^l removed"]
        for r in table:
            lines.append("  " + "  ".join(f"{k}={r[k]}" for k in ("l", *keep)))
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _verify_theorem(args):
    _need(args, "f", "g", "m", "n")
    phi = resolve_form(args.f, args.N, "--f", 50)
    psi = resolve_form(args.g, args.N, "--g", 50)
    N = min(phi.precision, psi.precision)
    try:
        derived = verify_theorem(phi, psi, args.m, args.n, N, "derived")
    except GradingError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.route == "derived":
        return report_to_dict("theorem", derived)
    printed = verify_theorem(phi, psi, args.m, args.n, N, "printed")
    extra = {
        "printed_per_index": report_to_dict("theorem", printed)["per_index"],
        "printed_pass": printed.overall,
    }
    if args.route == "printed":
        # exit status still follows the derived route
        obj = report_to_dict("theorem", printed, extra)
        obj["pass"] = derived.overall
        obj["per_index_route"] = "printed"
        return obj
    return report_to_dict("theorem", derived, extra)


def _verify_prop31(args):
    _need(args, "f", "m")
    phi = resolve_form(args.f, args.N, "--f", 50)
    N = phi.precision
    try:
        if args.g is not None:
            psi = resolve_form(args.g, args.N, "--g", 50)
            N = min(N, psi.precision)
            Phi = pipeline_polynomial(phi, psi, args.m, args.n or 0)
        else:
            Phi = lambda_map(embed_modular(phi, args.m), phi.weight + 2 * args.m)
        report = verify_prop31(Phi, Phi.weight, N)
    except GradingError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return report_to_dict("prop31", report)


def _verify_section5(args):
    if (args.mu is None) != (args.nu is None):
        raise UsageError("give both --mu and --nu, or neither for the 1..20 grid")
    if args.mu is None:
        return report_to_dict("section5", verify_section5_grid(20, 20))
    try:
        return report_to_dict("section5", verify_section5(args.mu, args.nu))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _verify_section6(args):
    try:
        return report_to_dict("section6", verify_section6(args.w_max, args.mu_max, args.nu_max))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _verify_equivariance(args):
    phi = resolve_form(args.f or "E4", args.N, "--f", 40)
    psi = resolve_form(args.g or "E6", args.N, "--g", 40)
    N = min(phi.precision, psi.precision)
    cases = ((1, 1), (2, 0), (0, 2), (2, 1))
    if args.m is not None or args.n is not None:
        cases = ((args.m or 0, args.n or 0),)
    try:
        report = verify_equivariance(phi, psi, cases, terms=N + 1, tol=args.tol)
    except GradingError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return report_to_dict("equivariance", report)


def _verify_roundtrip(args):
    return report_to_dict("roundtrip", verify_roundtrip(args.trials, args.seed))


def cmd_verify(args) -> int:
    handlers = {
        "theorem": _verify_theorem,
        "prop31": _verify_prop31,
        "section5": _verify_section5,
        "section6": _verify_section6,
        "equivariance": _verify_equivariance,
        "roundtrip": _verify_roundtrip,
    }
    obj = handlers[args.target](args)
    _emit(render_report(obj, args.format), args.out)
    return EXIT_OK if obj["pass"] else EXIT_FAIL


# --------------------------------------------------------------------------
# Parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--out", help="write output here instead of standard output")
    p.add_argument("-N", type=int, help="q-expansion precision (coefficients through q^N)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcd",
        description="Exact q-expansions, Rankin-Cohen brackets and Dirichlet-series identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    forms_help = f"builtin ({', '.join(BUILTIN_NAMES)}) or form file path (optionally @path)"

    p = sub.add_parser("expand", help="print a q-expansion or its derivative")
    p.add_argument("--f", help=forms_help)
    p.add_argument("--deriv", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("bracket", help="Rankin-Cohen bracket [f, g]_w")
    p.add_argument("--f", help=forms_help)
    p.add_argument("--g", help=forms_help)
    p.add_argument("-w", type=int)
    _common(p)
    p.set_defaults(func=cmd_bracket)

    p = sub.add_parser("coeffs", help="table of a(l) for 0 <= l <= m + n")
    p.add_argument("-m", type=int)
    p.add_argument("-n", type=int)
    p.add_argument("--mu", type=int)
    p.add_argument("--nu", type=int)
    p.add_argument("-l", type=int, help="only this l")
    p.add_argument("--route", choices=("derived", "printed", "both"), default="derived")
    _common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("verify", help="run a verification harness")
    p.add_argument("target", choices=VERIFY_TARGETS)
    p.add_argument("--f", help=forms_help)
    p.add_argument("--g", help=forms_help)
    p.add_argument("-m", type=int)
    p.add_argument("-n", type=int)
    p.add_argument("--mu", type=int)
    p.add_argument("--nu", type=int)
    p.add_argument("--route", choices=("derived", "printed", "both"), default="derived")
    p.add_argument("--w-max", type=int, default=8)
    p.add_argument("--mu-max", type=int, default=12)
    p.add_argument("--nu-max", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-8, help="numeric residual bound")
    _common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "N", None) is not None and args.N < 1:
        parser.error("-N must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rcd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileProblem as exc:
        print(f"rcd: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except GradingError as exc:
        print(f"rcd: grading inconsistency: {exc}", file=sys.stderr)
        return EXIT_GRADING


if __name__ == "__main__":
    sys.exit(main())
