"""Command-line interface.

Exit codes: 0 success, 1 input or usage error, 2 check failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .adjoint import adjoint_structure
from .conformance import (
    CHECK_TOL,
    GenParams,
    paper_example,
    random_finite_potent,
    run_conformance,
)
from .errors import FinpotError
from .operators import compact_terms
from .potency import ast_decompose
from .reduction import RANK_TOL
from .serialization import load_operator, operator_to_obj, save_operator
from .spectral import DET_CONVENTION_NOTE, spectrum, trace_det_report

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    # usage problems are input errors: exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self._fail(message))

    def _fail(self, message: str) -> int:
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return 1


def _fmt_c(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.10g} {sign} {abs(z.imag):.10g}i"


def _build_parser() -> _Parser:
    parser = _Parser(prog="finpot",
                     description="analysis of structured finite potent operators")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=CHECK_TOL,
                        help="check tolerance (default %(default)g)")
    common.add_argument("--json", action="store_true", help="emit JSON reports")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common],
                       help="index, dimensions, spectrum, traces, determinants")
    p.add_argument("file")

    p = sub.add_parser("adjoint", parents=[common], help="write the adjoint operator")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("trace", parents=[common], help="trace report")
    p.add_argument("file")

    p = sub.add_parser("det", parents=[common], help="determinant report")
    p.add_argument("file")

    p = sub.add_parser("verify", parents=[common],
                       help="run the conformance suite on a file or random operators")
    p.add_argument("file", nargs="?")
    p.add_argument("--random", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=20)

    p = sub.add_parser("example", parents=[common], help="built-in worked example")
    p.add_argument("--check", action="store_true",
                   help="run the conformance suite on the example")
    p.add_argument("-o", "--output", help="write the example operator file")
    return parser


def _analysis_obj(op, tol: float) -> dict:
    ast = ast_decompose(op, RANK_TOL)
    spec = spectrum(op, RANK_TOL, ast=ast)
    report = trace_det_report(op, RANK_TOL, ast=ast)
    m, p = ast.annihilator
    return {
        "ambient": "infinite" if op.ambient is None else op.ambient,
        "cutoff": op.cutoff,
        "rank_one_terms": len(op.terms),
        "norm_bound": op.norm_bound(),
        "index": ast.index,
        "active_dim": ast.active.dim,
        "dim_w": ast.dim_w,
        "annihilator": {
            "nilpotent_power": m,
            "invertible_factor": [[c.real, c.imag] for c in p],
        },
        "crt_condition": ast.crt_condition,
        "spectrum": {
            "contains_zero": spec.contains_zero,
            "eigenvalues": [
                {"value": [q.value.real, q.value.imag],
                 "multiplicity": q.multiplicity,
                 "residual": q.residual}
                for q in spec.eigenpairs
            ],
        },
        "traces": report.to_json_obj(),
        "notes": [DET_CONVENTION_NOTE],
    }


def _print_analysis(obj: dict) -> None:
    print(f"ambient:        {obj['ambient']}")
    print(f"cutoff:         {obj['cutoff']}  (rank-one terms: {obj['rank_one_terms']})")
    print(f"norm bound:     {obj['norm_bound']:.6g}")
    print(f"index:          {obj['index']}")
    print(f"core dimension: {obj['dim_w']}  (active subspace: {obj['active_dim']})")
    m = obj["annihilator"]["nilpotent_power"]
    deg = len(obj["annihilator"]["invertible_factor"]) - 1
    print(f"annihilator:    x^{m} * p(x), deg p = {deg}")
    print("spectrum:")
    if obj["spectrum"]["contains_zero"]:
        print("  0 (spectral point)")
    for entry in obj["spectrum"]["eigenvalues"]:
        z = complex(entry["value"][0], entry["value"][1])
        print(f"  {_fmt_c(z)}   multiplicity {entry['multiplicity']}")
    tr = obj["traces"]
    print("traces:")
    for key in ("tate", "leray", "riesz", "diagonal"):
        print(f"  {key:<10} {_fmt_c(complex(*tr[key]))}")
    print("det(Id + f):")
    for key in ("det_restriction", "det_product", "det_exterior", "det_dense"):
        print(f"  {key:<16} {_fmt_c(complex(*tr[key]))}")
    print(f"max discrepancy: {tr['max_discrepancy']:.3e}")
    for note in obj["notes"]:
        print(f"note: {note}")


def _print_conformance(report) -> None:
    print(f"operator {report.fingerprint}  (tolerance {report.tol:g})")
    for c in report.checks:
        status = "pass" if c.passed else "FAIL"
        residual = "-" if not np.isfinite(c.residual) else f"{c.residual:.3e}"
        print(f"  {c.name}  {status}  residual {residual:<12}  {c.description}")
        if not c.passed and "error" in c.details:
            print(f"        {c.details['error']}")


def _cmd_analyze(args) -> int:
    op = load_operator(args.file)
    obj = _analysis_obj(op, args.tol)
    if args.json:
        print(json.dumps(obj, indent=1))
    else:
        _print_analysis(obj)
    return 0


def _cmd_adjoint(args) -> int:
    op = load_operator(args.file)
    save_operator(compact_terms(op.adjoint()), args.output)
    if args.json:
        print(json.dumps({"written": args.output}))
    else:
        print(f"adjoint written to {args.output}")
    return 0


def _cmd_trace(args) -> int:
    op = load_operator(args.file)
    report = trace_det_report(op, RANK_TOL)
    if args.json:
        print(json.dumps(report.to_json_obj(), indent=1))
    else:
        for key, value in (("tate", report.tate), ("leray", report.leray),
                           ("riesz", report.riesz), ("diagonal", report.diagonal)):
            print(f"{key:<10} {_fmt_c(value)}")
        print(f"max discrepancy: {report.max_discrepancy:.3e}")
    return 0


def _cmd_det(args) -> int:
    op = load_operator(args.file)
    report = trace_det_report(op, RANK_TOL)
    if args.json:
        print(json.dumps(report.to_json_obj(), indent=1))
    else:
        for key, value in (("restriction", report.det_restriction),
                           ("product", report.det_product),
                           ("exterior", report.det_exterior),
                           ("dense oracle", report.det_dense)):
            print(f"{key:<14} {_fmt_c(value)}")
        print(f"max discrepancy: {report.max_discrepancy:.3e}")
        print(f"note: {DET_CONVENTION_NOTE}")
    return 0


def _cmd_verify(args) -> int:
    if args.random:
        reports = []
        for k in range(args.cases):
            op = random_finite_potent(GenParams(seed=args.seed + k))
            reports.append(run_conformance(op, args.tol))
        failed = [r for r in reports if not r.passed]
        if args.json:
            print(json.dumps([r.to_json_obj() for r in reports], indent=1))
        else:
            for r in reports:
                if not r.passed:
                    _print_conformance(r)
            print(f"{len(reports) - len(failed)}/{len(reports)} operators passed")
        return 0 if not failed else 2
    if args.file is None:
        print("finpot verify: error: provide a file or --random", file=sys.stderr)
        return 1
    op = load_operator(args.file)
    report = run_conformance(op, args.tol)
    if args.json:
        print(json.dumps(report.to_json_obj(), indent=1))
    else:
        _print_conformance(report)
    return report.exit_code


def _cmd_example(args) -> int:
    op = paper_example()
    if args.output:
        save_operator(op, args.output)
        print(f"example written to {args.output}")
    if args.check:
        ast = ast_decompose(op)
        report = run_conformance(op, args.tol)
        if args.json:
            obj = report.to_json_obj()
            obj["index"] = ast.index
            obj["tate"] = _analysis_obj(op, args.tol)["traces"]["tate"]
            print(json.dumps(obj, indent=1))
        else:
            tr = trace_det_report(op, RANK_TOL, ast=ast)
            print(f"tr = {_fmt_c(tr.tate)}")
            print(f"index = {ast.index}")
            print(f"det(Id + f) = {_fmt_c(tr.det_restriction)}")
            _print_conformance(report)
        return report.exit_code
    if not args.output:
        print(json.dumps(operator_to_obj(op), indent=1))
    return 0


_COMMANDS = {
    "analyze": _cmd_analyze,
    "adjoint": _cmd_adjoint,
    "trace": _cmd_trace,
    "det": _cmd_det,
    "verify": _cmd_verify,
    "example": _cmd_example,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        # argparse exits 0 for --help; anything else is an input error
        return 0 if code == 0 else 1
    if getattr(args, "tol", 1.0) <= 0:
        print("finpot: error: --tol must be positive", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except FinpotError as exc:
        print(f"finpot: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"finpot: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
