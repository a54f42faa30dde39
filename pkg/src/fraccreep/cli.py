"""Command-line front end.

Subcommands::

    fraccreep mlf eval --alpha A --beta B --z Z [--tol TOL] [--json]
    fraccreep creep table --modulus E --viscosity ETA --alpha A --t-max T [--points N] [--out PATH]
    fraccreep solve PROBLEM [--step H] [--out PATH]
    fraccreep picard PROBLEM [--iterations M] [--step H] [--json]
    fraccreep check PROBLEM [--step H] [--json]
    fraccreep verify-dependence PROBLEM --history2 EXPR [--step H] [--json]
    fraccreep verify-ulam PROBLEM --epsilon EPS [--perturbation EXPR] [--step H] [--json]

Exit status: 0 on success, 1 on usage, parse or domain errors, 2 on
internal errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from collections.abc import Sequence

import numpy as np

from . import analysis, creep, mlf, solver
from .errors import FracCreepError
from .expressions import Expression, ExpressionError
from .problem_file import parse_problem
from .solver import format_number

__all__ = ["main"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with status 2
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _positive(name: str):
    def convert(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}") from None
        if not (math.isfinite(value) and value > 0):
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {text!r}")
        return value

    return convert


def _finite(name: str):
    def convert(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}") from None
        if not math.isfinite(value):
            raise argparse.ArgumentTypeError(f"{name} must be finite, got {text!r}")
        return value

    return convert


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# handlers


def _cmd_mlf_eval(args: argparse.Namespace) -> int:
    result = mlf.evaluate(mlf.MlArgs(args.alpha, args.beta, args.z, args.tol))
    if args.json:
        _emit_json(dataclasses.asdict(result))
    else:
        print(format_number(result.value))
    if not result.guaranteed:
        print(
            f"warning: accuracy {args.tol:g} not guaranteed (error bound {result.error_bound:.3g}, {result.method})",
            file=sys.stderr,
        )
    return 0


def _cmd_creep_table(args: argparse.Namespace) -> int:
    material = creep.Material(args.modulus, args.viscosity, args.alpha)
    t = np.linspace(0.0, args.t_max, args.points)
    k_alpha = creep.fractional_creep(material, t)
    k_classical = creep.classical_creep(material, t)
    lines = ["t,k_alpha,k_classical"]
    lines += [
        f"{format_number(a)},{format_number(b)},{format_number(c)}"
        for a, b, c in zip(t, k_alpha, k_classical)
    ]
    _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


def _report_notes(traj: solver.Trajectory) -> None:
    for note in traj.notes:
        print(f"warning: {note}", file=sys.stderr)


def _cmd_solve(args: argparse.Namespace) -> int:
    problem = parse_problem(args.problem)
    traj = solver.solve_delay(problem, args.step)
    _report_notes(traj)
    _write_or_print(traj.to_csv(), args.out)
    return 0


def _cmd_picard(args: argparse.Namespace) -> int:
    problem = parse_problem(args.problem)
    result = solver.picard_iterate(problem, args.iterations, args.step)
    report = analysis.contraction_check(problem, args.step)
    factor = report.contraction_lhs / report.contraction_rhs
    increments = result.increments()
    if args.json:
        _emit_json({"contraction_factor": factor, "increments": increments, "ratios": result.ratios})
        return 0
    print(f"theoretical contraction factor  {format_number(factor)}")
    print("m,increment,ratio")
    for m, inc in enumerate(increments):
        ratio = result.ratios[m - 1] if m >= 1 else float("nan")
        print(f"{m},{format_number(inc)},{'' if m == 0 else format_number(ratio)}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    report = analysis.contraction_check(parse_problem(args.problem), args.step)
    print(report.to_json() if args.json else report.to_text())
    return 0


def _expression_arg(text: str, flag: str) -> Expression:
    try:
        return Expression(text, "t")
    except ExpressionError as exc:
        raise FracCreepError(f"{flag}: {exc}") from None


def _cmd_verify_dependence(args: argparse.Namespace) -> int:
    problem = parse_problem(args.problem)
    psi2 = _expression_arg(args.history2, "--history2")
    if abs(float(psi2(0.0))) > 1e-12:
        raise FracCreepError("--history2: history must vanish at 0")
    rep = analysis.verify_dependence(problem, problem.history, psi2, args.step)
    payload = dataclasses.asdict(rep)
    if args.json:
        _emit_json(payload)
    else:
        for key, value in payload.items():
            print(f"{key:12s} {value if isinstance(value, bool) else format_number(value)}")
    return 0 if rep.passed else 1


def _cmd_verify_ulam(args: argparse.Namespace) -> int:
    problem = parse_problem(args.problem)
    pert = _expression_arg(args.perturbation, "--perturbation") if args.perturbation else (lambda t: args.epsilon + 0 * t)
    rep = analysis.verify_ulam(problem, args.epsilon, pert, args.step)
    payload = dataclasses.asdict(rep)
    if args.json:
        _emit_json(payload)
    else:
        for key, value in payload.items():
            print(f"{key:13s} {value if isinstance(value, bool) else format_number(value)}")
    return 0 if rep.passed and rep.defect_passed else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fraccreep", description="Fractional Voigt creep toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_mlf = sub.add_parser("mlf", help="Mittag-Leffler function")
    mlf_sub = p_mlf.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = mlf_sub.add_parser("eval", help="evaluate E_{alpha,beta}(z)")
    p.add_argument("--alpha", type=_positive("--alpha"), required=True)
    p.add_argument("--beta", type=_finite("--beta"), default=1.0)
    p.add_argument("--z", type=_finite("--z"), required=True)
    p.add_argument("--tol", type=_positive("--tol"), default=mlf.DEFAULT_TOL)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_mlf_eval)

    p_creep = sub.add_parser("creep", help="creep functions")
    creep_sub = p_creep.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = creep_sub.add_parser("table", help="CSV table t,k_alpha,k_classical")
    p.add_argument("--modulus", type=_positive("--modulus"), required=True)
    p.add_argument("--viscosity", type=_positive("--viscosity"), required=True)
    p.add_argument("--alpha", type=_positive("--alpha"), required=True)
    p.add_argument("--t-max", type=_positive("--t-max"), required=True)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_creep_table)

    def problem_parser(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("problem", help="problem file (JSON)")
        p.add_argument("--step", type=_positive("--step"), default=None)
        return p

    p = problem_parser("solve", "solve the delay problem, CSV t,x")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_solve)

    p = problem_parser("picard", "successive approximations and contraction ratios")
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_picard)

    p = problem_parser("check", "contraction condition, Ulam constant, dependence factor")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_check)

    p = problem_parser("verify-dependence", "empirical continuous-dependence check")
    p.add_argument("--history2", required=True, help="second history, expression in t")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_verify_dependence)

    p = problem_parser("verify-ulam", "empirical Ulam-Hyers check")
    p.add_argument("--epsilon", type=_positive("--epsilon"), required=True)
    p.add_argument("--perturbation", help="h(t) with |h| <= epsilon (default: constant epsilon)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_verify_ulam)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (FracCreepError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
