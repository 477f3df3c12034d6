"""Command-line interface.

Exit codes: 0 success, 1 invalid input, 2 no closed form for the variant,
3 oracle size limit exceeded, 4 verification failed.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import os
import re
import sys
from fractions import Fraction

from . import documents as docs
from . import solve
from .model import Domain, FixedLength, MixedStrategy, NoClosedFormError, Solution
from .oracle import (
    DEFAULT_GRID,
    OracleLimitError,
    discretize_continuous,
    oracle_solution,
    solve_matrix_game,
    verify_solution,
)
from .simulate import estimate_payoff

EXIT_OK, EXIT_INVALID, EXIT_UNSOLVED, EXIT_LIMIT, EXIT_FAILED = 0, 1, 2, 3, 4
UNSOLVED_MESSAGE = "no closed form; try `oracle`"
DEFAULT_ORACLE_GRID = Fraction(1, 100)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(EXIT_INVALID, f"cannot read {path}: {exc.strerror}") from None


def _load_spec(path: str):
    return docs.parse_spec(docs.loads(_read(path)))


def _rational_arg(text: str) -> Fraction:
    try:
        return docs.parse_number(text, "argument")
    except docs.DocumentError:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _solve_or_exit(spec) -> Solution:
    try:
        return solve(spec)
    except NoClosedFormError:
        raise CliError(EXIT_UNSOLVED, UNSOLVED_MESSAGE) from None


def _solution_for(args, spec) -> Solution:
    if getattr(args, "solution", None):
        return docs.parse_solution(docs.loads(_read(args.solution)))
    return _solve_or_exit(spec)


# ---------------------------------------------------------------------------

def cmd_solve(args, out) -> int:
    spec = _load_spec(args.spec)
    out.write(docs.dumps(docs.solution_document(spec, _solve_or_exit(spec))))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    spec = _load_spec(args.spec)
    solution = _solution_for(args, spec)
    report = verify_solution(spec, solution, tolerance=args.tolerance, grid=args.grid,
                             length_grid=args.length_grid)
    out.write(docs.dumps(docs.report_document(report)))
    return EXIT_OK if report.passed else EXIT_FAILED


def _ci_mode() -> bool:
    return os.environ.get("CI", "").strip().lower() not in ("", "0", "false", "no")


def cmd_simulate(args, out) -> int:
    if args.seed is None:
        if _ci_mode():
            raise CliError(EXIT_INVALID, "--seed is mandatory when CI is set")
        args.seed = 0
    if args.trials < 1:
        raise CliError(EXIT_INVALID, "--trials must be at least 1")
    spec = _load_spec(args.spec)
    solution = _solution_for(args, spec)
    result = estimate_payoff(spec, solution.hider, solution.searcher, args.trials, args.seed)
    out.write(docs.dumps(docs.simulation_document(result)))
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    spec = _load_spec(args.spec)
    if spec.domain is Domain.FINITE:
        solution = oracle_solution(spec)
        body = docs.solution_document(spec, solution)
        if args.matrix:
            from .oracle import build_payoff_matrix
            m = build_payoff_matrix(spec)
            body["matrix"] = _matrix_doc(m, [list(docs.from_mask(r)) for r in m.row_labels],
                                         [list(docs.from_mask(c)) for c in m.col_labels])
        out.write(docs.dumps(body))
        return EXIT_OK
    if not (isinstance(spec.hider, FixedLength) and isinstance(spec.searcher, FixedLength)):
        raise CliError(EXIT_INVALID, "the oracle needs both arc lengths fixed in continuous games")
    grid = args.grid if args.grid is not None else DEFAULT_ORACLE_GRID
    try:
        m = discretize_continuous(spec, grid)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None
    value, x, y = solve_matrix_game(m)
    hider = MixedStrategy(tuple((a, p) for a, p in zip(m.row_labels, x) if p > 0))
    searcher = MixedStrategy(tuple((a, p) for a, p in zip(m.col_labels, y) if p > 0))
    body = docs.solution_document(spec, Solution(hider, searcher, value, f"oracle-lp grid={grid}"))
    if args.matrix:
        body["matrix"] = _matrix_doc(m, [str(a.start) for a in m.row_labels],
                                     [str(a.start) for a in m.col_labels])
    out.write(docs.dumps(body))
    return EXIT_OK


def _matrix_doc(m, rows, cols) -> dict:
    return {"rows": rows, "cols": cols,
            "entries": [[str(v) for v in row] for row in m.entries.tolist()]}


# ---------------------------------------------------------------------------
# sweeps

_COST_PARAM = re.compile(r"^cost\[(\d+)\]$")


def _sweep_values(start: Fraction, stop: Fraction, steps: int) -> list[Fraction]:
    if steps < 1:
        raise CliError(EXIT_INVALID, "--steps must be at least 1")
    if steps == 1:
        return [start]
    return [start + (stop - start) * i / (steps - 1) for i in range(steps)]


def _set_param(template: dict, param: str, value: Fraction) -> dict:
    doc = copy.deepcopy(template)
    text = str(value)
    if param in ("alpha", "beta"):
        own, other = ("hider", "searcher") if param == "alpha" else ("searcher", "hider")
        fam = doc.get(own)
        if not isinstance(fam, dict) or fam.get("type") != "fixed_length":
            raise CliError(EXIT_INVALID, f"{param}: the {own} length is not fixed in the template")
        partner = doc.get(other)
        # equal-length games stay equal-length
        if (isinstance(partner, dict) and partner.get("type") == "fixed_length"
                and docs.parse_number(partner.get("value"), other) ==
                docs.parse_number(fam.get("value"), own)):
            partner["value"] = text
        fam["value"] = text
        return doc
    if param == "k":
        if value.denominator != 1:
            raise CliError(EXIT_INVALID, f"k must be an integer, got {value}")
        fams = [f for f in (doc.get("hider"), doc.get("searcher"))
                if isinstance(f, dict) and f.get("type") == "fixed_cardinality"]
        if not fams:
            raise CliError(EXIT_INVALID, "k: the template has no fixed_cardinality family")
        for f in fams:
            f["k"] = int(value)
        return doc
    if param == "cost" and not isinstance(doc.get("costs"), list):
        doc["costs"] = text
        return doc
    match = _COST_PARAM.match(param)
    if match and isinstance(doc.get("costs"), list):
        i = int(match.group(1))
        if not 1 <= i <= len(doc["costs"]):
            raise CliError(EXIT_INVALID, f"{param}: index outside 1..{len(doc['costs'])}")
        doc["costs"][i - 1] = text
        return doc
    raise CliError(EXIT_INVALID,
                   f"parameter {param!r} is not sweepable; use alpha, beta, k or cost[i]")


def _format_param(x: Fraction) -> str:
    d = x.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return str(x)
    text = f"{float(x):.15f}".rstrip("0").rstrip(".")
    return text if Fraction(text) == x else str(x)


def cmd_sweep(args, out) -> int:
    template = docs.loads(_read(args.spec))
    values = _sweep_values(args.start, args.stop, args.steps)
    docs.parse_spec(template)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["param", "value", "provenance"])
    for v in values:
        doc = _set_param(template, args.param, v)
        try:
            spec = docs.parse_spec(doc)
        except docs.DocumentError as exc:
            raise CliError(EXIT_INVALID, f"{args.param}={v}: {exc}") from None
        try:
            sol = solve(spec)
            writer.writerow([_format_param(v), repr(float(sol.value)), sol.provenance])
        except NoClosedFormError:
            writer.writerow([_format_param(v), "", "no closed form"])
        except ValueError as exc:
            raise CliError(EXIT_INVALID, f"{args.param}={v}: {exc}") from None
    out.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="alignment-games",
                                description="Solve, verify and simulate alignment games.")
    sub = p.add_subparsers(dest="command", required=True)

    def spec_arg(sp):
        sp.add_argument("spec", help="game specification JSON file, or - for stdin")

    sp = sub.add_parser("solve", help="closed-form solution")
    spec_arg(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="check a solution with the numeric oracle")
    spec_arg(sp)
    sp.add_argument("--solution", help="solution JSON to check instead of the closed form")
    sp.add_argument("--tolerance", type=_rational_arg, default=None,
                    help="allowed gap (default 0 for finite games, 1e-6 for continuous)")
    sp.add_argument("--grid", type=_rational_arg, default=DEFAULT_GRID,
                    help="arc-start grid step for continuous games (default 1/1000)")
    sp.add_argument("--length-grid", type=_rational_arg, default=None,
                    help="arc-length grid step for free-length players (default: --grid)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", help="Monte-Carlo estimate of the solved pair's payoff")
    spec_arg(sp)
    sp.add_argument("--trials", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=None, help="required when CI is set")
    sp.add_argument("--solution", help="solution JSON to simulate instead of the closed form")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="closed-form value over a parameter range (CSV)")
    spec_arg(sp)
    sp.add_argument("--param", required=True, help="alpha, beta, k or cost[i]")
    sp.add_argument("--from", dest="start", type=_rational_arg, required=True)
    sp.add_argument("--to", dest="stop", type=_rational_arg, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("oracle", help="solve by linear programming")
    spec_arg(sp)
    sp.add_argument("--grid", type=_rational_arg, default=None,
                    help="arc-start grid step for continuous games (default 1/100)")
    sp.add_argument("--matrix", action="store_true", help="include the payoff matrix")
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return args.func(args, out)
    except CliError as exc:
        code, message = exc.code, str(exc)
    except docs.DocumentError as exc:
        code, message = EXIT_INVALID, f"invalid input: {exc}"
    except OracleLimitError as exc:
        code, message = EXIT_LIMIT, str(exc)
    except NoClosedFormError:
        code, message = EXIT_UNSOLVED, UNSOLVED_MESSAGE
    except (ValueError, TypeError) as exc:
        code, message = EXIT_INVALID, f"invalid input: {exc}"
    print(f"error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
