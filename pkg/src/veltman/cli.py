"""Command-line entry point.

Exit codes: 0 when the queried property holds (formula true, frame valid,
proof accepted, no countermodel found), 1 when it fails, 2 on usage, parse or
resource errors.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import arith
from .calculus import check_proof, load_proof
from .closure import CycleError, RuleSet, close, load_sketch, mid_witnesses, query_frame
from .errors import VeltmanError
from .formula import parse, render
from .frameclass import DEFAULT_CAP, FrameClass, check_condition, correspondence_sweep, frames_upto, enumerate_frames
from .semantics import Frame, Model, dumps, forces, frame_valid, load_file, to_dot, validate

OK, FAIL, ERROR = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageExit(f"{self.prog}: error: {message}")


class _UsageExit(Exception):
    pass


def _frame_of(structure) -> Frame:
    return structure.frame if isinstance(structure, Model) else structure


def _load_frame(path) -> Frame:
    return _frame_of(load_file(path))


def _valuation_text(val) -> str:
    return ", ".join(f"{p}={{{','.join(sorted(ws))}}}" for p, ws in sorted(val.items()))


def cmd_parse(args, out):
    out.write(render(parse(args.formula)) + "\n")
    return OK


def cmd_validate(args, out):
    structure = load_file(args.file)
    bad = validate(structure)
    if not bad:
        out.write(f"ok: valid Veltman {'model' if isinstance(structure, Model) else 'frame'}\n")
        return OK
    for v in bad:
        out.write(f"violation {v}\n")
    return FAIL


def cmd_eval(args, out):
    structure = load_file(args.model)
    if not isinstance(structure, Model):
        structure = Model(structure, {})
    value = forces(structure, args.world, parse(args.formula))
    out.write(("true" if value else "false") + "\n")
    return OK if value else FAIL


def cmd_valid(args, out):
    fr = _load_frame(args.frame)
    ok, ce = frame_valid(fr, parse(args.formula))
    if ok:
        out.write("valid\n")
        return OK
    out.write(f"not valid: fails at world {ce.world} under {_valuation_text(ce.valuation)}\n")
    return FAIL


def cmd_class(args, out):
    fr = _load_frame(args.frame)
    c = FrameClass.lookup(args.cls)
    v = check_condition(fr, c)
    if v.holds:
        out.write(f"{c.value}: holds\n")
        return OK
    out.write(f"{c.value}: fails, witness {' '.join(v.witness)}\n")
    return FAIL


def cmd_enumerate(args, out):
    flt = FrameClass.lookup(args.filter) if args.filter else None
    frames = enumerate_frames(args.n, flt, cap=args.cap)
    if args.count_only:
        out.write(f"{sum(1 for _ in frames)}\n")
        return OK
    for i, fr in enumerate(frames):
        out.write(f"# frame {i}\n")
        out.write(dumps(fr))
        out.write("\n")
    return OK


def cmd_sweep(args, out):
    c = FrameClass.lookup(args.cls)
    report = correspondence_sweep(args.n, c, args.direction, cap=args.cap)
    out.write(report.format_lines() if args.lines else report.format_table())
    return OK if report.passed else FAIL


def cmd_search(args, out):
    f = parse(args.formula)
    flt = FrameClass.lookup(args.cls) if args.cls else None
    for size, index, fr in frames_upto(args.max_worlds, flt, cap=args.cap):
        ok, ce = frame_valid(fr, f)
        if ok:
            continue
        model = ce.model(fr)
        if forces(model, ce.world, f):  # pragma: no cover - would be an internal error
            raise RuntimeError("countermodel failed re-verification")
        out.write(
            f"countermodel: frame {index} on {size} world(s), "
            f"{render(f)} fails at world {ce.world}\n"
        )
        out.write(dumps(model))
        return FAIL
    scope = f" in class {flt.value}" if flt else ""
    out.write(
        f"none found within {args.max_worlds} world(s){scope} "
        "(bounded search, not a validity proof)\n"
    )
    return OK


def cmd_prove(args, out):
    verdict = check_proof(load_proof(args.file))
    out.write(f"{verdict}\n")
    return OK if verdict else FAIL


def cmd_close(args, out):
    sk = load_sketch(args.file)
    rules = RuleSet.parse(args.rules)
    try:
        fr = close(sk, rules)
    except CycleError as exc:
        out.write(f"not completable: {exc}\n")
        return FAIL
    if args.query:
        value = query_frame(fr, args.query)
        line = "true" if value else "false"
        tok = args.query.split()
        if value and tok[0] == "exists-mid":
            line += f" (via {', '.join(mid_witnesses(fr, tok[1], tok[2]))})"
        out.write(line + "\n")
        return OK if value else FAIL
    out.write(to_dot(fr, name=f"closure-{rules}") if args.dot else dumps(fr))
    return OK


def cmd_export(args, out):
    if not args.dot:
        raise _UsageExit("export: only --dot output is supported")
    out.write(to_dot(load_file(args.file)))
    return OK


def cmd_gn(args, out):
    out.write(f"{arith.gn(arith.Alphabet(tuple(args.alphabet)), args.string)}\n")
    return OK


def cmd_ungn(args, out):
    out.write(f"{arith.ungn(arith.Alphabet(tuple(args.alphabet)), args.k)}\n")
    return OK


def cmd_numeral(args, out):
    t = arith.numeral(args.n)
    out.write(arith.render_term(t) + "\n")
    return OK


def cmd_omega1(args, out):
    out.write(f"{arith.omega1(args.x)}\n")
    return OK


def cmd_growth(args, out):
    report = arith.growth_report(args.n_max)
    out.write(report.format_table())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    return OK if report.ok else FAIL


def _nat(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="veltman",
        description="Interpretability logic toolkit: Veltman models, frame classes, proofs, sketches.",
        epilog="Exit status: 0 property holds, 1 property fails, 2 usage/parse/resource error.",
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("parse", cmd_parse, "Print the canonical rendering of a formula.")
    sp.add_argument("formula")

    sp = add("validate", cmd_validate, "Check the Veltman laws; exit 1 if any is violated.")
    sp.add_argument("file")

    sp = add("eval", cmd_eval, "Evaluate a formula at a world of a model; exit 1 when false.")
    sp.add_argument("model")
    sp.add_argument("world")
    sp.add_argument("formula")

    sp = add("valid", cmd_valid, "Frame validity over all valuations; exit 1 with a witness when not valid.")
    sp.add_argument("frame")
    sp.add_argument("formula")

    sp = add("class", cmd_class, "Check a frame condition; exit 1 with a witness when it fails.")
    sp.add_argument("frame")
    sp.add_argument("cls", metavar="CLASS")

    sp = add("enumerate", cmd_enumerate, "Print (or count) all labelled Veltman frames on n worlds.")
    sp.add_argument("n", type=_nat)
    sp.add_argument("--filter", metavar="CLASS")
    sp.add_argument("--count-only", action="store_true")
    sp.add_argument("--cap", type=_nat, default=DEFAULT_CAP, help=argparse.SUPPRESS)

    sp = add("sweep", cmd_sweep, "Compare a frame condition with validity of its schema; exit 1 on disagreement.")
    sp.add_argument("n", type=_nat)
    sp.add_argument("cls", metavar="CLASS")
    sp.add_argument("--direction", choices=("both", "sound"), default="both")
    sp.add_argument("--lines", action="store_true", help="one machine-readable line per frame")
    sp.add_argument("--cap", type=_nat, default=DEFAULT_CAP, help=argparse.SUPPRESS)

    sp = add("search", cmd_search,
             "Look for a model falsifying a formula; exit 1 when one is found (the formula is not valid), "
             "0 when none exists within the bound.")
    sp.add_argument("formula")
    sp.add_argument("--max-worlds", type=_nat, default=3)
    sp.add_argument("--class", dest="cls", metavar="CLASS")
    sp.add_argument("--cap", type=_nat, default=DEFAULT_CAP, help=argparse.SUPPRESS)

    sp = add("prove", cmd_prove, "Check a proof file; exit 1 when rejected.")
    sp.add_argument("file")

    sp = add("close", cmd_close,
             "Close a sketch under the Veltman laws plus optional M/P rules; with --query exit 1 when the "
             "query is false; exit 1 when the closure has an R-cycle.")
    sp.add_argument("file")
    sp.add_argument("--rules", default="none", choices=("none", "m", "p", "mp"))
    sp.add_argument("--query")
    sp.add_argument("--dot", action="store_true")

    sp = add("export", cmd_export, "Render a frame or model file as Graphviz DOT.")
    sp.add_argument("file")
    sp.add_argument("--dot", action="store_true", required=True)

    sp = add("gn", cmd_gn, "Gödelnumber of a string; the alphabet is given as its symbols in order.")
    sp.add_argument("alphabet")
    sp.add_argument("string")

    sp = add("ungn", cmd_ungn, "The string with a given gödelnumber.")
    sp.add_argument("alphabet")
    sp.add_argument("k", type=_nat)

    sp = add("numeral", cmd_numeral, "Binary numeral term of n.")
    sp.add_argument("n", type=_nat)

    sp = add("omega1", cmd_omega1, "2^(floor(log2 x)^2).")
    sp.add_argument("x", type=_nat)

    sp = add("growth", cmd_growth, "Numeral length and code size report; exit 1 if the growth checks fail.")
    sp.add_argument("n_max", type=_nat)
    sp.add_argument("--csv", metavar="FILE")
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except _UsageExit as exc:
        err.write(f"{exc}\n")
        return ERROR
    except (VeltmanError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return ERROR
    except SystemExit as exc:  # --help
        return OK if exc.code in (0, None) else ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
