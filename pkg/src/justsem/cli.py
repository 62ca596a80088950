"""Command-line surface.

Exit codes: 0 ok, 1 parse error, 2 validation error, 3 budget exceeded,
4 property violation found.  Diagnostics go to stderr; all stdout output is
deterministic for identical inputs.
"""

from __future__ import annotations

import argparse
import sys

from .core import (
    BudgetExceededError,
    Interpretation,
    Literal,
    TruthValue,
    fact_text,
    parse_fact,
)
from .branches import BUILTINS, Bounds, falsify_monotonicity, falsify_selectivity
from .frame import FrameError, format_frame
from .game import build_game_graph, game_dot
from .justif import justification_dot
from .lp import (
    LpSyntaxError,
    LpValidationError,
    Program,
    fitting_lfp,
    parse_program,
    program_to_frame,
    stable_models_total,
    supported_models,
    well_founded_model,
)
from .semantics import (
    JustificationSystem,
    check_consistency,
    enumerate_models,
    explain,
    format_consistency_report,
    format_models,
    supported_value_graph,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_VIOLATION = 4


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _CliError(EXIT_VALIDATION, f"cannot read {path}: {exc}") from exc


def _load_program(path: str) -> Program:
    try:
        return parse_program(_read(path))
    except LpSyntaxError as exc:
        raise _CliError(EXIT_PARSE, f"{path}:{exc}") from exc


def _system(program: Program, semantics: str) -> JustificationSystem:
    if semantics not in BUILTINS:
        raise _CliError(
            EXIT_VALIDATION,
            f"unknown semantics {semantics!r}; pick one of {','.join(sorted(BUILTINS))}",
        )
    try:
        frame = program_to_frame(program)
    except FrameError as exc:
        raise _CliError(EXIT_VALIDATION, str(exc)) from exc
    return JustificationSystem.from_frame(frame, BUILTINS[semantics])


def _parse_assignments(text: str) -> dict[str, TruthValue]:
    out = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, sep, letter = chunk.partition("=")
        if not sep:
            raise _CliError(EXIT_VALIDATION, f"bad assignment {chunk!r}; use name=t|f|u")
        try:
            out[name.strip()] = TruthValue.from_letter(letter.strip())
        except ValueError as exc:
            raise _CliError(EXIT_VALIDATION, str(exc)) from exc
    return out


def _interpretation_from_args(js: JustificationSystem, args) -> Interpretation:
    values: dict[str, TruthValue] = {}
    if getattr(args, "interpretation", None):
        for lineno, line in enumerate(_read(args.interpretation).splitlines(), 1):
            line = line.split("%", 1)[0].strip()
            if not line:
                continue
            name, sep, letter = line.partition("=")
            if not sep:
                raise _CliError(
                    EXIT_VALIDATION,
                    f"{args.interpretation}:{lineno}: expected name=t|f|u",
                )
            values[name.strip()] = TruthValue.from_letter(letter.strip())
    if getattr(args, "open", None):
        values.update(_parse_assignments(args.open))
    names = sorted(js.frame.names())
    unknown = [n for n in values if n not in names]
    if unknown:
        raise _CliError(EXIT_VALIDATION, f"unknown atom names: {', '.join(unknown)}")
    missing = [n for n in names if n not in values]
    if missing:
        print(
            "warning: defaulting to u for " + ", ".join(missing),
            file=sys.stderr,
        )
    return Interpretation({n: values.get(n, TruthValue.UNKNOWN) for n in names})


def _cmd_parse(args) -> int:
    program = _load_program(args.file)
    sys.stdout.write(program.text())
    return EXIT_OK


def _cmd_frame(args) -> int:
    program = _load_program(args.file)
    try:
        frame = program_to_frame(program)
    except FrameError as exc:
        raise _CliError(EXIT_VALIDATION, str(exc)) from exc
    sys.stdout.write(format_frame(frame))
    return EXIT_OK


def _cmd_game(args) -> int:
    program = _load_program(args.file)
    try:
        frame = program_to_frame(program)
    except FrameError as exc:
        raise _CliError(EXIT_VALIDATION, str(exc)) from exc
    game = build_game_graph(frame)
    sys.stdout.write(game_dot(game))
    if args.render:
        from .render import render_game

        render_game(game, args.render)
        print(f"rendered game graph to {args.render}", file=sys.stderr)
    return EXIT_OK


def _cmd_models(args) -> int:
    program = _load_program(args.file)
    js = _system(program, args.semantics)
    models = enumerate_models(js, budget=args.budget)
    if args.open:
        pinned = _parse_assignments(args.open)
        names = js.frame.names()
        for n in pinned:
            if n not in names:
                raise _CliError(EXIT_VALIDATION, f"unknown atom name {n!r}")
        models = [
            m
            for m in models
            if all(m.value(Literal(n)) == v for n, v in pinned.items())
        ]
    sys.stdout.write(format_models(js, models))
    return EXIT_OK


def _cmd_explain(args) -> int:
    program = _load_program(args.file)
    js = _system(program, args.semantics)
    try:
        fact = parse_fact(args.fact)
    except ValueError as exc:
        raise _CliError(EXIT_VALIDATION, str(exc)) from exc
    if fact not in js.frame.defined:
        raise _CliError(EXIT_VALIDATION, f"{args.fact} is not a defined fact")
    interp = _interpretation_from_args(js, args)
    result = explain(js, fact, interp)
    sys.stdout.write(f"fact {fact_text(fact)}\n")
    sys.stdout.write(f"value {result.value.letter}\n")
    sys.stdout.write(justification_dot(result.justification, root=fact))
    if args.render:
        from .render import render_justification

        render_justification(result.justification, fact, args.render)
        print(f"rendered justification to {args.render}", file=sys.stderr)
    return EXIT_OK


def _cmd_check_consistency(args) -> int:
    program = _load_program(args.file)
    js = _system(program, args.semantics)
    if args.all_interpretations:
        report = check_consistency(js, budget=args.budget)
    else:
        report = check_consistency(js, [_interpretation_from_args(js, args)])
    sys.stdout.write(format_consistency_report(report))
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _cmd_falsify(args) -> int:
    program = _load_program(args.file)
    js = _system(program, args.semantics)
    bounds = Bounds()
    if args.bounds:
        fields = {
            "prefix": "prefix_len",
            "cycle": "cycle_len",
            "loop": "loop_len",
            "set": "set_size",
            "k": "k_size",
            "interleave": "interleave",
        }
        updates = {}
        for chunk in args.bounds.split(","):
            key, sep, value = chunk.partition("=")
            if not sep or key.strip() not in fields:
                raise _CliError(
                    EXIT_VALIDATION,
                    f"bad bounds entry {chunk!r}; "
                    f"use {','.join(sorted(fields))} with integer values",
                )
            updates[fields[key.strip()]] = int(value)
        bounds = Bounds(**{**bounds.__dict__, **updates})
    if args.property == "monotone":
        result = falsify_monotonicity(js.frame, js.evaluation, js.sign, bounds)
        if result.counterexample is None:
            print(
                f"no monotonicity counterexample within bounds "
                f"(transitive on sample: {str(result.transitive_on_sample).lower()})"
            )
            return EXIT_OK
        sys.stdout.write(result.counterexample.render() + "\n")
        return EXIT_VIOLATION
    result = falsify_selectivity(js.frame, js.evaluation, js.sign, bounds)
    if result.counterexample is None:
        print("no selectivity counterexample within bounds")
        return EXIT_OK
    sys.stdout.write(result.counterexample.render() + "\n")
    return EXIT_VIOLATION


def _cmd_oracle_compare(args) -> int:
    from .core import all_interpretations

    program = _load_program(args.file)
    if args.semantics == "ex":
        raise _CliError(EXIT_VALIDATION, "no classical oracle exists for 'ex'")
    js = _system(program, args.semantics)
    try:
        models = enumerate_models(js, budget=args.budget)
    except BudgetExceededError as exc:
        raise _CliError(EXIT_BUDGET, str(exc)) from exc
    open_names = sorted(program.open_names())
    mismatches: list[str] = []
    compared = len(models)
    if args.semantics == "sp":
        expected = set()
        for interp in all_interpretations(open_names):
            opens = {n: interp.value(Literal(n)) for n in open_names}
            expected |= supported_models(program, opens, budget=args.budget)
        if set(models) != expected:
            mismatches.append(
                f"supported-model sets differ: engine {len(models)}, oracle {len(expected)}"
            )
    elif args.semantics == "st":
        totals = {m for m in models if m.is_total()}
        compared = len(totals)
        expected = set()
        for interp in all_interpretations(open_names):
            opens = {n: interp.value(Literal(n)) for n in open_names}
            if any(v is TruthValue.UNKNOWN for v in opens.values()):
                continue
            expected |= stable_models_total(program, opens, budget=args.budget)
        if totals != expected:
            mismatches.append(
                f"total model sets differ: engine {len(totals)}, oracle {len(expected)}"
            )
    elif args.semantics == "wf":
        model_set = set(models)
        for interp in all_interpretations(open_names):
            opens = {n: interp.value(Literal(n)) for n in open_names}
            wf = well_founded_model(program, opens)
            if wf not in model_set:
                mismatches.append(f"well-founded model missing for opens {opens}")
    elif args.semantics == "kk":
        model_set = set(models)
        for interp in all_interpretations(open_names):
            opens = {n: interp.value(Literal(n)) for n in open_names}
            kk = fitting_lfp(program, opens)
            if kk not in model_set:
                mismatches.append(f"least fixpoint missing for opens {opens}")
    if mismatches:
        for m in mismatches:
            print(m, file=sys.stderr)
        print(f"{compared} models, oracle mismatch")
        return EXIT_VIOLATION
    print(f"{compared} models, oracle match")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="justsem",
        description="Rule-system semantics via justifications and graph games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, semantics=True):
        p.add_argument("file", help="ground program file")
        if semantics:
            p.add_argument(
                "--semantics",
                required=True,
                choices=sorted(BUILTINS),
                help="branch evaluation",
            )
        p.add_argument(
            "--budget",
            type=int,
            default=1_000_000,
            help="cap on enumeration sizes",
        )

    p = sub.add_parser("parse", help="echo the normalized program")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_parse)

    p = sub.add_parser("frame", help="dump the complementation frame")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_frame)

    p = sub.add_parser("game", help="export the game graph")
    p.add_argument("file")
    p.add_argument("--format", choices=["graph"], default="graph")
    p.add_argument("--render", metavar="IMAGE", help="also draw the graph to a file")
    p.set_defaults(fn=_cmd_game)

    p = sub.add_parser("models", help="enumerate models")
    add_common(p)
    p.add_argument("--open", metavar="NAME=VAL,...", help="pin open atom values")
    p.set_defaults(fn=_cmd_models)

    p = sub.add_parser("explain", help="best justification for a fact")
    p.add_argument("file")
    p.add_argument("fact", help="fact text, e.g. a or ~a")
    p.add_argument("--semantics", required=True, choices=sorted(BUILTINS))
    p.add_argument("--budget", type=int, default=1_000_000)
    p.add_argument("--interpretation", metavar="FILE", help="name=value lines")
    p.add_argument("--open", metavar="NAME=VAL,...")
    p.add_argument("--render", metavar="IMAGE")
    p.set_defaults(fn=_cmd_explain)

    p = sub.add_parser("check-consistency", help="supported values vs complements")
    add_common(p)
    p.add_argument("--all-interpretations", action="store_true")
    p.add_argument("--interpretation", metavar="FILE")
    p.add_argument("--open", metavar="NAME=VAL,...")
    p.set_defaults(fn=_cmd_check_consistency)

    p = sub.add_parser("falsify", help="bounded search for property violations")
    add_common(p)
    p.add_argument("--property", required=True, choices=["monotone", "selective"])
    p.add_argument("--bounds", metavar="KEY=N,...", help="prefix,cycle,loop,set,k,interleave")
    p.set_defaults(fn=_cmd_falsify)

    p = sub.add_parser("oracle-compare", help="cross-check against classical oracles")
    add_common(p)
    p.set_defaults(fn=_cmd_oracle_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _CliError as exc:
        print(exc.message, file=sys.stderr)
        return exc.code
    except LpSyntaxError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE
    except (LpValidationError, FrameError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetExceededError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
