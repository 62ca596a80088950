"""Ground normal logic programs: parsing, translation to frames, and
independent semantic oracles.

The oracles (Fitting least fixpoint, well-founded model, total stable models,
supported models) share no code with the justification engine; they exist to
cross-validate it.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .core import (
    BudgetExceededError,
    FALSE,
    TRUE,
    Fact,
    Interpretation,
    Literal,
    TruthValue,
    truth_glb,
    truth_lub,
)
from .frame import Frame, Rule, complementation, require_valid


class LpSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class LpValidationError(ValueError):
    pass


@dataclass(frozen=True)
class LpLiteral:
    name: str
    positive: bool = True

    def text(self) -> str:
        return self.name if self.positive else "not " + self.name


@dataclass(frozen=True)
class LpRule:
    head: str
    body: tuple[LpLiteral, ...]

    def text(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- " + ", ".join(lit.text() for lit in self.body) + "."


@dataclass(frozen=True)
class Program:
    rules: tuple[LpRule, ...]
    open_decls: frozenset[str]
    defined_decls: frozenset[str]

    def head_names(self) -> frozenset[str]:
        return frozenset(r.head for r in self.rules)

    def defined_names(self) -> frozenset[str]:
        return self.head_names() | self.defined_decls

    def open_names(self) -> frozenset[str]:
        body = {lit.name for r in self.rules for lit in r.body}
        return (self.open_decls | body) - self.defined_names()

    def atom_names(self) -> frozenset[str]:
        return self.defined_names() | self.open_names()

    def rules_for(self, name: str) -> list[LpRule]:
        return [r for r in self.rules if r.head == name]

    def text(self) -> str:
        lines = [f"#open {n}." for n in sorted(self.open_decls)]
        lines += [f"#defined {n}." for n in sorted(self.defined_decls)]
        lines += [r.text() for r in self.rules]
        return "\n".join(lines) + "\n"


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<arrow>:-)
      | (?P<dot>\.)
      | (?P<comma>,)
      | (?P<directive>\#(open|defined))
      | (?P<name>[a-z][A-Za-z0-9_]*)
      | (?P<bad>.)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    line: int
    column: int


def _tokenize(text: str) -> Iterator[_Token]:
    line = 1
    line_start = 0
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        value = m.group()
        column = m.start() - line_start + 1
        if kind in ("ws", "comment"):
            line += value.count("\n")
            if "\n" in value:
                line_start = m.start() + value.rfind("\n") + 1
            continue
        if kind == "bad":
            raise LpSyntaxError(f"unexpected character {value!r}", line, column)
        yield _Token(kind, value, line, column)
    yield _Token("eof", "", line, len(text) - line_start + 1)


def parse_program(text: str) -> Program:
    """Parse `atom :- lit, ..., lit.` rules with `not atom` body literals,
    `atom.` facts, and `#open` / `#defined` directives."""
    tokens = list(_tokenize(text))
    pos = 0

    def peek() -> _Token:
        return tokens[pos]

    def take(kind: str, what: str) -> _Token:
        nonlocal pos
        tok = tokens[pos]
        if tok.kind != kind:
            raise LpSyntaxError(f"expected {what}", tok.line, tok.column)
        pos += 1
        return tok

    rules: list[LpRule] = []
    open_decls: dict[str, _Token] = {}
    defined_decls: dict[str, _Token] = {}

    def parse_literal() -> LpLiteral:
        nonlocal pos
        tok = take("name", "an atom or 'not'")
        if tok.value == "not":
            atom = peek()
            if atom.kind != "name" or atom.value == "not":
                raise LpSyntaxError("expected an atom after 'not'", atom.line, atom.column)
            pos += 1
            return LpLiteral(atom.value, positive=False)
        return LpLiteral(tok.value)

    while peek().kind != "eof":
        tok = peek()
        if tok.kind == "directive":
            pos += 1
            name_tok = take("name", "an atom name")
            decls = open_decls if tok.value == "#open" else defined_decls
            if name_tok.value in decls:
                raise LpSyntaxError(
                    f"duplicate {tok.value} declaration for {name_tok.value!r}",
                    name_tok.line,
                    name_tok.column,
                )
            decls[name_tok.value] = name_tok
            take("dot", "'.'")
            continue
        head = take("name", "a rule head")
        if head.value == "not":
            raise LpSyntaxError("'not' cannot head a rule", head.line, head.column)
        if peek().kind == "dot":
            pos += 1
            rules.append(LpRule(head.value, ()))
            continue
        take("arrow", "':-' or '.'")
        body = [parse_literal()]
        while peek().kind == "comma":
            pos += 1
            body.append(parse_literal())
        take("dot", "'.'")
        rules.append(LpRule(head.value, tuple(body)))

    program = Program(
        tuple(rules), frozenset(open_decls), frozenset(defined_decls)
    )
    heads = program.head_names()
    for name, tok in open_decls.items():
        if name in heads:
            raise LpSyntaxError(
                f"{name!r} is declared open but heads a rule", tok.line, tok.column
            )
        if name in defined_decls:
            raise LpSyntaxError(
                f"{name!r} is declared both open and defined", tok.line, tok.column
            )
    return program


def program_to_frame(program: Program) -> Frame:
    """Translate to a frame and apply complementation.

    Facts `a.` become `a <- #t`; defined atoms with no rules get `a <- #f`
    (frames forbid empty bodies and rule-less defined facts).
    """
    defined: set[Fact] = set()
    for name in program.defined_names():
        defined.add(Literal(name, True))
        defined.add(Literal(name, False))
    rules = []
    for name in sorted(program.defined_names()):
        lp_rules = program.rules_for(name)
        if not lp_rules:
            rules.append(Rule(Literal(name), frozenset([FALSE])))
            continue
        for r in lp_rules:
            if not r.body:
                rules.append(Rule(Literal(name), frozenset([TRUE])))
            else:
                rules.append(
                    Rule(
                        Literal(name),
                        frozenset(Literal(lit.name, lit.positive) for lit in r.body),
                    )
                )
    return require_valid(complementation(Frame(defined, rules)))


# --- oracles -------------------------------------------------------------------


OpenAssignment = dict[str, TruthValue]


def _check_opens(program: Program, opens: OpenAssignment) -> None:
    expected = program.open_names()
    if frozenset(opens) != expected:
        raise LpValidationError(
            f"open assignment must cover exactly {sorted(expected)}, got {sorted(opens)}"
        )


def _literal_value(lit: LpLiteral, values: dict[str, TruthValue]) -> TruthValue:
    v = values[lit.name]
    return v if lit.positive else v.complement()


def _consequence(program: Program, values: dict[str, TruthValue]) -> dict[str, TruthValue]:
    """One step of the three-valued immediate-consequence operator over the
    defined atoms; open atoms keep their pinned values."""
    out = dict(values)
    for name in program.defined_names():
        out[name] = truth_lub(
            truth_glb(_literal_value(lit, values) for lit in r.body)
            for r in program.rules_for(name)
        )
    return out


def fitting_lfp(program: Program, opens: OpenAssignment) -> Interpretation:
    """Least fixpoint (knowledge order) of the three-valued
    immediate-consequence operator, starting from all-unknown."""
    _check_opens(program, opens)
    values = {n: TruthValue.UNKNOWN for n in program.defined_names()}
    values.update(opens)
    while True:
        nxt = _consequence(program, values)
        if nxt == values:
            return Interpretation(values)
        values = nxt


def supported_models(
    program: Program, opens: OpenAssignment, budget: int = 1_000_000
) -> set[Interpretation]:
    """All three-valued fixpoints of the immediate-consequence operator."""
    _check_opens(program, opens)
    defined = sorted(program.defined_names())
    if 3 ** len(defined) > budget:
        raise BudgetExceededError(f"3^{len(defined)} assignments exceed the budget")
    out = set()
    levels = (TruthValue.FALSE, TruthValue.UNKNOWN, TruthValue.TRUE)
    for combo in itertools.product(levels, repeat=len(defined)):
        values = dict(zip(defined, combo))
        values.update(opens)
        if _consequence(program, values) == values:
            out.add(Interpretation(values))
    return out


def _least_model(
    program: Program,
    assumed_true: set[str],
    unknown_is_true: bool,
    opens: OpenAssignment,
) -> set[str]:
    """Least model of the reduct relative to `assumed_true`: a body literal
    `not q` over a defined atom holds iff q is not assumed true.  Literals
    over unknown opens count as satisfied iff `unknown_is_true`."""
    true: set[str] = set()
    changed = True
    defined = program.defined_names()

    def literal_holds(lit: LpLiteral) -> bool:
        if lit.name in defined:
            if lit.positive:
                return lit.name in true
            return lit.name not in assumed_true
        v = opens[lit.name]
        if v is TruthValue.UNKNOWN:
            return unknown_is_true
        holds = v is TruthValue.TRUE
        return holds if lit.positive else not holds

    while changed:
        changed = False
        for r in program.rules:
            if r.head in true:
                continue
            if all(literal_holds(lit) for lit in r.body):
                true.add(r.head)
                changed = True
    return true


def well_founded_model(program: Program, opens: OpenAssignment) -> Interpretation:
    """Alternating fixpoint: certainly-true atoms grow against the shrinking
    possibly-true set, with unknown opens pessimistic on the lower side and
    optimistic on the upper side."""
    _check_opens(program, opens)
    defined = program.defined_names()
    certain: set[str] = set()
    possible: set[str] = set(defined)
    while True:
        new_certain = _least_model(program, possible, unknown_is_true=False, opens=opens)
        new_possible = _least_model(program, certain, unknown_is_true=True, opens=opens)
        if new_certain == certain and new_possible == possible:
            break
        certain, possible = new_certain, new_possible
    values: dict[str, TruthValue] = dict(opens)
    for n in defined:
        if n in certain:
            values[n] = TruthValue.TRUE
        elif n in possible:
            values[n] = TruthValue.UNKNOWN
        else:
            values[n] = TruthValue.FALSE
    return Interpretation(values)


def stable_models_total(
    program: Program, opens: OpenAssignment, budget: int = 1_000_000
) -> set[Interpretation]:
    """All total models equal to the least model of their own reduct.  Needs
    a two-valued open assignment."""
    _check_opens(program, opens)
    if any(v is TruthValue.UNKNOWN for v in opens.values()):
        raise LpValidationError("total stable models need two-valued opens")
    defined = sorted(program.defined_names())
    if 2 ** len(defined) > budget:
        raise BudgetExceededError(f"2^{len(defined)} candidates exceed the budget")
    out = set()
    for combo in itertools.product((False, True), repeat=len(defined)):
        candidate = {n for n, b in zip(defined, combo) if b}
        least = _least_model(program, candidate, unknown_is_true=False, opens=opens)
        if least == candidate:
            values = {
                n: TruthValue.TRUE if n in candidate else TruthValue.FALSE
                for n in defined
            }
            values.update(opens)
            out.add(Interpretation(values))
    return out
