"""Rule frames: validation, selection functions, complementation, and the
frame text format.

A frame fixes a ~-closed set of defined facts and a nonempty rule set per
defined fact.  Rules are deduplicated on (head, body) and ordered
deterministically, so derived game graphs and explanations are reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .core import (
    Fact,
    Literal,
    Logical,
    complement,
    fact_key,
    fact_text,
    parse_fact,
    sort_facts,
)


@dataclass(frozen=True, eq=False)
class Rule:
    """A rule `head <- body` with a nonempty body set."""

    head: Fact
    body: frozenset[Fact]

    def __post_init__(self):
        object.__setattr__(self, "_sorted_body", tuple(sort_facts(self.body)))
        object.__setattr__(self, "_hash", hash((self.head, self.body)))

    def __eq__(self, other: object) -> bool:
        return self is other or (
            type(other) is Rule and self.head == other.head and self.body == other.body
        )

    def __hash__(self) -> int:
        return self._hash

    def sorted_body(self) -> tuple[Fact, ...]:
        return self._sorted_body

    @property
    def label(self) -> str:
        """Canonical identifier, also used for game-graph rule states."""
        body = ",".join(fact_text(y) for y in self.sorted_body())
        return f"r_{{{fact_text(self.head)}<-{body}}}"

    def text(self) -> str:
        body = ", ".join(fact_text(y) for y in self.sorted_body())
        return f"{fact_text(self.head)} <- {body}."

    def __repr__(self) -> str:
        return f"Rule({self.label})"


def rule_key(r: Rule) -> tuple:
    return (fact_key(r.head), tuple(fact_key(y) for y in r.sorted_body()))


@dataclass(frozen=True)
class Diagnostic:
    """One named violation of the frame invariants."""

    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} [{self.subject}]: {self.message}"


class FrameError(ValueError):
    """Raised when an operation requires a valid frame and gets diagnostics."""

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in diagnostics))


class UndefinedFactError(LookupError):
    """The fact is not defined in this frame."""


class RuleBudgetError(RuntimeError):
    """A closure operation would exceed the configured rule budget."""


class Frame:
    """Immutable rule frame over a finite fact space."""

    __slots__ = ("defined", "rules", "_by_head", "_by_head_body")

    def __init__(self, defined: Iterable[Fact], rules: Iterable[Rule]):
        self.defined: frozenset[Fact] = frozenset(defined)
        deduped = {(r.head, r.body): r for r in rules}
        self.rules: tuple[Rule, ...] = tuple(
            sorted(deduped.values(), key=rule_key)
        )
        by_head: dict[Fact, list[Rule]] = {}
        for r in self.rules:
            by_head.setdefault(r.head, []).append(r)
        self._by_head = {h: tuple(rs) for h, rs in by_head.items()}
        self._by_head_body = {(r.head, r.body): r for r in self.rules}

    def rules_for(self, x: Fact) -> tuple[Rule, ...]:
        if x not in self.defined:
            raise UndefinedFactError(fact_text(x))
        return self._by_head.get(x, ())

    def lookup_rule(self, head: Fact, body: frozenset[Fact]) -> Rule | None:
        return self._by_head_body.get((head, body))

    def lookup_rule_subsuming(self, head: Fact, body: frozenset[Fact]) -> Rule | None:
        """The rule (head, body) of the superset closure: the stored rule when
        present, else a synthesized rule when an existing body is contained in
        `body`.  Superset rules never change supported values, so the closure
        is consulted virtually instead of being materialized."""
        exact = self._by_head_body.get((head, body))
        if exact is not None:
            return exact
        for r in self._by_head.get(head, ()):
            if r.body <= body:
                return Rule(head, body)
        return None

    def open_facts(self) -> list[Fact]:
        """Non-logical open facts occurring in rule bodies, sorted."""
        occurring = {y for r in self.rules for y in r.body}
        return sort_facts(
            x for x in occurring if x not in self.defined and isinstance(x, Literal)
        )

    def all_facts(self) -> list[Fact]:
        """Every fact occurring in the frame plus the logical constants."""
        facts = set(self.defined)
        for r in self.rules:
            facts.update(r.body)
        from .core import LOGICAL_FACTS

        facts.update(LOGICAL_FACTS)
        return sort_facts(facts)

    def names(self) -> frozenset[str]:
        """All literal names: defined and open."""
        return frozenset(
            x.name
            for x in itertools.chain(self.defined, (y for r in self.rules for y in r.body))
            if isinstance(x, Literal)
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Frame)
            and self.defined == other.defined
            and self.rules == other.rules
        )

    def __hash__(self) -> int:
        return hash((self.defined, self.rules))

    def __repr__(self) -> str:
        return f"Frame({len(self.defined)} defined, {len(self.rules)} rules)"


def validate_frame(fr: Frame, require_rules: bool = True) -> list[Diagnostic]:
    """Check the frame invariants; an empty list means the frame is valid.

    `require_rules=False` skips the every-defined-fact-has-rules check, which
    one-sided frames violate until complementation has run.
    """
    out: list[Diagnostic] = []
    for x in sort_facts(fr.defined):
        if isinstance(x, Logical):
            out.append(
                Diagnostic("logical-defined", fact_text(x), "logical facts cannot be defined")
            )
            continue
        if complement(x) not in fr.defined:
            out.append(
                Diagnostic(
                    "not-complement-closed",
                    fact_text(x),
                    f"defined set misses {fact_text(complement(x))}",
                )
            )
        if require_rules and not fr._by_head.get(x):
            out.append(
                Diagnostic("no-rules", fact_text(x), "defined fact has no rules")
            )
    for r in fr.rules:
        if not r.body:
            out.append(Diagnostic("empty-body", r.label, "rule body is empty"))
        if r.head not in fr.defined:
            out.append(
                Diagnostic("head-not-defined", r.label, "rule head is not a defined fact")
            )
    return out


def require_valid(fr: Frame, require_rules: bool = True) -> Frame:
    diags = validate_frame(fr, require_rules=require_rules)
    if diags:
        raise FrameError(diags)
    return fr


@dataclass(frozen=True)
class SelectionFunction:
    """One body element chosen from each rule of a fixed head."""

    rules: tuple[Rule, ...]
    choices: tuple[Fact, ...]

    def __post_init__(self):
        for r, y in zip(self.rules, self.choices):
            if y not in r.body:
                raise ValueError(f"{fact_text(y)} is not in the body of {r.label}")

    @property
    def image(self) -> frozenset[Fact]:
        return frozenset(self.choices)


def selection_functions(fr: Frame, x: Fact) -> Iterator[SelectionFunction]:
    """All selection functions for x, as the cartesian product of its rule
    bodies in deterministic order."""
    rules = fr.rules_for(x)
    bodies = [r.sorted_body() for r in rules]
    for combo in itertools.product(*bodies):
        yield SelectionFunction(rules, combo)


def selection_images(fr: Frame, x: Fact) -> set[frozenset[Fact]]:
    """Distinct images of the selection functions for x.  Computed by an
    incremental fold with deduplication: the full selection product is
    exponential in the rule count, the image set never exceeds the power set
    of the occurring facts."""
    images: set[frozenset[Fact]] = {frozenset()}
    for r in fr.rules_for(x):
        images = {img | {y} for img in images for y in r.body}
    return images


def complementation(fr: Frame) -> Frame:
    """Add, for every defined fact with rules, the complement rules derived
    from its selection functions.  Existing rules are preserved; identical
    (head, body) pairs collapse."""
    require_valid(fr, require_rules=False)
    new_rules = list(fr.rules)
    for x in sort_facts(fr.defined):
        if not fr.rules_for(x):
            continue
        nx = complement(x)
        for image in selection_images(fr, x):
            new_rules.append(Rule(nx, frozenset(complement(y) for y in image)))
    return Frame(fr.defined, new_rules)


def is_complementary(fr: Frame) -> bool:
    """True iff the frame is a fixed point of complementation."""
    return complementation(fr).rules == fr.rules


def superset_close(fr: Frame, universe: Iterable[Fact], rule_budget: int = 100_000) -> Frame:
    """Add every rule `x <- A'` with A subset of A' subset of the universe for
    an existing rule `x <- A`.  Exponential; guarded by a rule budget."""
    uni = set(universe)
    occurring = {y for r in fr.rules for y in r.body}
    if not occurring <= uni:
        missing = sort_facts(occurring - uni)
        raise ValueError(
            "universe misses occurring facts: "
            + ", ".join(fact_text(x) for x in missing)
        )
    new_rules = list(fr.rules)
    for r in fr.rules:
        extra = sort_facts(uni - r.body)
        if len(r.body) + len(extra) > 30:
            raise RuleBudgetError("superset closure over this universe is too large")
        for k in range(1, len(extra) + 1):
            for combo in itertools.combinations(extra, k):
                new_rules.append(Rule(r.head, r.body | frozenset(combo)))
                if len(new_rules) > rule_budget:
                    raise RuleBudgetError(
                        f"superset closure exceeds the rule budget of {rule_budget}"
                    )
    return Frame(fr.defined, new_rules)


# --- frame text format ------------------------------------------------------
#
# One rule per line:      head <- f1, f2.
# Defined declaration:    #defined a b c        (negations implied)
# Comments start with %.  Round-trips losslessly through parse/format.


def format_frame(fr: Frame) -> str:
    positive_names = sorted({x.name for x in fr.defined if isinstance(x, Literal) and x.positive})
    lines = []
    if positive_names:
        lines.append("#defined " + " ".join(positive_names))
    for r in fr.rules:
        lines.append(r.text())
    return "\n".join(lines) + "\n"


def parse_frame(text: str) -> Frame:
    defined: set[Fact] = set()
    rules: list[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#defined"):
            for name in line[len("#defined"):].split():
                x = parse_fact(name)
                if not isinstance(x, Literal) or not x.positive:
                    raise ValueError(f"line {lineno}: #defined expects positive names")
                defined.add(x)
                defined.add(complement(x))
            continue
        if not line.endswith("."):
            raise ValueError(f"line {lineno}: rule must end with '.'")
        line = line[:-1]
        if "<-" not in line:
            raise ValueError(f"line {lineno}: rule must contain '<-'")
        head_text, body_text = line.split("<-", 1)
        head = parse_fact(head_text)
        body = frozenset(parse_fact(part) for part in body_text.split(",") if part.strip())
        if not body:
            raise ValueError(f"line {lineno}: empty rule body")
        rules.append(Rule(head, body))
    if not defined:
        defined = {r.head for r in rules} | {complement(r.head) for r in rules}
    return Frame(defined, rules)
