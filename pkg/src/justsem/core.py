"""Three-valued truth lattice, facts with a complement involution, sign maps,
and interpretations.

Everything here is an immutable value; all operations are pure functions and
safe to share across parallel workers.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union


class TruthValue(enum.IntEnum):
    """Truth values ordered FALSE < UNKNOWN < TRUE (the truth order)."""

    FALSE = 0
    UNKNOWN = 1
    TRUE = 2

    def complement(self) -> "TruthValue":
        if self is TruthValue.TRUE:
            return TruthValue.FALSE
        if self is TruthValue.FALSE:
            return TruthValue.TRUE
        return TruthValue.UNKNOWN

    def __invert__(self) -> "TruthValue":
        return self.complement()

    @property
    def letter(self) -> str:
        return {0: "f", 1: "u", 2: "t"}[int(self)]

    @classmethod
    def from_letter(cls, letter: str) -> "TruthValue":
        try:
            return {"f": cls.FALSE, "u": cls.UNKNOWN, "t": cls.TRUE}[letter]
        except KeyError:
            raise ValueError(f"not a truth value letter: {letter!r}") from None


def truth_glb(values: Iterable[TruthValue]) -> TruthValue:
    """Greatest lower bound in the truth order; TRUE on an empty collection."""
    return min(values, default=TruthValue.TRUE)


def truth_lub(values: Iterable[TruthValue]) -> TruthValue:
    """Least upper bound in the truth order; FALSE on an empty collection."""
    return max(values, default=TruthValue.FALSE)


@dataclass(frozen=True, eq=False)
class Logical:
    """A logical constant fact (#t, #f, or #u).  Always an open fact."""

    value: TruthValue

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("#", int(self.value))))

    def __eq__(self, other: object) -> bool:
        return type(other) is Logical and self.value is other.value

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Logical({self.value.name})"


@dataclass(frozen=True, eq=False)
class Literal:
    """A named fact with a polarity; `~x` is Literal(x, positive=False)."""

    name: str
    positive: bool = True

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.name, self.positive)))

    def __eq__(self, other: object) -> bool:
        return self is other or (
            type(other) is Literal
            and self.name == other.name
            and self.positive == other.positive
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Literal({fact_text(self)!r})"


Fact = Union[Logical, Literal]

TRUE = Logical(TruthValue.TRUE)
FALSE = Logical(TruthValue.FALSE)
UNKNOWN = Logical(TruthValue.UNKNOWN)

LOGICAL_FACTS = (FALSE, UNKNOWN, TRUE)

NAME_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def complement(x: Fact) -> Fact:
    """The involution ~: flips literal polarity, swaps #t and #f, fixes #u."""
    if isinstance(x, Literal):
        return Literal(x.name, not x.positive)
    return Logical(x.value.complement())


def fact_key(x: Fact) -> tuple:
    """Deterministic sort key: literals by (name, polarity), then constants."""
    if isinstance(x, Literal):
        return (0, x.name, 0 if x.positive else 1)
    return (1, "", int(x.value))


def sort_facts(facts: Iterable[Fact]) -> list[Fact]:
    return sorted(facts, key=fact_key)


def fact_text(x: Fact) -> str:
    """Render a fact in the text syntax: `a`, `~a`, `#t`, `#f`, `#u`."""
    if isinstance(x, Literal):
        return x.name if x.positive else "~" + x.name
    return "#" + x.value.letter


def parse_fact(text: str) -> Fact:
    """Parse the text syntax produced by :func:`fact_text`."""
    text = text.strip()
    if text.startswith("#"):
        return Logical(TruthValue.from_letter(text[1:]))
    positive = True
    if text.startswith("~"):
        positive = False
        text = text[1:]
    if not NAME_RE.match(text):
        raise ValueError(f"not a valid fact: {text!r}")
    return Literal(text, positive)


class UnknownNameError(LookupError):
    """A literal's name is not covered by the interpretation."""


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed its configured budget."""


class Interpretation:
    """Assignment of truth values to literal names.

    Only one value per name is stored; negative-polarity lookups negate, so
    value(~x) == ~value(x) holds by construction and cannot be violated.
    """

    __slots__ = ("_values",)

    def __init__(self, values: Mapping[str, TruthValue]):
        self._values = dict(values)

    def value(self, x: Fact) -> TruthValue:
        if isinstance(x, Logical):
            return x.value
        try:
            v = self._values[x.name]
        except KeyError:
            raise UnknownNameError(x.name) from None
        return v if x.positive else v.complement()

    def names(self) -> frozenset[str]:
        return frozenset(self._values)

    def items(self) -> list[tuple[str, TruthValue]]:
        return sorted(self._values.items())

    def restrict(self, names: Iterable[str]) -> "Interpretation":
        return Interpretation({n: self._values[n] for n in names})

    def updated(self, values: Mapping[str, TruthValue]) -> "Interpretation":
        merged = dict(self._values)
        merged.update(values)
        return Interpretation(merged)

    def is_total(self) -> bool:
        return all(v is not TruthValue.UNKNOWN for v in self._values.values())

    @classmethod
    def all_unknown(cls, names: Iterable[str]) -> "Interpretation":
        return cls({n: TruthValue.UNKNOWN for n in names})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Interpretation) and self._values == other._values

    def __hash__(self) -> int:
        return hash(frozenset(self._values.items()))

    def __repr__(self) -> str:
        body = ",".join(f"{n}={v.letter}" for n, v in self.items())
        return f"Interpretation({body})"


def all_interpretations(names: Iterable[str]) -> Iterator[Interpretation]:
    """All 3^n interpretations over the given names, in deterministic order."""
    ordered = sorted(set(names))
    values = (TruthValue.FALSE, TruthValue.UNKNOWN, TruthValue.TRUE)

    def rec(i: int, acc: dict[str, TruthValue]) -> Iterator[Interpretation]:
        if i == len(ordered):
            yield Interpretation(acc)
            return
        for v in values:
            acc[ordered[i]] = v
            yield from rec(i + 1, acc)
        acc.pop(ordered[i], None)

    yield from rec(0, {})


class SignMapError(ValueError):
    """A sign assignment violates sgn(x) != sgn(~x) or misses a defined fact."""


class SignMap:
    """Assignment of +/- to defined facts with opposite signs for complements."""

    __slots__ = ("_positive", "_domain")

    def __init__(self, assignment: Mapping[Fact, int]):
        positive = set()
        for x, s in assignment.items():
            if s not in (+1, -1):
                raise SignMapError(f"sign of {fact_text(x)} must be +1 or -1")
            if s == +1:
                positive.add(x)
        for x in assignment:
            nx = complement(x)
            if nx in assignment and assignment[nx] == assignment[x]:
                raise SignMapError(
                    f"{fact_text(x)} and {fact_text(nx)} carry the same sign"
                )
        self._positive = frozenset(positive)
        self._domain = frozenset(assignment)

    @classmethod
    def default(cls, defined: Iterable[Fact]) -> "SignMap":
        """Positive-polarity literals get +, negative-polarity ones get -."""
        assignment: dict[Fact, int] = {}
        for x in defined:
            if not isinstance(x, Literal):
                raise SignMapError(f"cannot sign the logical fact {fact_text(x)}")
            assignment[x] = +1 if x.positive else -1
        return cls(assignment)

    def sign(self, x: Fact) -> int:
        if x not in self._domain:
            raise SignMapError(f"{fact_text(x)} carries no sign")
        return +1 if x in self._positive else -1

    def is_positive(self, x: Fact) -> bool:
        return self.sign(x) == +1

    def domain(self) -> frozenset[Fact]:
        return self._domain

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SignMap)
            and self._positive == other._positive
            and self._domain == other._domain
        )

    def __hash__(self) -> int:
        return hash((self._positive, self._domain))

    def __repr__(self) -> str:
        pos = ",".join(fact_text(x) for x in sort_facts(self._positive))
        return f"SignMap(+: {pos})"
