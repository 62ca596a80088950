"""Supported values, the support operator, consistency reports, model
enumeration, and explanations."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    BudgetExceededError,
    Fact,
    Interpretation,
    Literal,
    SignMap,
    TruthValue,
    all_interpretations,
    complement,
    fact_text,
    parse_fact,
    sort_facts,
    truth_glb,
)
from .branches import BranchEvaluation, Finite, eval_branch
from .frame import Frame, require_valid
from .game import (
    GameGraph,
    build_game_graph,
    maximin_from_sets,
    maximin_value,
    minimax_from_sets,
    rooted_justifications,
    supported_fact_sets,
)
from .justif import JustificationGraph, justification_value


class ConsistencyViolationError(ValueError):
    def __init__(self, witness: Fact, value: TruthValue, complement_value: TruthValue):
        self.witness = witness
        super().__init__(
            f"supported values are inconsistent at {fact_text(witness)}: "
            f"value {value.letter} but complement has {complement_value.letter}"
        )


@dataclass(frozen=True)
class JustificationSystem:
    """A frame together with a branch evaluation and a sign function."""

    frame: Frame
    evaluation: BranchEvaluation
    sign: SignMap

    def __post_init__(self):
        require_valid(self.frame)
        missing = self.frame.defined - self.sign.domain()
        if missing:
            raise ValueError(
                "sign map misses defined facts: "
                + ", ".join(fact_text(x) for x in sort_facts(missing))
            )

    @classmethod
    def from_frame(
        cls, frame: Frame, evaluation: BranchEvaluation, sign: SignMap | None = None
    ) -> "JustificationSystem":
        return cls(frame, evaluation, sign or SignMap.default(frame.defined))

    def game(self) -> GameGraph:
        return build_game_graph(self.frame)


@functools.lru_cache(maxsize=4096)
def _fact_sets(frame: Frame, evaluation: BranchEvaluation, sign: SignMap):
    return supported_fact_sets(frame, (evaluation,), sign)[evaluation.key]


def supported_value_graph(
    js: JustificationSystem, x: Fact, interpretation: Interpretation
) -> TruthValue:
    """Best justification value at x; the interpretation's own value for open
    facts."""
    if x not in js.frame.defined:
        return interpretation.value(x)
    if js.evaluation.fn is not None:
        return maximin_value(js.game(), x, js.evaluation, js.sign, interpretation)
    sets = _fact_sets(js.frame, js.evaluation, js.sign)
    return maximin_from_sets(sets[x], interpretation)


def supported_values_all(
    js: JustificationSystem, interpretation: Interpretation
) -> dict[Fact, TruthValue]:
    """Supported values of every defined fact under one interpretation."""
    if js.evaluation.fn is not None:
        return {
            x: maximin_value(js.game(), x, js.evaluation, js.sign, interpretation)
            for x in sort_facts(js.frame.defined)
        }
    sets = _fact_sets(js.frame, js.evaluation, js.sign)
    return {
        x: maximin_from_sets(sets[x], interpretation)
        for x in sort_facts(js.frame.defined)
    }


# --- consistency ----------------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyRecord:
    fact: Fact
    interpretation: Interpretation
    value: TruthValue
    complement_value: TruthValue

    @property
    def consistent(self) -> bool:
        return self.complement_value == self.value.complement()


@dataclass(frozen=True)
class ConsistencyReport:
    records: tuple[ConsistencyRecord, ...]
    interpretations_checked: int

    @property
    def violations(self) -> list[ConsistencyRecord]:
        return [r for r in self.records if not r.consistent]

    @property
    def passed(self) -> bool:
        return not self.violations


def check_consistency(
    js: JustificationSystem,
    interpretations: Iterable[Interpretation] | None = None,
    budget: int = 1_000_000,
) -> ConsistencyReport:
    """Compare the supported value of every defined fact against its
    complement's, for the given interpretations (default: all of them)."""
    if interpretations is None:
        names = sorted(js.frame.names())
        if 3 ** len(names) > budget:
            raise BudgetExceededError(
                f"3^{len(names)} interpretations exceed the budget {budget}"
            )
        interpretations = all_interpretations(names)
    records = []
    count = 0
    for interp in interpretations:
        count += 1
        values = supported_values_all(js, interp)
        for x in sort_facts(js.frame.defined):
            records.append(
                ConsistencyRecord(x, interp, values[x], values[complement(x)])
            )
    return ConsistencyReport(tuple(records), count)


def support_operator(
    js: JustificationSystem, interpretation: Interpretation
) -> Interpretation:
    """Map every fact to its supported value.  Raises when the result would
    not be an interpretation."""
    values = supported_values_all(js, interpretation)
    for x in sort_facts(js.frame.defined):
        if values[complement(x)] != values[x].complement():
            raise ConsistencyViolationError(x, values[x], values[complement(x)])
    out = {n: interpretation.value(Literal(n)) for n in js.frame.names()}
    for x, v in values.items():
        if isinstance(x, Literal) and x.positive:
            out[x.name] = v
    return Interpretation(out)


# --- models ---------------------------------------------------------------------


def enumerate_models(
    js: JustificationSystem, budget: int = 1_000_000
) -> list[Interpretation]:
    """All interpretations whose defined facts carry exactly their supported
    values, sorted with the open-fact restriction as the major key."""
    names = sorted(js.frame.names())
    if 3 ** len(names) > budget:
        raise BudgetExceededError(
            f"3^{len(names)} interpretations exceed the budget {budget}"
        )
    open_names = sorted(
        n for n in names if Literal(n) not in js.frame.defined
    )
    models = []
    for interp in all_interpretations(names):
        values = supported_values_all(js, interp)
        if all(values[x] == interp.value(x) for x in values):
            models.append(interp)
    models.sort(
        key=lambda m: (
            tuple(int(m.value(Literal(n))) for n in open_names),
            tuple(int(v) for _, v in m.items()),
        )
    )
    return models


def group_models_by_opens(
    js: JustificationSystem, models: Sequence[Interpretation]
) -> list[tuple[tuple[tuple[str, TruthValue], ...], list[Interpretation]]]:
    open_names = sorted(n for n in js.frame.names() if Literal(n) not in js.frame.defined)
    groups: dict[tuple, list[Interpretation]] = {}
    for m in models:
        key = tuple((n, m.value(Literal(n))) for n in open_names)
        groups.setdefault(key, []).append(m)
    return sorted(groups.items(), key=lambda kv: tuple(int(v) for _, v in kv[0]))


# --- explanations ----------------------------------------------------------------


@dataclass(frozen=True)
class Explanation:
    fact: Fact
    justification: JustificationGraph
    value: TruthValue


def explain(
    js: JustificationSystem, x: Fact, interpretation: Interpretation
) -> Explanation:
    """The first justification (in deterministic enumeration order) whose
    value at x is the supported value.  Explaining falsity is done by calling
    this on the complement fact."""
    if x not in js.frame.defined:
        raise ValueError(f"{fact_text(x)} is not defined; its value is open")
    best: tuple[TruthValue, JustificationGraph] | None = None
    for j in rooted_justifications(js.frame, x):
        val = justification_value(j, x, js.evaluation, js.sign, interpretation)
        if best is None or val > best[0]:
            best = (val, j)
            if val == TruthValue.TRUE:
                break
    assert best is not None  # defined facts always have at least one rule
    return Explanation(x, best[1], best[0])


# --- tree-side values -------------------------------------------------------------


@dataclass(frozen=True)
class TreeValueResult:
    """Either a certified tree value or an explicit unknown with bounds."""

    certified: bool
    value: TruthValue | None
    lower_bound: TruthValue
    certificate: str | None

    @property
    def status(self) -> str:
        return "certified" if self.certified else "unknown"


def supported_value_tree(
    js: JustificationSystem,
    x: Fact,
    interpretation: Interpretation,
    search_depth: int = 6,
) -> TreeValueResult:
    """Tree-side supported value.

    When the evaluation is flagged consistent and the supported values under
    this interpretation commute with complementation, the tree value
    provably coincides with the graph value and is returned certified.
    Otherwise the graph value is only a lower bound; a bounded search over
    finite complete trees may raise it, and the result is an explicit
    unknown."""
    if x not in js.frame.defined:
        return TreeValueResult(
            True, interpretation.value(x), interpretation.value(x), "open-fact"
        )
    graph_value = supported_value_graph(js, x, interpretation)
    if js.evaluation.consistent:
        values = supported_values_all(js, interpretation)
        if all(
            values[complement(y)] == values[y].complement()
            for y in js.frame.defined
        ):
            return TreeValueResult(
                True, graph_value, graph_value, "coincides-with-graph-value"
            )
    witness = _best_finite_tree_value(js, x, interpretation, search_depth)
    lower = graph_value if witness is None else max(graph_value, witness)
    return TreeValueResult(False, None, lower, None)


def _best_finite_tree_value(
    js: JustificationSystem,
    x: Fact,
    interpretation: Interpretation,
    depth: int,
) -> TruthValue | None:
    """Best value over complete finite trees of bounded depth, or None when
    no such tree exists.  Branch values are path-sensitive, so the recursion
    carries the path from the root."""
    fr = js.frame

    def best(v: Fact, path: tuple[Fact, ...]) -> TruthValue | None:
        if v not in fr.defined:
            return interpretation.value(
                eval_branch(js.evaluation, Finite(path, v), js.sign)
            )
        if len(path) >= depth:
            return None
        extended = path + (v,)
        result: TruthValue | None = None
        for r in fr.rules_for(v):
            vals = []
            for y in r.sorted_body():
                sub = best(y, extended)
                if sub is None:
                    break
                vals.append(sub)
            else:
                candidate = truth_glb(vals)
                if result is None or candidate > result:
                    result = candidate
        return result

    return best(x, ())


# --- text serializations -----------------------------------------------------------


def format_models(js: JustificationSystem, models: Sequence[Interpretation]) -> str:
    """Models, one per line, grouped under their open-fact restriction."""
    lines = []
    for opens, group in group_models_by_opens(js, models):
        header = " ".join(f"{n}={v.letter}" for n, v in opens)
        lines.append("opens " + (header or "-"))
        for m in group:
            lines.append("model " + " ".join(f"{n}={v.letter}" for n, v in m.items()))
    if not models:
        lines.append("no models")
    return "\n".join(lines) + "\n"


def parse_models(text: str) -> list[Interpretation]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line.startswith("model "):
            continue
        values = {}
        for part in line[len("model "):].split():
            name, _, letter = part.partition("=")
            values[name] = TruthValue.from_letter(letter)
        out.append(Interpretation(values))
    return out


def format_consistency_report(report: ConsistencyReport) -> str:
    lines = [
        f"checked {report.interpretations_checked} interpretations, "
        f"{len(report.records)} fact records"
    ]
    for r in report.violations:
        assignment = ",".join(f"{n}={v.letter}" for n, v in r.interpretation.items())
        lines.append(
            f"violation fact={fact_text(r.fact)} interpretation {assignment} "
            f"value={r.value.letter} complement={r.complement_value.letter}"
        )
    lines.append("consistent" if report.passed else "inconsistent")
    return "\n".join(lines) + "\n"


def parse_consistency_violations(text: str) -> list[tuple[Fact, Interpretation]]:
    out = []
    for line in text.splitlines():
        if not line.startswith("violation "):
            continue
        parts = line.split()
        fact = parse_fact(parts[1].split("=", 1)[1])
        values = {}
        for pair in parts[3].split(","):
            name, _, letter = pair.partition("=")
            values[name] = TruthValue.from_letter(letter)
        out.append((fact, Interpretation(values)))
    return out
