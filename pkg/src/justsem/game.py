"""The two-player graph game induced by a frame.

Fact states belong to the value maximizer (who picks a rule per defined
fact); rule states belong to the minimizer (who picks a body fact per rule).
Rule choices correspond to justifications of a fact; body choices correspond
to justifications of its complement.  The solvers compute maximin/minimax
values and positional saddle pairs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence, Union

from .core import (
    BudgetExceededError,
    Fact,
    Interpretation,
    SignMap,
    TruthValue,
    complement,
    fact_key,
    fact_text,
    sort_facts,
    truth_glb,
)
from .branches import Branch, BranchEvaluation, Finite, Lasso, eval_branch
from .frame import Frame, Rule, require_valid
from .justif import (
    EvaluationCapabilityError,
    JustificationGraph,
    branch_value_facts_multi,
    justification_value,
)

State = Union[Fact, Rule]

RuleChoice = dict[Fact, Rule]  # maximizer: one rule per defined fact
BodyChoice = dict[Rule, Fact]  # minimizer: one body fact per rule


class MissingComplementRuleError(LookupError):
    """The frame lacks a complement rule the inversion needs."""


class InconsistentEvaluationError(ValueError):
    """The evaluation is not flagged consistent; complement-side values are
    unavailable."""


class StartAtOpenError(ValueError):
    """The play starts at an open fact and projects to no branch."""


@dataclass(frozen=True)
class GameGraph:
    """Bipartite game graph of fact states and rule states."""

    frame: Frame

    @property
    def fact_states(self) -> tuple[Fact, ...]:
        return tuple(self.frame.all_facts())

    @property
    def rule_states(self) -> tuple[Rule, ...]:
        return self.frame.rules

    def edges(self) -> list[tuple[State, State]]:
        out: list[tuple[State, State]] = []
        for x in self.fact_states:
            if x in self.frame.defined:
                for r in self.frame.rules_for(x):
                    out.append((x, r))
        for r in self.rule_states:
            for y in r.sorted_body():
                out.append((r, y))
        return out

    def non_isolated_fact_states(self) -> tuple[Fact, ...]:
        touched = set()
        for a, b in self.edges():
            for s in (a, b):
                if not isinstance(s, Rule):
                    touched.add(s)
        return tuple(sort_facts(touched))


def build_game_graph(fr: Frame) -> GameGraph:
    require_valid(fr)
    return GameGraph(fr)


def state_label(s: State) -> str:
    return s.label if isinstance(s, Rule) else fact_text(s)


def game_dot(game: GameGraph) -> str:
    """DOT export: fact states as ellipses, rule states as boxes.  Isolated
    fact states are omitted, matching the usual drawing."""
    lines = ["digraph game {"]
    for s in game.non_isolated_fact_states():
        lines.append(f'  "{state_label(s)}" [shape=ellipse];')
    for r in game.rule_states:
        lines.append(f'  "{state_label(r)}" [shape=box];')
    for a, b in game.edges():
        lines.append(f'  "{state_label(a)}" -> "{state_label(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- plays --------------------------------------------------------------------


@dataclass(frozen=True)
class Play:
    """A maximal walk under two positional strategies: either finite, ending
    at an open fact, or a lasso with the cycle starting at `cycle_start`."""

    states: tuple[State, ...]
    cycle_start: int | None

    def is_lasso(self) -> bool:
        return self.cycle_start is not None


def play(game: GameGraph, start: State, sigma: RuleChoice, tau: BodyChoice) -> Play:
    """The unique play from `start` consistent with both strategies."""
    fr = game.frame
    states: list[State] = [start]
    seen: dict[State, int] = {start: 0}
    cur = start
    while True:
        if isinstance(cur, Rule):
            nxt: State = tau[cur]
        elif cur in fr.defined:
            nxt = sigma[cur]
        else:
            return Play(tuple(states), None)
        if nxt in seen:
            return Play(tuple(states), seen[nxt])
        seen[nxt] = len(states)
        states.append(nxt)
        cur = nxt


def play_to_branch(p: Play) -> Branch:
    """Project the rule states away, leaving a branch."""
    first = p.states[0]
    if isinstance(first, Rule):
        raise StartAtOpenError("play starts at a rule state")
    if len(p.states) == 1:
        raise StartAtOpenError("empty play from an open fact projects to no branch")
    if p.cycle_start is None:
        facts = [s for s in p.states if not isinstance(s, Rule)]
        return Finite(tuple(facts[:-1]), facts[-1])
    prefix = tuple(s for s in p.states[: p.cycle_start] if not isinstance(s, Rule))
    cycle = tuple(s for s in p.states[p.cycle_start :] if not isinstance(s, Rule))
    return Lasso(prefix, cycle)


def play_value(
    game: GameGraph,
    start: State,
    sigma: RuleChoice,
    tau: BodyChoice,
    be: BranchEvaluation,
    sgn: SignMap | None,
    interpretation: Interpretation,
) -> TruthValue:
    """Interpreted branch value of the play from `start`.

    A play that stops immediately at an open fact, or reaches one straight
    from a rule state, projects to a single open fact; its value is taken to
    be that fact's interpreted value (the terminal behaviour of the finite
    case of every built-in).
    """
    p = play(game, start, sigma, tau)
    if p.cycle_start is None:
        facts = [s for s in p.states if not isinstance(s, Rule)]
        if len(facts) == 1:
            return interpretation.value(facts[0])
        branch: Branch = Finite(tuple(facts[:-1]), facts[-1])
    else:
        prefix = tuple(s for s in p.states[: p.cycle_start] if not isinstance(s, Rule))
        cycle = tuple(s for s in p.states[p.cycle_start :] if not isinstance(s, Rule))
        branch = Lasso(prefix, cycle)
    return interpretation.value(eval_branch(be, branch, sgn))


# --- strategies <-> justifications ---------------------------------------------


def enumerate_rule_choices(fr: Frame) -> Iterator[RuleChoice]:
    """All total maximizer strategies, in deterministic order."""
    facts = sort_facts(fr.defined)
    for combo in itertools.product(*(fr.rules_for(x) for x in facts)):
        yield dict(zip(facts, combo))


def enumerate_body_choices(fr: Frame) -> Iterator[BodyChoice]:
    """All total minimizer strategies, in deterministic order."""
    for combo in itertools.product(*(r.sorted_body() for r in fr.rules)):
        yield dict(zip(fr.rules, combo))


def justification_of_rule_choice(fr: Frame, sigma: Mapping[Fact, Rule], x: Fact) -> JustificationGraph:
    """The justification the maximizer's strategy induces at x: the strategy
    restricted to the facts reachable from x under it."""
    if x not in fr.defined:
        raise ValueError(f"{fact_text(x)} is not defined")
    choice: dict[Fact, Rule] = {}
    stack = [x]
    seen = {x}
    while stack:
        v = stack.pop()
        r = sigma[v]
        choice[v] = r
        for y in r.body:
            if y in fr.defined and y not in seen:
                seen.add(y)
                stack.append(y)
    return JustificationGraph(choice, fr.defined)


def rule_choice_of_justification(j: JustificationGraph) -> RuleChoice:
    """The inverse direction: a justification is literally a rule-choice map."""
    return dict(j.choice)


def justification_of_body_choice(fr: Frame, tau: Mapping[Rule, Fact], x: Fact) -> JustificationGraph:
    """The justification the minimizer's strategy induces for the complement
    of x: each defined fact's chosen body elements form a selection whose
    complemented image must be a rule of the complemented fact."""
    if x not in fr.defined:
        raise ValueError(f"{fact_text(x)} is not defined")
    choice: dict[Fact, Rule] = {}
    pending = [x]
    queued = {x}
    while pending:
        z = pending.pop(0)
        image = frozenset(tau[r] for r in fr.rules_for(z))
        nbody = frozenset(complement(y) for y in image)
        rule = fr.lookup_rule_subsuming(complement(z), nbody)
        if rule is None:
            raise MissingComplementRuleError(
                f"frame has no rule {fact_text(complement(z))} <- "
                + ", ".join(fact_text(y) for y in sort_facts(nbody))
            )
        choice[complement(z)] = rule
        for y in sort_facts(image):
            if y in fr.defined and y not in queued:
                queued.add(y)
                pending.append(y)
    return JustificationGraph(choice, fr.defined)


def body_choice_of_justification(fr: Frame, j: JustificationGraph, x: Fact) -> BodyChoice:
    """Recover a minimizer strategy (restricted to the rules it touches) whose
    induced justification at x equals j."""
    tau: BodyChoice = {}
    for node, rule in j.choice.items():
        z = complement(node)
        wanted = frozenset(complement(y) for y in rule.body)
        picked = []
        for r in fr.rules_for(z):
            options = sort_facts(r.body & wanted)
            if not options:
                raise ValueError(
                    f"justification rule {rule.label} does not arise from any "
                    f"selection over the rules of {fact_text(z)}"
                )
            tau[r] = options[0]
            picked.append(options[0])
        if frozenset(picked) != wanted:
            # Greedy picks must jointly cover the image; fix up by assigning
            # uncovered targets to rules that can still reach them.
            missing = wanted - frozenset(picked)
            for target in sort_facts(missing):
                for r in fr.rules_for(z):
                    if target in r.body:
                        tau[r] = target
                        break
                else:
                    raise ValueError(
                        f"cannot realize body {rule.label} as a selection image"
                    )
            image = frozenset(tau[r] for r in fr.rules_for(z))
            if image != wanted:
                raise ValueError(
                    f"cannot realize body {rule.label} as a selection image"
                )
    return tau


# --- rooted enumeration ---------------------------------------------------------


def rooted_justifications(fr: Frame, x: Fact) -> Iterator[JustificationGraph]:
    """All connected, locally complete justifications with root x, enumerated
    by expanding rule choices in deterministic order."""
    if x not in fr.defined:
        raise ValueError(f"{fact_text(x)} is not defined")

    def rec(choice: dict[Fact, Rule], pending: tuple[Fact, ...]) -> Iterator[JustificationGraph]:
        if not pending:
            yield JustificationGraph(dict(choice), fr.defined)
            return
        v, rest = pending[0], pending[1:]
        for r in fr.rules_for(v):
            choice[v] = r
            new = tuple(
                y
                for y in r.sorted_body()
                if y in fr.defined and y not in choice and y not in rest
            )
            yield from rec(choice, rest + new)
            del choice[v]

    yield from rec({}, (x,))


def inverted_justifications(fr: Frame, x: Fact) -> Iterator[JustificationGraph]:
    """All justifications of the complement of x that arise from minimizer
    strategies, enumerated over distinct selection images per fact."""
    if x not in fr.defined:
        raise ValueError(f"{fact_text(x)} is not defined")

    def images_of(z: Fact) -> list[frozenset[Fact]]:
        from .frame import selection_images

        return sorted(
            selection_images(fr, z),
            key=lambda s: tuple(fact_key(y) for y in sort_facts(s)),
        )

    image_cache: dict[Fact, list[frozenset[Fact]]] = {}

    def rec(choice: dict[Fact, Rule], pending: tuple[Fact, ...]) -> Iterator[JustificationGraph]:
        if not pending:
            yield JustificationGraph(dict(choice), fr.defined)
            return
        z, rest = pending[0], pending[1:]
        if z not in image_cache:
            image_cache[z] = images_of(z)
        nz = complement(z)
        for image in image_cache[z]:
            nbody = frozenset(complement(y) for y in image)
            rule = fr.lookup_rule_subsuming(nz, nbody)
            if rule is None:
                raise MissingComplementRuleError(
                    f"frame has no rule {fact_text(nz)} <- "
                    + ", ".join(fact_text(y) for y in sort_facts(nbody))
                )
            choice[nz] = rule
            new = tuple(
                y
                for y in sort_facts(image)
                if y in fr.defined and complement(y) not in choice and y not in rest
            )
            yield from rec(choice, rest + new)
            del choice[nz]

    yield from rec({}, (x,))


# --- values ---------------------------------------------------------------------


def maximin_value(
    game: GameGraph,
    x: Fact,
    be: BranchEvaluation,
    sgn: SignMap | None,
    interpretation: Interpretation,
) -> TruthValue:
    """Best justification value the maximizer can enforce at x; the inner
    minimum over minimizer strategies is the justification value itself."""
    best = TruthValue.FALSE
    for j in rooted_justifications(game.frame, x):
        val = justification_value(j, x, be, sgn, interpretation)
        if val > best:
            best = val
            if best == TruthValue.TRUE:
                break
    return best


def minimax_value(
    game: GameGraph,
    x: Fact,
    be: BranchEvaluation,
    sgn: SignMap | None,
    interpretation: Interpretation,
) -> TruthValue:
    """min over minimizer strategies of the complemented value of the induced
    complement justification; the complement's supported value is the
    complement of this result."""
    if not be.consistent:
        raise InconsistentEvaluationError(
            f"evaluation {be.key!r} is not flagged consistent"
        )
    worst = TruthValue.TRUE
    for j in inverted_justifications(game.frame, x):
        val = justification_value(j, complement(x), be, sgn, interpretation).complement()
        if val < worst:
            worst = val
            if worst == TruthValue.FALSE:
                break
    return worst


def supported_fact_sets(
    fr: Frame, bes: Sequence[BranchEvaluation], sgn: SignMap | None
) -> dict[str, dict[Fact, list[frozenset[Fact]]]]:
    """Per evaluation and defined fact: the deduplicated branch-value fact
    sets over all rooted justifications.  Interpretation-free, so one sweep
    serves every interpretation."""
    out: dict[str, dict[Fact, list[frozenset[Fact]]]] = {
        be.key: {} for be in bes
    }
    seen: dict[str, dict[Fact, set[frozenset[Fact]]]] = {
        be.key: {} for be in bes
    }
    for x in sort_facts(fr.defined):
        for key in out:
            out[key][x] = []
            seen[key][x] = set()
        for j in rooted_justifications(fr, x):
            sets = branch_value_facts_multi(j, x, bes, sgn)
            for key, facts in sets.items():
                if facts not in seen[key][x]:
                    seen[key][x].add(facts)
                    out[key][x].append(facts)
    return out


def opposition_fact_sets(
    fr: Frame, bes: Sequence[BranchEvaluation], sgn: SignMap | None
) -> dict[str, dict[Fact, list[frozenset[Fact]]]]:
    """Per evaluation and defined fact x: the fact sets of the complement
    justifications induced by minimizer strategies, evaluated at ~x."""
    out: dict[str, dict[Fact, list[frozenset[Fact]]]] = {be.key: {} for be in bes}
    seen: dict[str, dict[Fact, set[frozenset[Fact]]]] = {be.key: {} for be in bes}
    for x in sort_facts(fr.defined):
        for key in out:
            out[key][x] = []
            seen[key][x] = set()
        for j in inverted_justifications(fr, x):
            sets = branch_value_facts_multi(j, complement(x), bes, sgn)
            for key, facts in sets.items():
                if facts not in seen[key][x]:
                    seen[key][x].add(facts)
                    out[key][x].append(facts)
    return out


def maximin_from_sets(
    sets: Sequence[frozenset[Fact]], interpretation: Interpretation
) -> TruthValue:
    best = TruthValue.FALSE
    for facts in sets:
        val = truth_glb(interpretation.value(v) for v in facts)
        if val > best:
            best = val
            if best == TruthValue.TRUE:
                break
    return best


def minimax_from_sets(
    sets: Sequence[frozenset[Fact]], interpretation: Interpretation
) -> TruthValue:
    worst = TruthValue.TRUE
    for facts in sets:
        val = truth_glb(interpretation.value(v) for v in facts).complement()
        if val < worst:
            worst = val
            if worst == TruthValue.FALSE:
                break
    return worst


# --- saddle-point solvers --------------------------------------------------------


@dataclass(frozen=True)
class OptimalPairResult:
    sigma: RuleChoice | None
    tau: BodyChoice | None
    values: dict[Fact, TruthValue] | None
    witness: Fact | None  # fact where maximin != minimax, when no pair exists

    @property
    def found(self) -> bool:
        return self.sigma is not None


def find_optimal_pair_bruteforce(
    game: GameGraph,
    be: BranchEvaluation,
    sgn: SignMap | None,
    interpretation: Interpretation,
    pair_budget: int = 2_000_000,
) -> OptimalPairResult:
    """Search all positional pairs for a saddle point: stable against all
    positional deviations at every defined fact, with play values equal to
    both maximin and minimax there."""
    fr = game.frame
    facts = sort_facts(fr.defined)
    sigmas = list(enumerate_rule_choices(fr))
    taus = list(enumerate_body_choices(fr))
    if len(sigmas) * len(taus) > pair_budget:
        raise BudgetExceededError(
            f"{len(sigmas)}x{len(taus)} strategy pairs exceed the budget"
        )
    values = [
        [
            tuple(play_value(game, x, s, t, be, sgn, interpretation) for x in facts)
            for t in taus
        ]
        for s in sigmas
    ]
    maximin = {
        x: maximin_value(game, x, be, sgn, interpretation) for x in facts
    }
    minimax = {
        x: minimax_value(game, x, be, sgn, interpretation) for x in facts
    }
    for x in facts:
        if maximin[x] != minimax[x]:
            return OptimalPairResult(None, None, None, x)
    n = len(facts)
    col_max = [
        tuple(max(values[i][j][k] for i in range(len(sigmas))) for k in range(n))
        for j in range(len(taus))
    ]
    row_min = [
        tuple(min(values[i][j][k] for j in range(len(taus))) for k in range(n))
        for i in range(len(sigmas))
    ]
    for i in range(len(sigmas)):
        for j in range(len(taus)):
            vals = values[i][j]
            if vals != col_max[j] or vals != row_min[i]:
                continue
            if all(vals[k] == maximin[facts[k]] for k in range(n)):
                return OptimalPairResult(
                    sigmas[i], taus[j], dict(zip(facts, vals)), None
                )
    return OptimalPairResult(None, None, None, None)


@dataclass(frozen=True)
class SplitSolution:
    sigma: RuleChoice
    tau: BodyChoice
    values: dict[Fact, TruthValue]


def solve_by_splitting(
    game: GameGraph,
    be: BranchEvaluation,
    sgn: SignMap | None,
    interpretation: Interpretation,
    memo_budget: int = 200_000,
) -> SplitSolution:
    """Recursive edge splitting: repeatedly halve the options of the lowest
    multi-option fact state (then rule state) into two subgames, solve both,
    and keep the winner at the split state.  Requires a monotone and
    selective evaluation."""
    if not be.monotone_selective:
        raise EvaluationCapabilityError(
            f"evaluation {be.key!r} is not flagged monotone and selective"
        )
    fr = game.frame
    facts = sort_facts(fr.defined)
    full_rules = {x: tuple(fr.rules_for(x)) for x in facts}
    full_bodies = {r: tuple(r.sorted_body()) for r in fr.rules}
    memo: dict = {}

    def solve(
        rules: dict[Fact, tuple[Rule, ...]], bodies: dict[Rule, tuple[Fact, ...]]
    ) -> tuple[RuleChoice, BodyChoice]:
        key = (
            tuple((fact_text(x), tuple(r.label for r in rs)) for x, rs in rules.items()),
            tuple((r.label, tuple(fact_text(y) for y in ys)) for r, ys in bodies.items()),
        )
        if key in memo:
            return memo[key]
        if len(memo) > memo_budget:
            raise BudgetExceededError("splitting memo exceeds its budget")
        split_fact = next((x for x in facts if len(rules[x]) > 1), None)
        if split_fact is not None:
            first, rest = rules[split_fact][:1], rules[split_fact][1:]
            sol1 = solve({**rules, split_fact: first}, bodies)
            sol2 = solve({**rules, split_fact: rest}, bodies)
            v1 = play_value(game, split_fact, sol1[0], sol1[1], be, sgn, interpretation)
            v2 = play_value(game, split_fact, sol2[0], sol2[1], be, sgn, interpretation)
            result = sol1 if v1 >= v2 else sol2  # maximizer keeps the larger
        else:
            split_rule = next((r for r in fr.rules if len(bodies[r]) > 1), None)
            if split_rule is None:
                sigma = {x: rules[x][0] for x in facts}
                tau = {r: bodies[r][0] for r in fr.rules}
                result = (sigma, tau)
            else:
                first, rest = bodies[split_rule][:1], bodies[split_rule][1:]
                sol1 = solve(rules, {**bodies, split_rule: first})
                sol2 = solve(rules, {**bodies, split_rule: rest})
                v1 = play_value(game, split_rule, sol1[0], sol1[1], be, sgn, interpretation)
                v2 = play_value(game, split_rule, sol2[0], sol2[1], be, sgn, interpretation)
                result = sol1 if v1 <= v2 else sol2  # minimizer keeps the smaller
        memo[key] = result
        return result

    sigma, tau = solve(full_rules, full_bodies)
    values = {
        x: play_value(game, x, sigma, tau, be, sgn, interpretation) for x in facts
    }
    return SplitSolution(sigma, tau, values)
