"""Branches and branch evaluations.

A branch is either finite (defined facts ending in an open fact) or a lasso
(defined prefix plus a repeated cycle).  Branch evaluations map branches to
facts; the five built-ins drive the standard rule-system semantics.  Bounded
falsifiers search a frame's dependency graph for violations of monotonicity
and selectivity; they are refutation procedures, not decision procedures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .core import (
    FALSE,
    TRUE,
    UNKNOWN,
    Fact,
    Interpretation,
    Literal,
    SignMap,
    TruthValue,
    all_interpretations,
    complement,
    fact_key,
    fact_text,
    parse_fact,
    sort_facts,
    truth_lub,
)
from .frame import Frame, Rule


class MalformedBranchError(ValueError):
    pass


@dataclass(frozen=True)
class Finite:
    """Defined facts followed by one open terminal."""

    prefix: tuple[Fact, ...]
    terminal: Fact

    def __post_init__(self):
        if not self.prefix:
            raise MalformedBranchError("finite branch needs a nonempty prefix")

    def first(self) -> Fact:
        return self.prefix[0]

    def text(self) -> str:
        return " -> ".join(fact_text(x) for x in self.prefix + (self.terminal,))


@dataclass(frozen=True)
class Lasso:
    """Defined prefix followed by an endlessly repeated defined cycle."""

    prefix: tuple[Fact, ...]
    cycle: tuple[Fact, ...]

    def __post_init__(self):
        if not self.cycle:
            raise MalformedBranchError("lasso needs a nonempty cycle")

    def first(self) -> Fact:
        return self.prefix[0] if self.prefix else self.cycle[0]

    def text(self) -> str:
        cyc = " -> ".join(fact_text(x) for x in self.cycle)
        if self.prefix:
            pre = " -> ".join(fact_text(x) for x in self.prefix)
            return f"{pre} -> ({cyc})^w"
        return f"({cyc})^w"


Branch = Finite | Lasso


def branch_text(b: Branch) -> str:
    return b.text()


def parse_branch(text: str) -> Branch:
    """Parse the serialization produced by :func:`branch_text`."""
    text = text.strip()
    if text.endswith("^w"):
        inner = text[: -len("^w")].strip()
        if not inner.endswith(")"):
            raise MalformedBranchError(f"bad lasso text: {text!r}")
        open_idx = inner.index("(")
        prefix_part = inner[:open_idx].strip()
        cycle_part = inner[open_idx + 1 : -1]
        prefix = tuple(
            parse_fact(p) for p in prefix_part.split("->") if p.strip()
        )
        cycle = tuple(parse_fact(p) for p in cycle_part.split("->") if p.strip())
        return Lasso(prefix, cycle)
    parts = [parse_fact(p) for p in text.split("->")]
    if len(parts) < 2:
        raise MalformedBranchError(f"bad finite branch text: {text!r}")
    return Finite(tuple(parts[:-1]), parts[-1])


def negate_branch(b: Branch) -> Branch:
    if isinstance(b, Finite):
        return Finite(tuple(complement(x) for x in b.prefix), complement(b.terminal))
    return Lasso(
        tuple(complement(x) for x in b.prefix),
        tuple(complement(x) for x in b.cycle),
    )


def prepend(path: Sequence[Fact], b: Branch) -> Branch:
    """The branch `path -> b`."""
    path = tuple(path)
    if isinstance(b, Finite):
        return Finite(path + b.prefix, b.terminal)
    return Lasso(path + b.prefix, b.cycle)


@dataclass(frozen=True)
class BranchEvaluation:
    """A mapping from branches to facts with its declared properties.

    Built-ins are dispatched by key; plugins supply `fn(branch, sgn)`.  The
    flags gate which engines may use an evaluation: `consistent` is required
    for complement-side value computations, `monotone_selective` for the
    splitting solver and for plugin justification values.
    """

    key: str
    consistent: bool
    monotone_selective: bool
    transitive: bool
    fn: Callable[[Branch, SignMap], Fact] | None = None

    def __repr__(self) -> str:
        return f"BranchEvaluation({self.key})"


SUPPORTED = BranchEvaluation("sp", consistent=True, monotone_selective=True, transitive=False)
KRIPKE_KLEENE = BranchEvaluation("kk", consistent=True, monotone_selective=True, transitive=True)
WELL_FOUNDED = BranchEvaluation("wf", consistent=True, monotone_selective=True, transitive=True)
STABLE = BranchEvaluation("st", consistent=True, monotone_selective=True, transitive=False)
# Sign-pure, eventually-functional infinite tails collapse to their sign's
# constant; everything else is unknown.  Consistent but not selective.
FUNCTIONAL = BranchEvaluation("ex", consistent=True, monotone_selective=False, transitive=True)

BUILTINS: dict[str, BranchEvaluation] = {
    be.key: be for be in (SUPPORTED, KRIPKE_KLEENE, WELL_FOUNDED, STABLE, FUNCTIONAL)
}


def _cycle_signs(cycle: Sequence[Fact], sgn: SignMap) -> tuple[bool, bool]:
    has_pos = any(sgn.is_positive(x) for x in cycle)
    has_neg = any(not sgn.is_positive(x) for x in cycle)
    return has_pos, has_neg


def _cycle_is_functional(cycle: Sequence[Fact]) -> bool:
    # The repeated tail is functional iff every fact occurring in the cycle
    # has a single successor across all its cyclic occurrences.
    succ: dict[Fact, Fact] = {}
    n = len(cycle)
    for i, x in enumerate(cycle):
        nxt = cycle[(i + 1) % n]
        if x in succ and succ[x] != nxt:
            return False
        succ[x] = nxt
    return True


def eval_branch(be: BranchEvaluation, b: Branch, sgn: SignMap | None = None) -> Fact:
    """Apply a branch evaluation.  A sign map is required for wf, st, and ex."""
    if be.fn is not None:
        return be.fn(b, sgn)
    key = be.key
    if key == "sp":
        if isinstance(b, Finite):
            return b.prefix[1] if len(b.prefix) >= 2 else b.terminal
        if len(b.prefix) >= 2:
            return b.prefix[1]
        if len(b.prefix) == 1:
            return b.cycle[0]
        return b.cycle[1 % len(b.cycle)]
    if key == "kk":
        return b.terminal if isinstance(b, Finite) else UNKNOWN
    if sgn is None:
        raise ValueError(f"branch evaluation {key!r} needs a sign map")
    if key == "wf":
        if isinstance(b, Finite):
            return b.terminal
        has_pos, has_neg = _cycle_signs(b.cycle, sgn)
        if has_pos and has_neg:
            return UNKNOWN
        return FALSE if has_pos else TRUE
    if key == "st":
        first_sign = sgn.sign(b.first())
        rest = (b.prefix + (b.cycle if isinstance(b, Lasso) else ()))[1:]
        for x in rest:
            if sgn.sign(x) != first_sign:
                return x
        # No sign switch among defined elements: fall through to wf.  Open
        # terminals carry no sign and never count as a switch.
        if isinstance(b, Finite):
            return b.terminal
        return FALSE if first_sign == +1 else TRUE
    if key == "ex":
        if isinstance(b, Finite):
            return b.terminal
        if not _cycle_is_functional(b.cycle):
            return UNKNOWN
        has_pos, has_neg = _cycle_signs(b.cycle, sgn)
        if has_pos and has_neg:
            return UNKNOWN
        return FALSE if has_pos else TRUE
    raise ValueError(f"unknown branch evaluation {key!r}")


# --- complement-compatibility check ----------------------------------------


@dataclass(frozen=True)
class EvaluationMismatch:
    branch: Branch
    value: Fact
    negated_value: Fact

    def __str__(self) -> str:
        return (
            f"{branch_text(self.branch)}: value {fact_text(self.value)} but "
            f"negated branch gives {fact_text(self.negated_value)}"
        )


def check_consistent_evaluation(
    be: BranchEvaluation, sgn: SignMap, sample: Iterable[Branch]
) -> list[EvaluationMismatch]:
    """Every sampled branch b with eval(~b) != ~eval(b)."""
    out = []
    for b in sample:
        v = eval_branch(be, b, sgn)
        nv = eval_branch(be, negate_branch(b), sgn)
        if nv != complement(v):
            out.append(EvaluationMismatch(b, v, nv))
    return out


def generate_branches(
    n_pairs: int, prefix_len: int = 2, cycle_len: int = 2, open_names: Sequence[str] = ("o",)
) -> list[Branch]:
    """All branches over an abstract universe of `n_pairs` defined literal
    pairs, with defined prefixes up to `prefix_len` and cycles up to
    `cycle_len`.  Terminals are the logical constants plus open literals."""
    names = [chr(ord("a") + i) for i in range(n_pairs)]
    defined = [Literal(n, p) for n in names for p in (True, False)]
    defined.sort(key=fact_key)
    terminals = sort_facts(
        [Literal(n, p) for n in open_names for p in (True, False)]
        + [FALSE, UNKNOWN, TRUE]
    )
    out: list[Branch] = []
    for k in range(1, prefix_len + 1):
        for pre in itertools.product(defined, repeat=k):
            for t in terminals:
                out.append(Finite(pre, t))
    for k in range(0, prefix_len + 1):
        for pre in itertools.product(defined, repeat=k):
            for c in range(1, cycle_len + 1):
                for cyc in itertools.product(defined, repeat=c):
                    out.append(Lasso(pre, cyc))
    return out


def abstract_sign_map(n_pairs: int) -> SignMap:
    names = [chr(ord("a") + i) for i in range(n_pairs)]
    return SignMap.default(
        Literal(n, p) for n in names for p in (True, False)
    )


# --- frame walks ------------------------------------------------------------


def dependency_successors(fr: Frame) -> dict[Fact, list[Fact]]:
    """x -> sorted facts occurring in any body of a rule of x."""
    succ: dict[Fact, list[Fact]] = {}
    for x in sort_facts(fr.defined):
        ys = {y for r in fr.rules_for(x) for y in r.body}
        succ[x] = sort_facts(ys)
    return succ


def frame_branches(
    fr: Frame, start: Fact, prefix_len: int, cycle_len: int
) -> list[Branch]:
    """All branches of the frame starting at `start` whose defined prefix has
    at most `prefix_len` facts and whose cycle has at most `cycle_len`."""
    succ = dependency_successors(fr)
    out: list[Branch] = []

    def walks(frm: Fact, limit: int) -> Iterator[tuple[Fact, ...]]:
        # Walks of defined facts starting at frm, length 1..limit.
        stack = [(frm,)]
        while stack:
            w = stack.pop()
            yield w
            if len(w) < limit:
                for y in reversed(succ.get(w[-1], [])):
                    if y in fr.defined:
                        stack.append(w + (y,))

    seen: set[Branch] = set()
    for w in walks(start, prefix_len):
        for y in succ.get(w[-1], []):
            if y not in fr.defined:
                b = Finite(w, y)
                if b not in seen:
                    seen.add(b)
                    out.append(b)
    for k in range(0, prefix_len + 1):
        prefixes: Iterable[tuple[Fact, ...]]
        if k == 0:
            prefixes = [()]
        else:
            prefixes = (w for w in walks(start, prefix_len) if len(w) == k)
        for pre in prefixes:
            anchor = pre[-1] if pre else start
            starts = (
                [y for y in succ.get(anchor, []) if y in fr.defined]
                if pre
                else [start]
            )
            for c0 in starts:
                for cyc in _cycles_from(succ, fr, c0, cycle_len):
                    b = Lasso(pre, cyc)
                    if b not in seen:
                        seen.add(b)
                        out.append(b)
    return out


def _cycles_from(
    succ: dict[Fact, list[Fact]], fr: Frame, at: Fact, max_len: int
) -> Iterator[tuple[Fact, ...]]:
    # Closed defined walks at -> ... -> at of length 1..max_len.
    def rec(w: tuple[Fact, ...]) -> Iterator[tuple[Fact, ...]]:
        for y in succ.get(w[-1], []):
            if y == at:
                yield w
            if y in fr.defined and len(w) < max_len:
                yield from rec(w + (y,))

    yield from rec((at,))


def loops_at(fr: Frame, x: Fact, max_len: int) -> list[tuple[Fact, ...]]:
    """Finite loops starting at x: paths (x, ...) that can step back to x."""
    succ = dependency_successors(fr)
    return sorted(
        _cycles_from(succ, fr, x, max_len),
        key=lambda w: (len(w), tuple(fact_key(f) for f in w)),
    )


def paths_into(fr: Frame, x: Fact, max_len: int) -> list[tuple[Fact, ...]]:
    """Defined walks p with an edge from their last fact to x, length <= max_len."""
    succ = dependency_successors(fr)
    out = []

    def rec(w: tuple[Fact, ...]):
        if x in succ.get(w[-1], []):
            out.append(w)
        if len(w) < max_len:
            for y in succ.get(w[-1], []):
                if y in fr.defined:
                    rec(w + (y,))

    for s in sort_facts(fr.defined):
        rec((s,))
    out.sort(key=lambda w: (len(w), tuple(fact_key(f) for f in w)))
    return out


# --- falsifiers --------------------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    """Search bounds for the falsifiers."""

    prefix_len: int = 2
    cycle_len: int = 2
    loop_len: int = 2
    set_size: int = 1
    k_size: int = 1
    interleave: int = 2
    interp_budget: int = 100_000


@dataclass(frozen=True)
class MonotonicityCounterexample:
    interpretation: Interpretation
    prefix: tuple[Fact, ...]
    branch1: Branch
    branch2: Branch
    values: dict[str, TruthValue]

    def render(self) -> str:
        lines = [
            "property: monotone",
            "status: violated",
            "prefix: " + (" -> ".join(fact_text(x) for x in self.prefix) or "-"),
            f"branch1: {branch_text(self.branch1)}",
            f"branch2: {branch_text(self.branch2)}",
        ]
        for k, v in self.values.items():
            lines.append(f"value {k}: {v.letter}")
        lines.append(
            "interpretation: "
            + ",".join(f"{n}={v.letter}" for n, v in self.interpretation.items())
        )
        return "\n".join(lines)


@dataclass(frozen=True)
class MonotonicityResult:
    counterexample: MonotonicityCounterexample | None
    transitive_on_sample: bool


@dataclass(frozen=True)
class SelectivityCounterexample:
    interpretation: Interpretation
    start: Fact
    prefix: tuple[Fact, ...]
    m_loops: tuple[tuple[Fact, ...], ...]
    n_loops: tuple[tuple[Fact, ...], ...]
    k_branches: tuple[Branch, ...]
    branch: Branch
    branch_value: TruthValue
    bounding_values: dict[str, TruthValue]
    missing: str  # "lower", "upper", or "both"

    def render(self) -> str:
        def loopset(loops):
            if not loops:
                return "-"
            return "; ".join("->".join(fact_text(x) for x in lp) for lp in loops)

        lines = [
            "property: selective",
            "status: violated",
            f"start: {fact_text(self.start)}",
            "prefix: " + (" -> ".join(fact_text(x) for x in self.prefix) or "-"),
            f"M: {loopset(self.m_loops)}",
            f"N: {loopset(self.n_loops)}",
            "K: " + ("; ".join(branch_text(k) for k in self.k_branches) or "-"),
            f"branch: {branch_text(self.branch)}",
            f"value branch: {self.branch_value.letter}",
            f"missing bound: {self.missing}",
        ]
        for k, v in self.bounding_values.items():
            lines.append(f"value {k}: {v.letter}")
        lines.append(
            "interpretation: "
            + ",".join(f"{n}={v.letter}" for n, v in self.interpretation.items())
        )
        return "\n".join(lines)


@dataclass(frozen=True)
class SelectivityResult:
    counterexample: SelectivityCounterexample | None


def _interpretations_for(fr: Frame, bounds: Bounds) -> list[Interpretation]:
    from .core import BudgetExceededError

    names = sorted(fr.names())
    if 3 ** len(names) > bounds.interp_budget:
        raise BudgetExceededError(
            f"3^{len(names)} interpretations exceed the budget {bounds.interp_budget}"
        )
    return list(all_interpretations(names))


def falsify_monotonicity(
    fr: Frame, be: BranchEvaluation, sgn: SignMap, bounds: Bounds = Bounds()
) -> MonotonicityResult:
    """Search the frame's branches for a monotonicity violation: branches
    b1, b2 from the same fact and a path p with value(b1) <= value(b2) but
    value(p->b1) > value(p->b2) under some interpretation."""
    interps = _interpretations_for(fr, bounds)
    value_cache: dict[Branch, Fact] = {}

    def val(b: Branch) -> Fact:
        if b not in value_cache:
            value_cache[b] = eval_branch(be, b, sgn)
        return value_cache[b]

    # The violation test only depends on the four evaluated facts; memoize
    # the first violating interpretation per quadruple.
    quad_cache: dict[tuple[Fact, Fact, Fact, Fact], Interpretation | None] = {}

    def violating_interp(quad: tuple[Fact, Fact, Fact, Fact]) -> Interpretation | None:
        if quad not in quad_cache:
            v1, v2, e1, e2 = quad
            found = None
            for interp in interps:
                if interp.value(v1) <= interp.value(v2) and not (
                    interp.value(e1) <= interp.value(e2)
                ):
                    found = interp
                    break
            quad_cache[quad] = found
        return quad_cache[quad]

    transitive = True
    counterexample = None
    for x in sort_facts(fr.defined):
        branches = frame_branches(fr, x, bounds.prefix_len, bounds.cycle_len)
        for b in branches:
            transitive = transitive and _transitive_at(be, sgn, b)
        prefixes = [p for p in paths_into(fr, x, bounds.prefix_len)]
        if counterexample is not None:
            continue
        for p in prefixes:
            for b1 in branches:
                for b2 in branches:
                    quad = (val(b1), val(b2), val(prepend(p, b1)), val(prepend(p, b2)))
                    interp = violating_interp(quad)
                    if interp is not None:
                        counterexample = MonotonicityCounterexample(
                            interpretation=interp,
                            prefix=p,
                            branch1=b1,
                            branch2=b2,
                            values={
                                "branch1": interp.value(quad[0]),
                                "branch2": interp.value(quad[1]),
                                "extended1": interp.value(quad[2]),
                                "extended2": interp.value(quad[3]),
                            },
                        )
                        break
                if counterexample is not None:
                    break
            if counterexample is not None:
                break
    return MonotonicityResult(counterexample, transitive)


def _transitive_at(be: BranchEvaluation, sgn: SignMap, b: Branch) -> bool:
    if isinstance(b, Finite):
        if len(b.prefix) < 2:
            return True
        tail: Branch = Finite(b.prefix[1:], b.terminal)
    elif b.prefix:
        tail = Lasso(b.prefix[1:], b.cycle)
    else:
        tail = Lasso((), b.cycle[1:] + b.cycle[:1])
    return eval_branch(be, tail, sgn) == eval_branch(be, b, sgn)


def falsify_selectivity(
    fr: Frame, be: BranchEvaluation, sgn: SignMap, bounds: Bounds = Bounds()
) -> SelectivityResult:
    """Search for loop sets M, N and branch set K at a common start such that
    some interleaved branch has no bounding pair inside pM^w + pN^w + pK."""
    interps = _interpretations_for(fr, bounds)
    pair_cache: dict[tuple[Fact, frozenset[Fact]], tuple[Interpretation, str] | None] = {}

    def unbounded(bval: Fact, bound_vals: frozenset[Fact]):
        key = (bval, bound_vals)
        if key not in pair_cache:
            found = None
            for interp in interps:
                v = interp.value(bval)
                has_lower = any(interp.value(w) <= v for w in bound_vals)
                has_upper = any(v <= interp.value(w) for w in bound_vals)
                if not (has_lower and has_upper):
                    if not has_lower and not has_upper:
                        missing = "both"
                    elif not has_lower:
                        missing = "lower"
                    else:
                        missing = "upper"
                    found = (interp, missing)
                    break
            pair_cache[key] = found
        return pair_cache[key]

    for x in sort_facts(fr.defined):
        loops = loops_at(fr, x, bounds.loop_len)
        k_pool = frame_branches(fr, x, bounds.prefix_len, bounds.cycle_len)
        loop_sets = []
        for size in range(1, bounds.set_size + 1):
            loop_sets.extend(itertools.combinations(loops, size))
        k_sets: list[tuple[Branch, ...]] = [()]
        for size in range(1, bounds.k_size + 1):
            k_sets.extend(itertools.combinations(k_pool, size))
        prefixes: list[tuple[Fact, ...]] = [()]
        prefixes += paths_into(fr, x, bounds.prefix_len)
        for m_set, n_set in itertools.combinations(loop_sets, 2):
            union = sorted(
                set(m_set) | set(n_set),
                key=lambda w: (len(w), tuple(fact_key(f) for f in w)),
            )
            for ks in k_sets:
                for p in prefixes:
                    result = _check_selectivity_config(
                        be, sgn, x, p, m_set, n_set, ks, union, bounds, unbounded
                    )
                    if result is not None:
                        return SelectivityResult(result)
    return SelectivityResult(None)


def _iterations(loops: Sequence[tuple[Fact, ...]], count: int) -> Iterator[tuple[Fact, ...]]:
    # Concatenations of exactly `count` loops (with repetition, ordered).
    for combo in itertools.product(loops, repeat=count):
        yield tuple(itertools.chain.from_iterable(combo))


def _check_selectivity_config(
    be, sgn, x, p, m_set, n_set, ks, union, bounds, unbounded
) -> SelectivityCounterexample | None:
    # Bounding family: pM^w, pN^w (single-set iterations) and pK.
    bound_branches: list[Branch] = []
    for loops in (m_set, n_set):
        for count in range(1, bounds.interleave + 1):
            for cyc in _iterations(loops, count):
                bound_branches.append(Lasso(p, cyc))
    for k in ks:
        bound_branches.append(prepend(p, k))
    bound_vals = frozenset(eval_branch(be, b, sgn) for b in bound_branches)

    # Candidates: lasso-representable members of p(M u N)^w, and
    # p(M u N)*K members.
    candidates: list[Branch] = []
    for count in range(1, bounds.interleave + 1):
        for cyc in _iterations(union, count):
            candidates.append(Lasso(p, cyc))
    for count in range(0, bounds.interleave + 1):
        for mid in _iterations(union, count) if count else [()]:
            for k in ks:
                candidates.append(prepend(p + mid, k))
    seen = set()
    for b in candidates:
        if b in seen:
            continue
        seen.add(b)
        bval = eval_branch(be, b, sgn)
        hit = unbounded(bval, bound_vals)
        if hit is not None:
            interp, missing = hit
            return SelectivityCounterexample(
                interpretation=interp,
                start=x,
                prefix=p,
                m_loops=tuple(m_set),
                n_loops=tuple(n_set),
                k_branches=tuple(ks),
                branch=b,
                branch_value=interp.value(bval),
                bounding_values={
                    branch_text(bb): interp.value(eval_branch(be, bb, sgn))
                    for bb in bound_branches
                },
                missing=missing,
            )
    return None


def universal_frame(n_pairs: int, open_names: Sequence[str] = ("o",)) -> Frame:
    """A frame whose dependency graph is complete over `n_pairs` defined
    literal pairs: every defined fact has a singleton rule for every fact.
    Useful for running the falsifiers over unconstrained branch spaces."""
    names = [chr(ord("a") + i) for i in range(n_pairs)]
    defined = [Literal(n, p) for n in names for p in (True, False)]
    opens = [Literal(n, p) for n in open_names for p in (True, False)]
    targets = sort_facts(defined + opens + [FALSE, UNKNOWN, TRUE])
    rules = [Rule(x, frozenset([y])) for x in defined for y in targets]
    return Frame(defined, rules)
