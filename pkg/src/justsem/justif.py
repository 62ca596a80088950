"""Justification graphs and trees, and exact branch-value analysis.

A justification graph is stored as a rule-choice map (one rule per defined
fact), exploiting the fact that node labels are injective.  Branch sets of a
justification are usually infinite; the analysis here computes the exact set
of facts a branch evaluation produces over them using reachability, strongly
connected components, and sign-region growth, never by sampling branches.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .core import (
    FALSE,
    TRUE,
    UNKNOWN,
    Fact,
    Interpretation,
    SignMap,
    TruthValue,
    fact_key,
    fact_text,
    sort_facts,
    truth_glb,
)
from .branches import Branch, BranchEvaluation, Finite, Lasso, eval_branch
from .frame import Rule


class NotLocallyCompleteError(ValueError):
    """The justification has a defined leaf in the region under analysis."""


class FactAbsentError(LookupError):
    """The requested fact labels no node of the justification."""


class EvaluationCapabilityError(ValueError):
    """The evaluation's declared flags do not license the requested analysis."""


@dataclass(frozen=True)
class JustificationGraph:
    """An injectively labelled justification over a fixed defined-fact set,
    stored as a partial map from defined facts to the rule applied there."""

    choice: Mapping[Fact, Rule]
    defined: frozenset[Fact]

    def __post_init__(self):
        object.__setattr__(self, "choice", dict(self.choice))
        for x, r in self.choice.items():
            if r.head != x:
                raise ValueError(f"rule {r.label} cannot justify {fact_text(x)}")
            if x not in self.defined:
                raise ValueError(f"{fact_text(x)} is not a defined fact")

    def nodes(self) -> list[Fact]:
        facts = set(self.choice)
        for r in self.choice.values():
            facts.update(r.body)
        return sort_facts(facts)

    def children(self, x: Fact) -> list[Fact]:
        r = self.choice.get(x)
        return r.sorted_body() if r is not None else []

    def edges(self) -> list[tuple[Fact, Fact]]:
        return [(x, y) for x in sort_facts(self.choice) for y in self.children(x)]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, JustificationGraph)
            and dict(self.choice) == dict(other.choice)
            and self.defined == other.defined
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.choice.items()), self.defined))

    def __repr__(self) -> str:
        body = "; ".join(r.label for _, r in sorted(self.choice.items(), key=lambda kv: fact_key(kv[0])))
        return f"JustificationGraph({body})"


def is_locally_complete(j: JustificationGraph) -> bool:
    """True iff every leaf is open, i.e. no defined node lacks a rule."""
    return all(x in j.choice for x in j.nodes() if x in j.defined)


def has_root(j: JustificationGraph, x: Fact) -> bool:
    """True iff x labels a node from which every node is reachable."""
    nodes = set(j.nodes())
    if x not in nodes:
        return False
    seen = {x}
    stack = [x]
    while stack:
        v = stack.pop()
        for y in j.children(v):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen == nodes


def restrict_to_reachable(j: JustificationGraph, x: Fact) -> JustificationGraph:
    """The sub-justification spanned by the facts reachable from x."""
    seen = {x}
    stack = [x]
    choice = {}
    while stack:
        v = stack.pop()
        r = j.choice.get(v)
        if r is None:
            continue
        choice[v] = r
        for y in r.body:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return JustificationGraph(choice, j.defined)


# --- reachable-region structure ----------------------------------------------


@dataclass
class _Region:
    order: list[Fact]
    succ: dict[Fact, list[Fact]]
    open_leaves: list[Fact]
    defined_leaves: list[Fact]
    scc_id: dict[Fact, int]
    scc_members: list[list[Fact]]
    cyclic_scc: list[bool]


def _analyze_region(j: JustificationGraph, x: Fact) -> _Region:
    if x not in set(j.nodes()):
        raise FactAbsentError(fact_text(x))
    succ: dict[Fact, list[Fact]] = {}
    open_leaves: list[Fact] = []
    defined_leaves: list[Fact] = []
    seen = {x}
    stack = [x]
    while stack:
        v = stack.pop()
        r = j.choice.get(v)
        if r is None:
            succ[v] = []
            if v in j.defined:
                defined_leaves.append(v)
            else:
                open_leaves.append(v)
            continue
        succ[v] = r.sorted_body()
        for y in succ[v]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    order = sort_facts(seen)
    scc_id, members = _tarjan(order, succ)
    cyclic = []
    for comp in members:
        if len(comp) > 1:
            cyclic.append(True)
        else:
            v = comp[0]
            cyclic.append(v in succ.get(v, []))
    return _Region(
        order,
        succ,
        sort_facts(open_leaves),
        sort_facts(defined_leaves),
        scc_id,
        members,
        cyclic,
    )


def _tarjan(
    order: Iterable[Fact], succ: Mapping[Fact, list[Fact]]
) -> tuple[dict[Fact, int], list[list[Fact]]]:
    """Iterative Tarjan strongly-connected components."""
    index: dict[Fact, int] = {}
    lowlink: dict[Fact, int] = {}
    on_stack: set[Fact] = set()
    stack: list[Fact] = []
    counter = 0
    comp_id: dict[Fact, int] = {}
    comps: list[list[Fact]] = []

    for root in order:
        if root in index:
            continue
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(succ.get(root, [])))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, []))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp, key=fact_key))
                cid = len(comps) - 1
                for w in comp:
                    comp_id[w] = cid
    return comp_id, comps


def _has_cycle_within(region: _Region, allowed: set[Fact]) -> bool:
    """Is there a cycle using only facts from `allowed`?"""
    sub_succ = {v: [y for y in region.succ.get(v, []) if y in allowed] for v in allowed}
    _, comps = _tarjan(sorted(allowed, key=fact_key), sub_succ)
    for comp in comps:
        if len(comp) > 1:
            return True
        v = comp[0]
        if v in sub_succ.get(v, []):
            return True
    return False


def branch_value_facts(
    j: JustificationGraph, x: Fact, be: BranchEvaluation, sgn: SignMap | None = None
) -> frozenset[Fact]:
    """The exact set {B(b) : b a branch of j starting at x}, computed by graph
    analysis rather than branch enumeration."""
    return branch_value_facts_multi(j, x, (be,), sgn)[be.key]


def branch_value_facts_multi(
    j: JustificationGraph,
    x: Fact,
    bes: Iterable[BranchEvaluation],
    sgn: SignMap | None = None,
) -> dict[str, frozenset[Fact]]:
    """branch_value_facts for several built-ins sharing one region analysis."""
    region = _analyze_region(j, x)
    if region.defined_leaves:
        raise NotLocallyCompleteError(
            "defined leaves reachable: "
            + ", ".join(fact_text(v) for v in region.defined_leaves)
        )
    out: dict[str, frozenset[Fact]] = {}
    lazy: dict[str, object] = {}

    def signed_sets():
        if "positive" not in lazy:
            if sgn is None:
                raise ValueError("this branch evaluation needs a sign map")
            internal = {v for v in region.order if v in j.choice}
            lazy["positive"] = {v for v in internal if sgn.is_positive(v)}
            lazy["negative"] = internal - lazy["positive"]
        return lazy["positive"], lazy["negative"]

    def pos_cycle() -> bool:
        if "pos_cycle" not in lazy:
            pos, _ = signed_sets()
            lazy["pos_cycle"] = _has_cycle_within(region, pos)
        return lazy["pos_cycle"]

    def neg_cycle() -> bool:
        if "neg_cycle" not in lazy:
            _, neg = signed_sets()
            lazy["neg_cycle"] = _has_cycle_within(region, neg)
        return lazy["neg_cycle"]

    def mixed() -> bool:
        if "mixed" not in lazy:
            pos, _ = signed_sets()
            lazy["mixed"] = _mixed_scc_exists(region, pos)
        return lazy["mixed"]

    def branching() -> bool:
        if "branching" not in lazy:
            lazy["branching"] = _branching_inside_scc(j, region)
        return lazy["branching"]

    for be in bes:
        key = be.key if be.fn is None else None
        if x not in j.choice:
            out[be.key] = frozenset()  # open start: no branches at all
            continue
        if key == "sp":
            out[key] = frozenset(j.children(x))
        elif key == "kk":
            vals = set(region.open_leaves)
            if any(region.cyclic_scc):
                vals.add(UNKNOWN)
            out[key] = frozenset(vals)
        elif key == "wf":
            vals = set(region.open_leaves)
            if pos_cycle():
                vals.add(FALSE)
            if neg_cycle():
                vals.add(TRUE)
            if mixed():
                vals.add(UNKNOWN)
            out[key] = frozenset(vals)
        elif key == "st":
            if sgn is None:
                raise ValueError("the stable evaluation needs a sign map")
            out[key] = _stable_value_facts(j, x, region, sgn)
        elif key == "ex":
            vals = set(region.open_leaves)
            if pos_cycle():
                vals.add(FALSE)
            if neg_cycle():
                vals.add(TRUE)
            if mixed() or branching():
                vals.add(UNKNOWN)
            out[key] = frozenset(vals)
        else:
            raise EvaluationCapabilityError(
                f"no exact branch analysis for evaluation {be.key!r}"
            )
    return out


def _mixed_scc_exists(region: _Region, positive: set[Fact]) -> bool:
    for comp, cyclic in zip(region.scc_members, region.cyclic_scc):
        if not cyclic:
            continue
        signs = {v in positive for v in comp}
        if len(signs) == 2:
            return True
    return False


def _branching_inside_scc(j: JustificationGraph, region: _Region) -> bool:
    # A forever-branch that is never eventually functional exists exactly when
    # some fact on a cycle has two distinct children inside its own component.
    for v in region.order:
        if v not in j.choice:
            continue
        cid = region.scc_id[v]
        if not region.cyclic_scc[cid]:
            continue
        inside = {y for y in region.succ[v] if region.scc_id.get(y) == cid}
        if len(inside) >= 2:
            return True
    return False


def _stable_value_facts(
    j: JustificationGraph, x: Fact, region: _Region, sgn: SignMap
) -> frozenset[Fact]:
    # Grow the maximal region of sgn(x)-signed facts reachable from x; every
    # branch either leaves it at a first opposite-signed fact, exits at an
    # open leaf, or loops inside it forever.
    start_sign = sgn.sign(x)
    home = {x}
    stack = [x]
    frontier: set[Fact] = set()
    opens: set[Fact] = set()
    while stack:
        v = stack.pop()
        for y in region.succ.get(v, []):
            if y in j.defined:
                if sgn.sign(y) == start_sign:
                    if y not in home:
                        home.add(y)
                        stack.append(y)
                else:
                    frontier.add(y)
            else:
                opens.add(y)
    out: set[Fact] = frontier | opens
    if _has_cycle_within(region, home):
        out.add(FALSE if start_sign == +1 else TRUE)
    return frozenset(out)


def justification_value(
    j: JustificationGraph,
    x: Fact,
    be: BranchEvaluation,
    sgn: SignMap | None,
    interpretation: Interpretation,
) -> TruthValue:
    """Greatest lower bound over the justification's branches from x of the
    interpreted branch values."""
    if be.fn is not None:
        if not be.monotone_selective:
            raise EvaluationCapabilityError(
                "plugin evaluations need the monotone_selective flag for "
                "justification values"
            )
        return _plugin_value(j, x, be, sgn, interpretation)
    facts = branch_value_facts(j, x, be, sgn)
    return truth_glb(interpretation.value(v) for v in facts)


def _plugin_value(j, x, be, sgn, interpretation) -> TruthValue:
    # Positional branch choices inside the justification realize the greatest
    # lower bound for monotone and selective evaluations.
    region = _analyze_region(j, x)
    if region.defined_leaves:
        raise NotLocallyCompleteError(
            "defined leaves reachable: "
            + ", ".join(fact_text(v) for v in region.defined_leaves)
        )
    if x not in j.choice:
        return TruthValue.TRUE
    internal = [v for v in region.order if v in j.choice]
    best = None
    for combo in itertools.product(*(region.succ[v] for v in internal)):
        pick = dict(zip(internal, combo))
        b = _walk_branch(pick, x)
        val = interpretation.value(eval_branch(be, b, sgn))
        best = val if best is None else min(best, val)
        if best == TruthValue.FALSE:
            break
    return TruthValue.TRUE if best is None else best


def _walk_branch(pick: Mapping[Fact, Fact], x: Fact) -> Branch:
    seq = [x]
    seen = {x: 0}
    v = x
    while True:
        if v not in pick:
            return Finite(tuple(seq[:-1]), v)
        v = pick[v]
        if v in seen:
            i = seen[v]
            return Lasso(tuple(seq[:i]), tuple(seq[i:]))
        seen[v] = len(seq)
        seq.append(v)


# --- tree unrolling -----------------------------------------------------------


@dataclass(frozen=True)
class TreeNode:
    fact: Fact
    rule: Rule | None
    children: tuple["TreeNode", ...]


@dataclass(frozen=True)
class JustificationTree:
    """A depth-bounded unfolding of a justification graph."""

    root: TreeNode
    complete: bool

    def branches(self) -> Iterator[tuple[Fact, ...]]:
        def rec(node: TreeNode, path: tuple[Fact, ...]) -> Iterator[tuple[Fact, ...]]:
            path = path + (node.fact,)
            if not node.children:
                yield path
                return
            for c in node.children:
                yield from rec(c, path)

        yield from rec(self.root, ())


def unroll(j: JustificationGraph, x: Fact, depth: int) -> JustificationTree:
    """Unfold the justification from x to the given depth.  The result is
    complete iff no defined fact was truncated at the depth limit."""
    truncated = False

    def build(v: Fact, d: int) -> TreeNode:
        nonlocal truncated
        r = j.choice.get(v)
        if r is None:
            if v in j.defined:
                truncated = True
            return TreeNode(v, None, ())
        if d == 0:
            truncated = True
            return TreeNode(v, None, ())
        return TreeNode(v, r, tuple(build(y, d - 1) for y in r.sorted_body()))

    root = build(x, depth)
    return JustificationTree(root, complete=not truncated)


def tree_value(
    tree: JustificationTree,
    be: BranchEvaluation,
    sgn: SignMap | None,
    interpretation: Interpretation,
) -> TruthValue:
    """Value of a complete finite tree: glb over its root-to-leaf branches."""
    if not tree.complete:
        raise NotLocallyCompleteError("tree was truncated; its value is undefined")
    values = []
    for path in tree.branches():
        if len(path) < 2:
            continue  # open root: no branches
        values.append(
            interpretation.value(eval_branch(be, Finite(path[:-1], path[-1]), sgn))
        )
    return truth_glb(values)


# --- export -------------------------------------------------------------------


def justification_dot(j: JustificationGraph, root: Fact | None = None) -> str:
    """DOT export with deterministic node order; the root is double-circled."""
    lines = ["digraph justification {"]
    for v in j.nodes():
        shape = "doublecircle" if v == root else "ellipse"
        lines.append(f'  "{fact_text(v)}" [shape={shape}];')
    for a, b in j.edges():
        lines.append(f'  "{fact_text(a)}" -> "{fact_text(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
