"""Frame validation, selection functions, complementation, superset closure,
and the frame text format."""

import itertools

import pytest

from justsem.core import (
    FALSE,
    TRUE,
    UNKNOWN,
    Interpretation,
    Literal,
    all_interpretations,
    complement,
)
from justsem.frame import (
    Frame,
    FrameError,
    Rule,
    RuleBudgetError,
    UndefinedFactError,
    complementation,
    format_frame,
    is_complementary,
    parse_frame,
    selection_functions,
    superset_close,
    validate_frame,
)
from justsem.lp import parse_program, program_to_frame
from justsem.semantics import JustificationSystem, supported_values_all
from justsem.branches import BUILTINS

from _corpus import LEADING, NIKO

A, B, C = Literal("a"), Literal("b"), Literal("c")
NA, NB, NC = Literal("a", False), Literal("b", False), Literal("c", False)


def pair(*names):
    out = []
    for n in names:
        out.append(Literal(n))
        out.append(Literal(n, False))
    return out


class TestValidation:
    def test_not_complement_closed(self):
        fr = Frame([A], [Rule(A, frozenset([B]))])
        codes = {d.code for d in validate_frame(fr)}
        assert "not-complement-closed" in codes

    def test_empty_body_rejected_at_rule_level(self):
        # Frame bodies are nonempty by the Rule contract upstream; a frame
        # carrying one anyway is reported, not thrown.
        fr = Frame(pair("a"), [Rule(A, frozenset()), Rule(NA, frozenset([FALSE]))])
        codes = {d.code for d in validate_frame(fr)}
        assert "empty-body" in codes

    def test_logical_fact_cannot_be_defined(self):
        fr = Frame([TRUE, FALSE], [])
        codes = {d.code for d in validate_frame(fr)}
        assert "logical-defined" in codes

    def test_missing_rules_reported(self):
        fr = Frame(pair("a"), [Rule(A, frozenset([B]))])
        codes = {d.code for d in validate_frame(fr)}
        assert "no-rules" in codes

    def test_leading_frame_is_valid_after_complementation(self):
        fr = program_to_frame(parse_program(LEADING))
        assert validate_frame(fr) == []

    def test_head_must_be_defined(self):
        fr = Frame(pair("a"), [Rule(A, frozenset([B])), Rule(NA, frozenset([NB])),
                               Rule(B, frozenset([A]))])
        codes = {d.code for d in validate_frame(fr)}
        assert "head-not-defined" in codes


class TestSelectionFunctions:
    def test_single_choice_over_two_singleton_rules(self):
        fr = program_to_frame(parse_program(LEADING))
        p = Literal("p")
        sels = list(selection_functions(fr, p))
        assert len(sels) == 1
        assert sels[0].image == frozenset([Literal("q", False), Literal("r")])

    def test_two_element_body_gives_two_selections(self):
        fr = Frame(pair("a"), [Rule(A, frozenset([B, C])), Rule(NA, frozenset([NB]))])
        sels = list(selection_functions(fr, A))
        assert [s.image for s in sels] == [frozenset([B]), frozenset([C])]

    def test_niko_complement_selection_count_is_body_product(self):
        fr = program_to_frame(parse_program(NIKO))
        rules = fr.rules_for(NA)
        expected = 1
        for r in rules:
            expected *= len(r.body)
        assert len(list(selection_functions(fr, NA))) == expected

    def test_undefined_fact_raises(self):
        fr = program_to_frame(parse_program(NIKO))
        with pytest.raises(UndefinedFactError):
            list(selection_functions(fr, Literal("zz")))


class TestComplementation:
    def test_niko_adds_announced_rules(self):
        base = Frame(
            pair("a", "b", "c"),
            [
                Rule(A, frozenset([B])),
                Rule(A, frozenset([C])),
                Rule(B, frozenset([A])),
                Rule(C, frozenset([A])),
            ],
        )
        result = complementation(base)
        added = set(result.rules) - set(base.rules)
        assert added == {
            Rule(NA, frozenset([NB, NC])),
            Rule(NB, frozenset([NA])),
            Rule(NC, frozenset([NA])),
        }

    def test_leading_adds_announced_rules(self):
        p, q, r = Literal("p"), Literal("q"), Literal("r")
        np_, nq, nr = complement(p), complement(q), complement(r)
        base = Frame(
            pair("p", "q"),
            [
                Rule(p, frozenset([nq])),
                Rule(p, frozenset([r])),
                Rule(q, frozenset([np_])),
            ],
        )
        result = complementation(base)
        added = set(result.rules) - set(base.rules)
        assert added == {
            Rule(np_, frozenset([q, nr])),
            Rule(nq, frozenset([p])),
        }

    def test_fixed_point_after_dedup(self):
        fr = program_to_frame(parse_program(NIKO))
        assert complementation(fr).rules == fr.rules

    def test_inflationary_and_idempotent_with_closure(self):
        # exhaustive over single-rule programs on two atoms
        literals = [A, B, NA, NB]
        for body in itertools.chain(
            itertools.combinations(literals, 1), itertools.combinations(literals, 2)
        ):
            fr = Frame(pair("a", "b"), [Rule(A, frozenset(body)), Rule(B, frozenset([A]))])
            comp = complementation(fr)
            assert set(comp.rules) >= set(fr.rules)
            universe = set(comp.all_facts())
            closed = superset_close(comp, universe)
            again = superset_close(complementation(closed), universe)
            assert set(again.rules) == set(closed.rules)

    def test_complement_rule_count_equals_distinct_images(self):
        fr = program_to_frame(parse_program(NIKO))
        for x in (A, B, C):
            images = {s.image for s in selection_functions(fr, x)}
            assert len(fr.rules_for(complement(x))) == len(images)


class TestComplementarity:
    def test_one_sided_frame_is_not_complementary(self):
        fr = Frame(pair("a", "b"), [Rule(A, frozenset([B])), Rule(B, frozenset([A])),
                                    Rule(NA, frozenset([NB])), Rule(NB, frozenset([NA]))])
        assert is_complementary(fr)
        partial = Frame(pair("a"), [Rule(A, frozenset([B]))])
        assert not is_complementary(partial)

    def test_closure_of_one_rule_program_is_complementary(self):
        fr = program_to_frame(parse_program("a :- b.\n#open b.\n"))
        closed = superset_close(fr, set(fr.all_facts()))
        assert is_complementary(closed)

    def test_niko_without_closure_matches_independent_rederivation(self):
        fr = program_to_frame(parse_program(NIKO))
        # independent re-derivation of the complement rule set
        rules = set(fr.rules)
        derived = set()
        for x in fr.defined:
            bodies = [r.sorted_body() for r in fr.rules_for(x)]
            for combo in itertools.product(*bodies):
                derived.add(
                    Rule(complement(x), frozenset(complement(y) for y in combo))
                )
        assert is_complementary(fr) == (derived <= rules)


class TestSupersetClose:
    def test_adds_single_superset(self):
        fr = Frame(pair("a"), [Rule(A, frozenset([B])), Rule(NA, frozenset([NB]))])
        closed = superset_close(fr, {B, C, NB})
        assert Rule(A, frozenset([B, C])) in closed.rules

    def test_noop_on_tight_universe(self):
        fr = program_to_frame(parse_program(NIKO))
        occurring = {y for r in fr.rules for y in r.body}
        closed = superset_close(fr, occurring | set())
        extra = set(closed.rules) - set(fr.rules)
        # the universe already occurs in bodies, so only cross-body supersets appear
        for r in extra:
            assert any(orig.body < r.body for orig in fr.rules_for(r.head))

    def test_universe_must_cover_occurring_facts(self):
        fr = program_to_frame(parse_program(NIKO))
        with pytest.raises(ValueError):
            superset_close(fr, {A})

    def test_budget_guard(self):
        fr = program_to_frame(parse_program(NIKO))
        with pytest.raises(RuleBudgetError):
            superset_close(fr, set(fr.all_facts()), rule_budget=2)

    def test_superset_rules_never_change_supported_values(self):
        # The property that justifies skipping closure in normal operation.
        # Adding any single superset-body rule preserves every supported
        # value; full-closure invariance follows one addition at a time.
        programs = [
            "a :- not b.\nb :- not a.\n",
            "a :- b.\nb :- a.\n",
            "a :- not a.\n",
            NIKO,
        ]
        for text in programs:
            fr = program_to_frame(parse_program(text))
            extras = set(fr.all_facts())
            interps = list(all_interpretations(sorted(fr.names())))
            baselines = {}
            for key in ("sp", "kk", "wf", "st", "ex"):
                js = JustificationSystem.from_frame(fr, BUILTINS[key])
                baselines[key] = [supported_values_all(js, i) for i in interps]
            for rule in fr.rules:
                for extra in sorted(extras - rule.body, key=repr):
                    widened = Frame(
                        fr.defined,
                        list(fr.rules) + [Rule(rule.head, rule.body | {extra})],
                    )
                    for key in ("sp", "kk", "wf", "st", "ex"):
                        jsw = JustificationSystem.from_frame(widened, BUILTINS[key])
                        got = [supported_values_all(jsw, i) for i in interps]
                        assert got == baselines[key], (text, key, rule.label, extra)


class TestTextFormat:
    def test_round_trip(self):
        fr = program_to_frame(parse_program(LEADING))
        assert parse_frame(format_frame(fr)) == fr

    def test_round_trip_niko(self):
        fr = program_to_frame(parse_program(NIKO))
        assert parse_frame(format_frame(fr)) == fr

    def test_parse_rejects_empty_body(self):
        with pytest.raises(ValueError):
            parse_frame("#defined a\na <- .\n")

    def test_parse_requires_terminator(self):
        with pytest.raises(ValueError):
            parse_frame("#defined a\na <- b\n")
