"""Parser behaviour and the four classical oracles."""

import pytest

from justsem.core import (
    FALSE,
    TRUE,
    Interpretation,
    Literal,
    TruthValue,
    all_interpretations,
)
from justsem.frame import Rule
from justsem.lp import (
    LpSyntaxError,
    fitting_lfp,
    parse_program,
    program_to_frame,
    stable_models_total,
    supported_models,
    well_founded_model,
)

from _corpus import LEADING, NIKO, oracle_corpus

F, U, T = TruthValue.FALSE, TruthValue.UNKNOWN, TruthValue.TRUE


def interp(**kw):
    return Interpretation({k: TruthValue.from_letter(v) for k, v in kw.items()})


class TestParser:
    def test_leading_program(self):
        program = parse_program(LEADING)
        assert len(program.rules) == 3
        assert program.open_names() == {"r"}
        assert program.defined_names() == {"p", "q"}

    def test_fact_rule_has_empty_body(self):
        program = parse_program("a.")
        assert program.rules[0].body == ()

    def test_dangling_not_is_a_syntax_error(self):
        with pytest.raises(LpSyntaxError) as exc:
            parse_program("p :- not.")
        assert exc.value.line == 1
        assert exc.value.column == 9

    def test_error_positions_cover_later_lines(self):
        with pytest.raises(LpSyntaxError) as exc:
            parse_program("a :- b.\n% fine\nc :- Not d.\n")
        assert exc.value.line == 3

    def test_duplicate_directive_rejected(self):
        with pytest.raises(LpSyntaxError) as exc:
            parse_program("#open r.\n#open r.\n")
        assert "duplicate" in str(exc.value)

    def test_open_head_conflict(self):
        with pytest.raises(LpSyntaxError):
            parse_program("#open a.\na :- b.")

    def test_comments_and_whitespace(self):
        program = parse_program("% nothing\n  a :- b , not c .  % tail\n")
        assert program.rules[0] == parse_program("a :- b, not c.").rules[0]

    def test_body_only_atoms_default_to_open(self):
        program = parse_program("a :- b.")
        assert program.open_names() == {"b"}

    @pytest.mark.parametrize("text", [LEADING, NIKO, "a.\n", "#open r.\nb :- not r.\n"])
    def test_print_parse_round_trip(self, text):
        program = parse_program(text)
        assert parse_program(program.text()) == program

    def test_round_trip_on_corpus(self):
        for text in oracle_corpus():
            program = parse_program(text)
            assert parse_program(program.text()) == program


class TestProgramToFrame:
    def test_fact_becomes_logical_true_body(self):
        fr = program_to_frame(parse_program("a."))
        a, na = Literal("a"), Literal("a", False)
        assert fr.rules_for(a) == (Rule(a, frozenset([TRUE])),)
        assert fr.rules_for(na) == (Rule(na, frozenset([FALSE])),)

    def test_ruleless_defined_atom_gets_false_body(self):
        fr = program_to_frame(parse_program("#defined a."))
        a, na = Literal("a"), Literal("a", False)
        assert fr.rules_for(a) == (Rule(a, frozenset([FALSE])),)
        assert fr.rules_for(na) == (Rule(na, frozenset([TRUE])),)

    def test_leading_frame_game_states(self):
        from justsem.game import build_game_graph

        fr = program_to_frame(parse_program(LEADING))
        game = build_game_graph(fr)
        assert len(game.non_isolated_fact_states()) == 6
        assert len(game.rule_states) == 5


class TestFittingLfp:
    def test_two_cycle_is_unknown(self):
        program = parse_program("p :- not q.\nq :- not p.")
        assert fitting_lfp(program, {}) == interp(p="u", q="u")

    def test_fact(self):
        assert fitting_lfp(parse_program("a."), {}) == interp(a="t")

    def test_leading_with_true_open(self):
        program = parse_program(LEADING)
        got = fitting_lfp(program, {"r": T})
        assert got == interp(p="t", q="f", r="t")

    def test_result_is_fixpoint_and_knowledge_minimal(self):
        # lfp is a fixpoint and lies knowledge-below every other fixpoint
        for text in oracle_corpus():
            program = parse_program(text)
            for opens_interp in all_interpretations(sorted(program.open_names())):
                opens = {n: opens_interp.value(Literal(n)) for n in program.open_names()}
                lfp = fitting_lfp(program, opens)
                fixpoints = supported_models(program, opens)
                assert lfp in fixpoints
                for other in fixpoints:
                    assert all(
                        lfp.value(Literal(n)) is TruthValue.UNKNOWN
                        or lfp.value(Literal(n)) == other.value(Literal(n))
                        for n in program.defined_names()
                    ), (text, other)


class TestWellFounded:
    def test_two_cycle(self):
        program = parse_program("p :- not q.\nq :- not p.")
        assert well_founded_model(program, {}) == interp(p="u", q="u")

    def test_leading_with_true_open(self):
        program = parse_program(LEADING)
        assert well_founded_model(program, {"r": T}) == interp(p="t", q="f", r="t")

    def test_positive_loop_collapses_to_false(self):
        program = parse_program("a :- b.\nb :- a.")
        assert well_founded_model(program, {}) == interp(a="f", b="f")

    def test_knowledge_above_fitting(self):
        for text in oracle_corpus():
            program = parse_program(text)
            for opens_interp in all_interpretations(sorted(program.open_names())):
                opens = {n: opens_interp.value(Literal(n)) for n in program.open_names()}
                lfp = fitting_lfp(program, opens)
                wf = well_founded_model(program, opens)
                for name in program.defined_names():
                    v = lfp.value(Literal(name))
                    if v is not TruthValue.UNKNOWN:
                        assert wf.value(Literal(name)) == v, (text, name)


class TestStableModels:
    def test_two_cycle(self):
        program = parse_program("p :- not q.\nq :- not p.")
        assert stable_models_total(program, {}) == {
            interp(p="t", q="f"),
            interp(p="f", q="t"),
        }

    def test_odd_loop_has_no_stable_model(self):
        assert stable_models_total(parse_program("a :- not a."), {}) == set()

    def test_fact(self):
        assert stable_models_total(parse_program("a."), {}) == {interp(a="t")}

    def test_stable_models_are_supported(self):
        for text in oracle_corpus():
            program = parse_program(text)
            for opens_interp in all_interpretations(sorted(program.open_names())):
                opens = {n: opens_interp.value(Literal(n)) for n in program.open_names()}
                if any(v is TruthValue.UNKNOWN for v in opens.values()):
                    continue
                stable = stable_models_total(program, opens)
                supported = supported_models(program, opens)
                assert stable <= supported, text


class TestSupportedModels:
    def test_self_loop_has_three_fixpoints(self):
        program = parse_program("p :- p.")
        assert supported_models(program, {}) == {
            interp(p="t"),
            interp(p="f"),
            interp(p="u"),
        }

    def test_fact_has_one(self):
        assert supported_models(parse_program("a."), {}) == {interp(a="t")}

    def test_two_cycle_has_three(self):
        program = parse_program("p :- not q.\nq :- not p.")
        assert supported_models(program, {}) == {
            interp(p="t", q="f"),
            interp(p="f", q="t"),
            interp(p="u", q="u"),
        }
