"""Lattice laws, the complement involution, interpretations, and sign maps."""

import pytest
from hypothesis import given, strategies as st

from justsem.core import (
    FALSE,
    TRUE,
    UNKNOWN,
    Fact,
    Interpretation,
    Literal,
    Logical,
    SignMap,
    SignMapError,
    TruthValue,
    UnknownNameError,
    all_interpretations,
    complement,
    fact_text,
    parse_fact,
    truth_glb,
    truth_lub,
)

truth_values = st.sampled_from(list(TruthValue))

facts = st.one_of(
    st.sampled_from([TRUE, FALSE, UNKNOWN]),
    st.builds(
        Literal,
        st.sampled_from(["a", "b", "c", "p", "q"]),
        st.booleans(),
    ),
)


class TestTruthLattice:
    def test_order(self):
        assert TruthValue.FALSE < TruthValue.UNKNOWN < TruthValue.TRUE

    def test_complement_values(self):
        assert TruthValue.TRUE.complement() is TruthValue.FALSE
        assert TruthValue.FALSE.complement() is TruthValue.TRUE
        assert TruthValue.UNKNOWN.complement() is TruthValue.UNKNOWN

    def test_empty_meet_is_top_and_empty_join_is_bottom(self):
        assert truth_glb([]) is TruthValue.TRUE
        assert truth_lub([]) is TruthValue.FALSE

    @pytest.mark.parametrize(
        "values,expected",
        [
            ({TruthValue.TRUE, TruthValue.UNKNOWN}, TruthValue.UNKNOWN),
            ({TruthValue.TRUE, TruthValue.FALSE, TruthValue.UNKNOWN}, TruthValue.FALSE),
        ],
    )
    def test_glb_examples(self, values, expected):
        assert truth_glb(values) is expected

    @pytest.mark.parametrize(
        "values,expected",
        [
            ({TruthValue.FALSE, TruthValue.UNKNOWN}, TruthValue.UNKNOWN),
            ({TruthValue.FALSE, TruthValue.TRUE}, TruthValue.TRUE),
        ],
    )
    def test_lub_examples(self, values, expected):
        assert truth_lub(values) is expected

    @given(st.lists(truth_values, min_size=1), st.lists(truth_values, min_size=1))
    def test_glb_lub_agree_with_min_max_semantics(self, xs, ys):
        assert truth_glb(xs + ys) == min(truth_glb(xs), truth_glb(ys))
        assert truth_lub(xs + ys) == max(truth_lub(xs), truth_lub(ys))

    @given(st.lists(truth_values, min_size=1))
    def test_glb_below_lub(self, xs):
        assert truth_glb(xs) <= truth_lub(xs)

    @given(truth_values)
    def test_de_morgan(self, v):
        assert v.complement().complement() is v


class TestFacts:
    @given(facts)
    def test_involution(self, x):
        assert complement(complement(x)) == x

    @given(facts)
    def test_only_unknown_is_self_complementary(self, x):
        if complement(x) == x:
            assert x == UNKNOWN

    def test_paper_constants(self):
        assert complement(TRUE) == FALSE
        assert complement(UNKNOWN) == UNKNOWN
        assert complement(Literal("a")) == Literal("a", False)
        assert complement(complement(Literal("a", False))) == Literal("a", False)

    @given(facts)
    def test_text_round_trip(self, x):
        assert parse_fact(fact_text(x)) == x

    @pytest.mark.parametrize("bad", ["A", "1a", "~", "#x", "a-b"])
    def test_rejects_bad_fact_text(self, bad):
        with pytest.raises(ValueError):
            parse_fact(bad)


class TestInterpretation:
    def test_negative_lookup_negates(self):
        interp = Interpretation({"a": TruthValue.TRUE})
        assert interp.value(Literal("a", False)) is TruthValue.FALSE

    def test_unknown_is_self_complementary_under_lookup(self):
        interp = Interpretation({"a": TruthValue.UNKNOWN})
        assert interp.value(Literal("a", False)) is TruthValue.UNKNOWN

    def test_logical_facts_evaluate_to_themselves(self):
        interp = Interpretation({})
        assert interp.value(FALSE) is TruthValue.FALSE
        assert interp.value(TRUE) is TruthValue.TRUE

    def test_missing_name_raises(self):
        with pytest.raises(UnknownNameError):
            Interpretation({}).value(Literal("zz"))

    @given(facts, truth_values, truth_values)
    def test_complement_symmetry_is_structural(self, x, va, vb):
        interp = Interpretation({"a": va, "b": vb, "c": va, "p": vb, "q": va})
        assert interp.value(complement(x)) == interp.value(x).complement()

    def test_all_interpretations_cardinality_and_determinism(self):
        first = list(all_interpretations(["x", "y"]))
        assert len(first) == 9
        assert first == list(all_interpretations(["y", "x"]))


class TestSignMap:
    def test_default_signs_by_polarity(self):
        defined = [Literal("a"), Literal("a", False)]
        sgn = SignMap.default(defined)
        assert sgn.sign(Literal("a")) == +1
        assert sgn.sign(Literal("a", False)) == -1

    def test_complement_pairs_get_opposite_signs(self):
        # exhaustive over the two-pair default map
        defined = [Literal(n, p) for n in "ab" for p in (True, False)]
        sgn = SignMap.default(defined)
        for x in defined:
            assert sgn.sign(x) != sgn.sign(complement(x))

    def test_custom_map_must_alternate(self):
        with pytest.raises(SignMapError):
            SignMap({Literal("a"): +1, Literal("a", False): +1})

    def test_custom_map_accepted(self):
        sgn = SignMap({Literal("a"): -1, Literal("a", False): +1})
        assert not sgn.is_positive(Literal("a"))

    def test_unsigned_fact_raises(self):
        sgn = SignMap.default([Literal("a"), Literal("a", False)])
        with pytest.raises(SignMapError):
            sgn.sign(Literal("b"))
