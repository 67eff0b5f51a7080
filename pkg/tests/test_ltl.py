"""ltl module: parser, printer, finite-trace semantics, transforms."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groundsmith import ltl
from groundsmith.ltl import (
    FALSE,
    TRUE,
    And,
    Atom,
    EmptyInput,
    EmptyTrace,
    Finally,
    Globally,
    LtlSyntaxError,
    Not,
    Or,
    Until,
    atoms,
    canonical,
    evaluate_trace,
    format_ltl,
    normalize_trace,
    parse_ltl,
    simplify,
    substitute_atoms,
)


def t(*steps):
    return normalize_trace(steps)


class TestParse:
    def test_navigation_example(self):
        f = parse_ltl("F ( CVS & F ( park ) )")
        assert f == Finally(And(Atom("CVS"), Finally(Atom("park"))))

    def test_single_atom(self):
        assert parse_ltl("p") == Atom("p")

    def test_ship_shape(self):
        f = parse_ltl("F ( cylinder_in_box & F ( cylinder_in_box & box_in_bedroom ) )")
        phi = Atom("cylinder_in_box")
        psi = Atom("box_in_bedroom")
        assert f == Finally(And(phi, Finally(And(phi, psi))))

    def test_precedence_unary_tightest(self):
        assert parse_ltl("! a & F b") == And(Not(Atom("a")), Finally(Atom("b")))

    def test_precedence_until_over_and(self):
        assert parse_ltl("a U b & c") == And(Until(Atom("a"), Atom("b")), Atom("c"))

    def test_precedence_and_over_or(self):
        assert parse_ltl("a | b & c") == Or(Atom("a"), And(Atom("b"), Atom("c")))

    def test_left_associativity(self):
        assert parse_ltl("a U b U c") == Until(Until(Atom("a"), Atom("b")), Atom("c"))

    def test_parentheses_override(self):
        assert parse_ltl("a & ( b | c )") == And(Atom("a"), Or(Atom("b"), Atom("c")))

    def test_constants(self):
        assert parse_ltl("true") == TRUE
        assert parse_ltl("false") == FALSE

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            parse_ltl("   ")

    def test_syntax_error_carries_position(self):
        with pytest.raises(LtlSyntaxError) as err:
            parse_ltl("a & )")
        assert err.value.position == 2

    def test_trailing_tokens_rejected(self):
        with pytest.raises(LtlSyntaxError):
            parse_ltl("a b")

    def test_unbalanced_paren(self):
        with pytest.raises(LtlSyntaxError):
            parse_ltl("( a & b")


class TestFormat:
    def test_atom(self):
        assert format_ltl(Atom("p")) == "p"

    def test_binary_canonical_parens(self):
        assert format_ltl(And(Atom("a"), Atom("b"))) == "( a & b )"

    def test_unary_wraps_binary_once(self):
        f = Finally(And(Atom("CVS"), Finally(Atom("park"))))
        assert format_ltl(f) == "F ( CVS & F ( park ) )"

    def test_nested_binary(self):
        f = Or(And(Atom("a"), Atom("b")), Atom("c"))
        assert format_ltl(f) == "( ( a & b ) | c )"
        assert parse_ltl(format_ltl(f)) == f


def formulas(max_depth=6, atom_pool=("a", "b", "c", "d", "e")):
    leaf = st.one_of(
        st.sampled_from([Atom(a) for a in atom_pool]),
        st.just(TRUE),
        st.just(FALSE),
    )

    def extend(children):
        return st.one_of(
            st.builds(Not, children),
            st.builds(Finally, children),
            st.builds(Globally, children),
            st.builds(And, children, children),
            st.builds(Or, children, children),
            st.builds(Until, children, children),
        )

    return st.recursive(leaf, extend, max_leaves=2 ** max_depth)


def traces(atom_pool=("a", "b", "c"), max_len=5):
    step = st.frozensets(st.sampled_from(atom_pool))
    return st.lists(step, min_size=1, max_size=max_len).map(tuple)


class TestRoundTrip:
    @settings(max_examples=300, deadline=None)
    @given(formulas())
    def test_parse_format_identity(self, f):
        assert parse_ltl(format_ltl(f)) == f


class TestEvaluate:
    def test_finally_positive(self):
        assert evaluate_trace(Finally(Atom("p")), t([], ["p"]))

    def test_globally_negative(self):
        assert not evaluate_trace(Globally(Atom("p")), t(["p"], []))

    def test_ordering_matters(self):
        f = Finally(And(Atom("a"), Finally(Atom("b"))))
        assert evaluate_trace(f, t(["a"], ["b"]))
        assert not evaluate_trace(f, t(["b"], ["a"]))

    def test_until(self):
        f = Until(Atom("a"), Atom("b"))
        assert evaluate_trace(f, t(["a"], ["a"], ["b"]))
        assert not evaluate_trace(f, t(["a"], [], ["b"]))
        assert evaluate_trace(f, t(["b"]))

    def test_empty_trace(self):
        with pytest.raises(EmptyTrace):
            evaluate_trace(Atom("p"), t())

    def test_exhaustive_cross_check_small(self):
        # brute-force recursive reference on every 2-step trace over {a, b}
        import itertools

        f = Finally(And(Atom("a"), Finally(Atom("b"))))
        steps = [frozenset(s) for s in
                 (set(), {"a"}, {"b"}, {"a", "b"})]
        for s0, s1 in itertools.product(steps, repeat=2):
            trace = (s0, s1)
            expected = any(
                "a" in trace[i] and any("b" in trace[j] for j in range(i, 2))
                for i in range(2)
            )
            assert evaluate_trace(f, trace) == expected


class TestSubstitute:
    def test_identity_map(self):
        f = Atom("a")
        assert substitute_atoms(f, {"a": Atom("a")}) == f

    def test_partial_map(self):
        f = Finally(And(Atom("a"), Atom("b")))
        out = substitute_atoms(f, {"a": Atom("x")})
        assert out == Finally(And(Atom("x"), Atom("b")))

    @settings(max_examples=200, deadline=None)
    @given(formulas())
    def test_identity_property(self, f):
        mapping = {name: Atom(name) for name in atoms(f)}
        assert substitute_atoms(f, mapping) == f

    @settings(max_examples=200, deadline=None)
    @given(formulas())
    def test_atoms_after_substitution(self, f):
        mapping = {name: And(Atom(name + "_x"), Atom("shared")) for name in atoms(f)}
        out = substitute_atoms(f, mapping)
        expected = set()
        for name in atoms(f):
            expected |= {name + "_x", "shared"}
        assert atoms(out) == expected


class TestAtoms:
    def test_single(self):
        assert atoms(Atom("p")) == {"p"}

    def test_navigation(self):
        assert atoms(parse_ltl("F ( CVS & F ( park ) )")) == {"CVS", "park"}

    def test_ship_duplicate_counted_once(self):
        f = parse_ltl("F ( cylinder_in_box & F ( cylinder_in_box & box_in_bedroom ) )")
        assert atoms(f) == {"cylinder_in_box", "box_in_bedroom"}


class TestSimplify:
    def test_and_true(self):
        assert simplify(And(TRUE, Atom("p"))) == Atom("p")

    def test_or_true(self):
        assert simplify(Or(TRUE, Finally(Atom("q")))) == TRUE

    def test_two_rule_applications(self):
        assert simplify(Or(FALSE, And(Atom("a"), TRUE))) == Atom("a")

    def test_idempotence_rules(self):
        assert simplify(And(Atom("a"), Atom("a"))) == Atom("a")
        assert simplify(Or(Atom("a"), Atom("a"))) == Atom("a")

    def test_not_constants(self):
        assert simplify(Not(TRUE)) == FALSE
        assert simplify(Not(FALSE)) == TRUE

    def test_temporal_untouched(self):
        f = Finally(TRUE)
        assert simplify(f) == f

    @settings(max_examples=200, deadline=None)
    @given(formulas(atom_pool=("a", "b", "c")), traces())
    def test_soundness(self, f, trace):
        assert evaluate_trace(f, trace) == evaluate_trace(simplify(f), trace)

    @settings(max_examples=200, deadline=None)
    @given(formulas(atom_pool=("a", "b", "c")), traces())
    def test_canonical_soundness(self, f, trace):
        assert evaluate_trace(f, trace) == evaluate_trace(canonical(f), trace)

    def test_canonical_flattens_and_dedups(self):
        f = Or(Atom("a"), Or(Atom("b"), Atom("a")))
        g = Or(Or(Atom("a"), Atom("b")), Atom("b"))
        assert canonical(f) == canonical(g)
