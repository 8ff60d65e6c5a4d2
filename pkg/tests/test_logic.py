import pytest
from hypothesis import given, settings, strategies as st

from mlncount import (
    And, Atom, Domain, Eq, Exists, ForAll, Iff, Implies, Not, Or,
    PossibleWorld, Predicate, TRUE, Var, count_true_groundings, evaluate,
    free_variables, groundings, parse_formula, pretty,
)
from mlncount.errors import (
    FormulaSyntaxError, TooManyVariablesError, VocabularyError,
)

X, Y, Z = Var("x"), Var("y"), Var("z")
SMOKES = Predicate("smokes", 1)
FRIENDS = Predicate("friends", 2)
P = Predicate("p", 1)
F = Predicate("f", 2)
VOCAB = [SMOKES, FRIENDS, P, F]


def world(*atoms):
    return PossibleWorld(frozenset(atoms))


class TestParse:
    def test_smokers_formula(self):
        f = parse_formula("smokes(x) & friends(x,y) -> smokes(y)", VOCAB)
        assert isinstance(f, Implies)
        assert isinstance(f.left, And)
        assert free_variables(f) == {X, Y}

    def test_quantified_sentence(self):
        f = parse_formula("forall x exists y f(x,y)", VOCAB)
        assert isinstance(f, ForAll)
        assert isinstance(f.body, Exists)
        assert free_variables(f) == set()

    def test_three_variables_rejected(self):
        with pytest.raises(TooManyVariablesError):
            parse_formula("f(x,y) & f(y,z)", VOCAB)

    def test_arity_mismatch_rejected(self):
        with pytest.raises(VocabularyError):
            parse_formula("p(x,y)", VOCAB)

    def test_undeclared_predicate(self):
        with pytest.raises(VocabularyError):
            parse_formula("q(x)", VOCAB)

    def test_syntax_error_has_position(self):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_formula("p(x) &", VOCAB)
        assert "column" in str(err.value) or "end of formula" in str(err.value)

    def test_named_constants_rejected(self):
        with pytest.raises(FormulaSyntaxError):
            parse_formula("p(Alice)", VOCAB)

    def test_integer_constants_accepted(self):
        f = parse_formula("f(0,1)", VOCAB)
        assert f == Atom(F, (0, 1))

    def test_precedence(self):
        f = parse_formula("!p(x) & p(y) | p(x) -> p(y) <-> p(x)", VOCAB)
        assert isinstance(f, Iff)
        assert isinstance(f.left, Implies)
        assert isinstance(f.left.left, Or)
        assert isinstance(f.left.left.left, And)
        assert isinstance(f.left.left.left.left, Not)

    def test_implies_right_associative(self):
        f = parse_formula("p(x) -> p(y) -> p(x)", VOCAB)
        assert isinstance(f, Implies)
        assert isinstance(f.right, Implies)


class TestFreeVariables:
    def test_open_atom(self):
        assert free_variables(Atom(F, (X, Y))) == {X, Y}

    def test_closed_sentence(self):
        f = ForAll(X, Exists(Y, Atom(F, (X, Y))))
        assert free_variables(f) == set()

    def test_repeated_variable(self):
        assert free_variables(Atom(F, (X, X))) == {X}


class TestGroundings:
    def test_two_variables(self):
        assert len(groundings(Atom(F, (X, Y)), Domain(3))) == 9

    def test_reflexive(self):
        assert len(groundings(Atom(F, (X, X)), Domain(3))) == 3

    def test_sentence_single_grounding(self):
        f = ForAll(X, Atom(P, (X,)))
        assert groundings(f, Domain(5)) == [f]

    def test_count_matches_domain_power(self):
        for f in (Atom(P, (X,)), Atom(F, (X, Y)), And(Atom(P, (X,)), Atom(P, (Y,)))):
            for n in (1, 2, 4):
                expect = n ** len(free_variables(f))
                assert len(groundings(f, Domain(n))) == expect

    def test_deterministic_lexicographic_order(self):
        gs = groundings(Atom(F, (X, Y)), Domain(2))
        assert gs == [Atom(F, (0, 0)), Atom(F, (0, 1)),
                      Atom(F, (1, 0)), Atom(F, (1, 1))]


class TestEvaluate:
    def test_ground_atom(self):
        assert evaluate(Atom(F, (0, 1)), world(Atom(F, (0, 1))), Domain(2))

    def test_forall_exists_true(self):
        f = ForAll(X, Exists(Y, Atom(F, (X, Y))))
        w = world(Atom(F, (0, 0)), Atom(F, (1, 0)))
        assert evaluate(f, w, Domain(2))

    def test_forall_exists_false(self):
        f = ForAll(X, Exists(Y, Atom(F, (X, Y))))
        assert not evaluate(f, world(Atom(F, (0, 0))), Domain(2))

    def test_equality(self):
        assert evaluate(Eq(1, 1), world(), Domain(2))
        assert not evaluate(Eq(0, 1), world(), Domain(2))

    def test_three_variable_evaluation(self):
        # functionality clause: forall x,y,z (f(x,y) & f(x,z) -> y = z)
        f = ForAll(X, ForAll(Y, ForAll(Z, Implies(
            And(Atom(F, (X, Y)), Atom(F, (X, Z))), Eq(Y, Z)))))
        assert evaluate(f, world(Atom(F, (0, 1)), Atom(F, (1, 0))), Domain(2))
        assert not evaluate(f, world(Atom(F, (0, 0)), Atom(F, (0, 1))), Domain(2))


class TestCountTrueGroundings:
    def test_binary(self):
        w = world(Atom(F, (0, 0)), Atom(F, (0, 1)))
        assert count_true_groundings(Atom(F, (X, Y)), w, Domain(2)) == 2

    def test_reflexive_only(self):
        w = world(Atom(F, (0, 0)), Atom(F, (0, 1)))
        assert count_true_groundings(Atom(F, (X, X)), w, Domain(2)) == 1

    def test_empty_world(self):
        assert count_true_groundings(Atom(P, (X,)), world(), Domain(3)) == 0

    def test_sentence_is_indicator(self):
        f = Exists(X, Atom(P, (X,)))
        assert count_true_groundings(f, world(Atom(P, (1,))), Domain(3)) == 1
        assert count_true_groundings(f, world(), Domain(3)) == 0

    def test_equals_sum_of_evaluations(self):
        f = Implies(Atom(P, (X,)), Atom(F, (X, Y)))
        d = Domain(2)
        w = world(Atom(P, (0,)), Atom(F, (0, 1)), Atom(F, (1, 1)))
        total = sum(evaluate(g, w, d) for g in groundings(f, d))
        assert count_true_groundings(f, w, d) == total


class TestMonotonicity:
    def test_positive_atom_stays_true(self):
        d = Domain(2)
        f = Exists(X, Atom(P, (X,)))
        small = world(Atom(P, (0,)))
        large = world(Atom(P, (0,)), Atom(P, (1,)), Atom(F, (0, 0)))
        assert evaluate(f, small, d) and evaluate(f, large, d)


# -- surface-syntax round trip ------------------------------------------------

_atoms = st.sampled_from([
    Atom(P, (X,)), Atom(P, (Y,)), Atom(F, (X, Y)), Atom(F, (Y, X)),
    Atom(F, (X, X)), Atom(SMOKES, (X,)), TRUE,
])


def _formulas(depth):
    if depth == 0:
        return _atoms
    sub = _formulas(depth - 1)
    return st.one_of(
        _atoms,
        st.builds(Not, sub),
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
        st.builds(Implies, sub, sub),
        st.builds(Iff, sub, sub),
        st.builds(ForAll, st.sampled_from([X, Y]), sub),
        st.builds(Exists, st.sampled_from([X, Y]), sub),
    )


@settings(max_examples=200, deadline=None)
@given(_formulas(3))
def test_parse_pretty_roundtrip(f):
    assert parse_formula(pretty(f), VOCAB) == f
