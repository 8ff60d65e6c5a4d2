import math
import random

import numpy as np
import pytest

from mlncount import (
    And, Atom, Domain, Eq, Equals, Exists, ForAll, FunctionConstraint, Iff,
    Implies, Mln, Predicate, TautologyTrue, Var, analytic_fixed_points,
    constrained_marginal, constrained_partition, count_true_groundings,
    enumerate_worlds, evaluate, fixed_point_distribution,
    rewrite_function_constraints,
)
from mlncount.brute import (
    brute_constrained_marginal, brute_constrained_partition, _GroundMln,
)
from mlncount.constraints import (
    Between, CardinalityConstraint, Conjunction, CustomPredicate,
)
from mlncount.errors import InfeasibleConstraintError
from mlncount.spectrum import CountSpec

from helpers import random_feasible_mln

X, Y, Z = Var("x"), Var("y"), Var("z")
P = Predicate("p", 1)
R = Predicate("r", 2)
TOTALITY = ForAll(X, Exists(Y, Atom(R, (X, Y))))


def literal_function_property(d):
    """Func(R) spelled out: totality plus the three-variable uniqueness
    clause, evaluated only by exhaustive enumeration."""
    uniqueness = ForAll(X, ForAll(Y, ForAll(Z, Implies(
        And(Atom(R, (X, Y)), Atom(R, (X, Z))), Eq(Y, Z)))))
    return And(TOTALITY, uniqueness)


class TestCardinalityPredicates:
    def test_equals(self):
        g = Equals(0, 3)
        assert g((3, 7)) and not g((2, 7))

    def test_between(self):
        g = Between(1, 2, 4)
        assert g((0, 2)) and g((0, 4)) and not g((0, 5))

    def test_conjunction(self):
        g = Conjunction((Equals(0, 1), Between(1, 0, 2)))
        assert g((1, 2)) and not g((1, 3)) and not g((0, 0))

    def test_tautology(self):
        assert TautologyTrue()((5, 5, 5))

    def test_custom_escape_hatch(self):
        g = CustomPredicate(lambda v: sum(v) % 2 == 0)
        assert g((1, 1)) and not g((1, 0))

    def test_dimension_checked(self):
        psi = CountSpec.of([Atom(P, (X,))])
        with pytest.raises(ValueError):
            CardinalityConstraint(psi, Equals(1, 0))


class TestConstrainedPartition:
    def test_vacuous_constraint_equals_partition(self):
        from mlncount import partition_function
        mln = Mln.of([(Atom(P, (X,)), 0.4)], [P])
        cc = CardinalityConstraint(CountSpec.of([Atom(P, (X,))]),
                                   TautologyTrue())
        assert constrained_partition(mln, cc, Domain(3)) == \
            pytest.approx(float(partition_function(mln, Domain(3))))

    @pytest.mark.parametrize("n", [3, 4])
    def test_function_count(self, n):
        mln = Mln.of([(TOTALITY, math.inf)], [R])
        cc = CardinalityConstraint(CountSpec.of([Atom(R, (X, Y))]),
                                   Equals(0, n))
        got = constrained_partition(mln, cc, Domain(n))
        assert got == pytest.approx(n ** n, rel=1e-9)

    def test_unsatisfiable_constraint_reported(self):
        mln = Mln.of([], [P])
        cc = CardinalityConstraint(CountSpec.of([Atom(P, (X,))]),
                                   Equals(0, 5))
        with pytest.raises(InfeasibleConstraintError):
            constrained_partition(mln, cc, Domain(2))

    def test_matches_brute(self):
        rng = random.Random(88)
        for _ in range(8):
            mln, psi, d = random_feasible_mln(rng)
            total = d.size ** 2
            g = Between(0, 0, rng.randint(1, total))
            cc = CardinalityConstraint(CountSpec.of(psi), g)
            try:
                engine = constrained_partition(mln, cc, d)
            except InfeasibleConstraintError:
                brute = brute_constrained_partition(mln, psi, g, d)
                assert brute == pytest.approx(0.0, abs=1e-12)
                continue
            brute = brute_constrained_partition(mln, psi, g, d)
            assert engine == pytest.approx(brute, rel=1e-8)


class TestConstrainedMarginal:
    def test_vacuous_equals_plain_marginal(self):
        from mlncount import marginal
        mln = Mln.of([(Atom(P, (X,)), 0.25)], [P])
        gamma = Exists(X, Atom(P, (X,)))
        cc = CardinalityConstraint(CountSpec.of([Atom(P, (X,))]),
                                   TautologyTrue())
        assert constrained_marginal(mln, cc, gamma, Domain(3)) == \
            pytest.approx(marginal(mln, gamma, Domain(3)), abs=1e-9)

    def test_tautological_query(self):
        mln = Mln.of([], [P])
        gamma = ForAll(X, Iff(Atom(P, (X,)), Atom(P, (X,))))
        cc = CardinalityConstraint(CountSpec.of([Atom(P, (X,))]),
                                   Between(0, 0, 3))
        assert constrained_marginal(mln, cc, gamma, Domain(2)) == \
            pytest.approx(1.0)

    def test_exact_count_forces_query(self):
        # Uniform worlds over one unary predicate, exactly one true atom:
        # both surviving worlds satisfy the existential query.
        mln = Mln.of([], [P])
        cc = CardinalityConstraint(CountSpec.of([Atom(P, (X,))]), Equals(0, 1))
        gamma = Exists(X, Atom(P, (X,)))
        assert constrained_marginal(mln, cc, gamma, Domain(2)) == \
            pytest.approx(1.0)

    def test_matches_brute(self):
        rng = random.Random(21)
        checked = 0
        while checked < 6:
            mln, psi, d = random_feasible_mln(rng)
            unaries = [p for p in mln.vocabulary if p.arity == 1]
            if not unaries:
                continue
            gamma = Exists(X, Atom(unaries[0], (X,)))
            g = Between(0, 0, rng.randint(1, d.size ** 2))
            cc = CardinalityConstraint(CountSpec.of(psi), g)
            try:
                engine = constrained_marginal(mln, cc, gamma, d)
            except InfeasibleConstraintError:
                continue
            brute = brute_constrained_marginal(mln, psi, g, gamma, d)
            assert engine == pytest.approx(brute, abs=1e-8)
            checked += 1


class TestRewriteFunctionConstraints:
    def test_single_constraint(self):
        sentences, cc = rewrite_function_constraints(
            [FunctionConstraint(R)], Domain(3))
        assert sentences == [TOTALITY]
        assert cc.predicate == Equals(0, 3)
        assert cc.psi.formulas == (Atom(R, (X, Y)),)

    def test_empty_list(self):
        sentences, cc = rewrite_function_constraints([], Domain(3))
        assert sentences == [] and cc is None

    def test_two_constraints_conjoin(self):
        h = Predicate("h", 2)
        sentences, cc = rewrite_function_constraints(
            [FunctionConstraint(R), FunctionConstraint(h)], Domain(2))
        assert len(sentences) == 2
        assert cc.predicate == Conjunction((Equals(0, 2), Equals(1, 2)))

    def test_arity_validated(self):
        with pytest.raises(ValueError):
            FunctionConstraint(P)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_rewriting_matches_literal_semantics(self, n):
        # Set equality of the two formulations, at exhaustive scale.
        d = Domain(n)
        literal = literal_function_property(d)
        mln = Mln.of([(TOTALITY, math.inf)], [R])
        satisfied = sum(
            1 for w in enumerate_worlds([R], d)
            if evaluate(literal, w, d))
        assert satisfied == n ** n


class TestFunctionEquivalenceExhaustive:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_exhaustive_world_sets_coincide(self, n):
        d = Domain(n)
        literal = literal_function_property(d)
        for w in enumerate_worlds([R], d):
            lhs = evaluate(literal, w, d)
            rhs = (evaluate(TOTALITY, w, d)
                   and count_true_groundings(Atom(R, (X, Y)), w, d) == n)
            assert lhs == rhs


class TestRatioPreservation:
    def test_constrained_ratios_match_unconstrained(self):
        # For worlds kept by the predicate, pairwise probability ratios are
        # untouched by constraining.
        mln = Mln.of([(Atom(P, (X,)), 0.8),
                      (Atom(R, (X, Y)), -0.3)], [P, R])
        d = Domain(2)
        psi = [Atom(P, (X,))]
        g = Between(0, 1, 2)
        grounded = _GroundMln(mln, d)
        worlds = [w for w in enumerate_worlds(mln.vocabulary, d)
                  if g(tuple([count_true_groundings(psi[0], w, d)]))
                  and grounded.mass(w) > 0]
        z = sum(grounded.mass(w) for w in enumerate_worlds(mln.vocabulary, d))
        z_prime = brute_constrained_partition(mln, psi, g, d)
        for w1 in worlds[:6]:
            for w2 in worlds[:6]:
                plain = (grounded.mass(w1) / z) / (grounded.mass(w2) / z)
                constrained = (grounded.mass(w1) / z_prime) / \
                    (grounded.mass(w2) / z_prime)
                assert constrained == pytest.approx(plain, rel=1e-12)


class TestFixedPoints:
    def test_analytic_base_cases(self):
        assert analytic_fixed_points(1, 1) == 1.0
        assert analytic_fixed_points(1, 0) == 0.0
        assert [analytic_fixed_points(2, k) for k in range(3)] == \
            [0.25, 0.5, 0.25]

    def test_analytic_matches_direct_enumeration_n3(self):
        # all 27 functions on three elements, counted by fixed points
        counts = [0] * 4
        for f0 in range(3):
            for f1 in range(3):
                for f2 in range(3):
                    fixed = (f0 == 0) + (f1 == 1) + (f2 == 2)
                    counts[fixed] += 1
        for k in range(4):
            assert analytic_fixed_points(3, k) == pytest.approx(counts[k] / 27)

    @pytest.mark.parametrize("n", list(range(1, 11)))
    def test_engine_matches_analytic(self, n):
        probs = fixed_point_distribution(n)
        for k in range(n + 1):
            assert probs[k] == pytest.approx(analytic_fixed_points(n, k),
                                             abs=1e-6)

    def test_distribution_sums_to_one(self):
        for n in (1, 4, 10):
            assert math.fsum(fixed_point_distribution(n)) == \
                pytest.approx(1.0, abs=1e-9)

    def test_literal_untilted_construction_agrees_at_small_n(self):
        for n in (2, 3, 4):
            tilted = fixed_point_distribution(n)
            literal = fixed_point_distribution(n, tilt=0.0)
            assert np.allclose(tilted, literal, atol=1e-9)
