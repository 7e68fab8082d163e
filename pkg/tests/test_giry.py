"""Monad structure, simplex grids, and decision-rule law checking."""

import math
import random
from fractions import Fraction

import pytest

from kernelbayes import (
    BOTTOM,
    TOP,
    DecisionRule,
    MeasurableFunction,
    MeasurableSet,
    Probability,
    SampleOffGrid,
    SecondOrderMeasure,
    Threshold,
    apply,
    ap_expectation,
    check_algebra,
    check_monad_laws,
    compose,
    dirac,
    dirac_detector_rule,
    discrete_space,
    evaluation_kernel,
    identity_kernel,
    kleisli_extend,
    lift_dirac,
    mix_second_order,
    mu,
    simplex_grid,
    two_point,
    uniform,
    unit,
)
from kernelbayes.giry import (
    flatten_third_order,
    map_mu,
    map_unit,
    random_second_order,
    random_third_order,
)

from generators import (
    random_kernel,
    random_measurable_function,
    random_probability,
    random_space,
)

F = Fraction


def bernoulli(theta) -> Probability:
    theta = F(theta)
    return Probability(two_point(), (theta, 1 - theta))


def grid_dirac(grid, distribution: Probability) -> Probability:
    """Point mass on the grid point representing `distribution`."""
    index = grid.index_of(distribution)
    return dirac(grid.grid, grid.grid.points[index])


def threshold_rule(space, bound) -> DecisionRule:
    """Top when the top-atom mass reaches `bound`, bottom otherwise."""
    top_set = MeasurableSet.from_points(space, (TOP,))
    return DecisionRule(
        space, ((Threshold(top_set, ">=", F(bound)), TOP), (None, BOTTOM)))


class TestUnit:
    def test_unit_is_the_point_mass(self):
        assert unit(two_point(), TOP).weights == (1, 0)

    def test_mu_of_dirac_at_unit(self):
        space = two_point()
        q = unit(space, TOP)
        assert mu(SecondOrderMeasure(space, ((q, F(1)),))) == q

    def test_detector_rule_sends_unit_to_its_point(self):
        rule = dirac_detector_rule(two_point(), TOP)
        assert rule.decide(unit(two_point(), TOP)) == TOP
        assert rule.decide(unit(two_point(), BOTTOM)) == BOTTOM


class TestMu:
    def test_point_mass_support_collapses_to_it(self):
        rng = random.Random(1)
        for _ in range(20):
            space = random_space(rng)
            q = random_probability(rng, space)
            assert mu(SecondOrderMeasure(space, ((q, F(1)),))) == q

    def test_weighted_average_of_bernoullis(self):
        space = two_point()
        second = SecondOrderMeasure(
            space, ((bernoulli(F(3, 5)), F(1, 2)), (bernoulli(0), F(1, 2))))
        assert mu(second) == bernoulli(F(3, 10))

    def test_affine_in_the_measure(self):
        rng = random.Random(2)
        for _ in range(20):
            space = random_space(rng)
            qs = [random_probability(rng, space) for _ in range(3)]
            a = mix_second_order(space, ((qs[0], F(1, 2)), (qs[1], F(1, 2))))
            b = SecondOrderMeasure(space, ((qs[2], F(1)),))
            mixed = mix_second_order(
                space,
                [(q, F(1, 3) * w) for q, w in a.support]
                + [(q, F(2, 3) * w) for q, w in b.support])
            lhs = mu(mixed)
            rhs = Probability(space, tuple(
                F(1, 3) * x + F(2, 3) * y
                for x, y in zip(mu(a).weights, mu(b).weights)))
            assert lhs == rhs


class TestKleisliExtend:
    def test_identity_kernel_extends_to_identity(self):
        rng = random.Random(3)
        for _ in range(10):
            space = random_space(rng)
            extended = kleisli_extend(identity_kernel(space))
            measure = random_probability(rng, space)
            assert extended(measure) == measure

    def test_on_diracs_reads_off_rows(self):
        rng = random.Random(4)
        for _ in range(20):
            domain = random_space(rng, prefix="d")
            codomain = random_space(rng, prefix="c")
            kernel = random_kernel(rng, domain, codomain)
            extended = kleisli_extend(kernel)
            for a in range(domain.n_atoms):
                point = domain.atom_points(a)[0]
                assert extended(dirac(domain, point)) == kernel.row_measure(a)

    def test_agrees_with_apply_and_with_mu_factoring(self):
        rng = random.Random(5)
        for _ in range(25):
            domain = random_space(rng, prefix="d")
            codomain = random_space(rng, prefix="c")
            kernel = random_kernel(rng, domain, codomain)
            measure = random_probability(rng, domain)
            extended = kleisli_extend(kernel)
            assert extended(measure) == apply(kernel, measure)
            # Factor through mu on the finitely supported image.
            pairs = [
                (kernel.row_measure(a), w)
                for a, w in enumerate(measure.weights) if w > 0]
            assert mu(mix_second_order(codomain, pairs)) == extended(measure)


class TestSimplexGrid:
    def test_resolution_two_bernoullis(self):
        grid = simplex_grid(two_point(), 2)
        assert grid.distributions == (
            bernoulli(0), bernoulli(F(1, 2)), bernoulli(1))

    def test_two_point_grid_has_n_plus_one_points(self):
        for n in (1, 2, 5, 17):
            assert len(simplex_grid(two_point(), n)) == n + 1

    def test_size_matches_stars_and_bars(self):
        rng = random.Random(6)
        for _ in range(10):
            space = random_space(rng, max_atoms=4)
            n = rng.randint(1, 5)
            grid = simplex_grid(space, n)
            k = space.n_atoms
            assert len(grid) == math.comb(n + k - 1, k - 1)

    def test_grid_points_are_valid_distributions(self):
        grid = simplex_grid(discrete_space(("a", "b", "c")), 3)
        for q in grid.distributions:
            assert sum(q.weights) == 1
            assert all(w >= 0 for w in q.weights)
            assert all(w.denominator in (1, 3) for w in q.weights)

    def test_off_grid_lookup_raises(self):
        grid = simplex_grid(two_point(), 2)
        with pytest.raises(SampleOffGrid):
            grid.index_of(bernoulli(F(1, 3)))


class TestEvaluationKernel:
    def test_grid_dirac_recovers_the_distribution(self):
        grid = simplex_grid(two_point(), 4)
        for theta in (0, F(1, 4), F(1, 2), 1):
            target = bernoulli(theta)
            assert apply(evaluation_kernel(grid), grid_dirac(grid, target)) == target

    def test_point_mass_expectation(self):
        grid = simplex_grid(two_point(), 2)
        assert ap_expectation(grid, grid_dirac(grid, bernoulli(F(1, 2)))) == F(1, 2)

    def test_uniform_expectation(self):
        for n in (1, 2, 10, 100):
            grid = simplex_grid(two_point(), n)
            assert ap_expectation(grid, uniform(grid.grid)) == F(1, 2)

    def test_extreme_point_mass(self):
        grid = simplex_grid(two_point(), 3)
        assert ap_expectation(grid, grid_dirac(grid, bernoulli(1))) == 1

    def test_naturality_against_pushforward(self):
        # Collapsing a measure on the grid and then mapping the base
        # space agrees with mapping grid points and then collapsing.
        rng = random.Random(7)
        for _ in range(15):
            x = discrete_space(tuple(f"x{i}" for i in range(rng.randint(1, 3))))
            z = discrete_space(tuple(f"z{i}" for i in range(rng.randint(1, 3))))
            func = random_measurable_function(rng, x, z)
            n = rng.randint(1, 4)
            grid_x = simplex_grid(x, n)
            grid_z = simplex_grid(z, n)
            from kernelbayes import pushforward
            induced = MeasurableFunction(
                grid_x.grid, grid_z.grid,
                tuple(
                    grid_z.grid.atoms[grid_z.index_of(pushforward(func, q))][0]
                    for q in grid_x.distributions))
            lhs = compose(lift_dirac(func), evaluation_kernel(grid_x))
            rhs = compose(evaluation_kernel(grid_z), lift_dirac(induced))
            assert lhs == rhs


class TestMonadLaws:
    def test_unit_laws_exhaustive_on_grid(self):
        grid = simplex_grid(two_point(), 10)
        for q in grid.distributions:
            assert mu(SecondOrderMeasure(two_point(), ((q, F(1)),))) == q
            assert mu(map_unit(q)) == q

    def test_associativity_on_sampled_third_order_measures(self):
        rng = random.Random(8)
        grid = simplex_grid(discrete_space(("a", "b", "c")), 4)
        for _ in range(100):
            third = random_third_order(grid, rng)
            assert mu(map_mu(grid.base_space, third)) == \
                mu(flatten_third_order(grid.base_space, third))

    def test_check_monad_laws_is_clean(self):
        rng = random.Random(9)
        grid = simplex_grid(two_point(), 10)
        seconds = [random_second_order(grid, rng) for _ in range(50)]
        thirds = [random_third_order(grid, rng) for _ in range(50)]
        report = check_monad_laws(grid, seconds, thirds)
        assert report.ok

    def test_off_grid_sample_rejected(self):
        grid = simplex_grid(two_point(), 2)
        sample = SecondOrderMeasure(two_point(), ((bernoulli(F(1, 3)), F(1)),))
        with pytest.raises(SampleOffGrid):
            check_monad_laws(grid, [sample], [])


class TestCheckAlgebra:
    def test_detector_rule_satisfies_both_laws(self):
        rng = random.Random(10)
        grid = simplex_grid(two_point(), 10)
        rule = dirac_detector_rule(two_point(), TOP)
        samples = [random_second_order(grid, rng) for _ in range(200)]
        report = check_algebra(rule, grid, samples)
        assert report.ok
        assert report.points_checked == 2
        assert report.samples_checked == 200

    def test_detector_rule_partitions_the_grid(self):
        grid = simplex_grid(two_point(), 10)
        rule = dirac_detector_rule(two_point(), TOP)
        tops = [q for q in grid.distributions if rule.decide(q) == TOP]
        assert tops == [bernoulli(1)]

    def test_threshold_rule_passes_unit_but_fails_associativity(self):
        # Counterexample, checked by hand: Q weights 1/2 on B(3/5) and
        # 1/2 on B(0).  Collapsing first gives B(3/10), below the 1/2
        # threshold, so that route decides bottom; deciding first sends
        # B(3/5) to top and B(0) to bottom, giving B(1/2), which the
        # threshold accepts, so that route decides top.
        grid = simplex_grid(two_point(), 10)
        rule = threshold_rule(two_point(), F(1, 2))
        counterexample = SecondOrderMeasure(
            two_point(),
            ((bernoulli(F(3, 5)), F(1, 2)), (bernoulli(0), F(1, 2))))
        report = check_algebra(rule, grid, [counterexample])
        assert not report.unit_violations
        assert len(report.associativity_violations) == 1
        violation = report.associativity_violations[0]
        assert violation.sample_index == 0
        assert violation.via_mu == BOTTOM
        assert violation.via_pushforward == TOP

    def test_unit_violation_reported(self):
        space = two_point()
        top_set = MeasurableSet.from_points(space, (TOP,))
        always_bottom = DecisionRule(space, ((None, BOTTOM),))
        grid = simplex_grid(space, 2)
        report = check_algebra(always_bottom, grid, [])
        assert report.unit_violations == ((TOP, BOTTOM),)

    def test_off_grid_sample_rejected(self):
        grid = simplex_grid(two_point(), 2)
        rule = dirac_detector_rule(two_point(), TOP)
        sample = SecondOrderMeasure(two_point(), ((bernoulli(F(1, 3)), F(1)),))
        with pytest.raises(SampleOffGrid):
            check_algebra(rule, grid, [sample])

    def test_threshold_set_must_live_on_the_rules_space(self):
        from kernelbayes import SpaceMismatch
        other = discrete_space(("a", "b"))
        stray = Threshold(MeasurableSet.from_points(other, ("a",)), "=", F(1))
        with pytest.raises(SpaceMismatch):
            DecisionRule(two_point(), ((stray, TOP), (None, BOTTOM)))

    def test_violations_sorted_by_sample_index(self):
        grid = simplex_grid(two_point(), 10)
        rule = threshold_rule(two_point(), F(1, 2))
        counterexample = SecondOrderMeasure(
            two_point(),
            ((bernoulli(F(3, 5)), F(1, 2)), (bernoulli(0), F(1, 2))))
        harmless = SecondOrderMeasure(two_point(), ((bernoulli(1), F(1)),))
        report = check_algebra(
            rule, grid, [harmless, counterexample, harmless, counterexample])
        assert [v.sample_index for v in report.associativity_violations] == [1, 3]
