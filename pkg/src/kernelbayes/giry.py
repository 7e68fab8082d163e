"""The probability monad at finite scale, plus decision-rule law checking.

Second-order measures (measures on measures) are kept finitely
supported, and the space of measures is modelled by a simplex grid: all
distributions with a fixed denominator, carrying the discrete
sigma-algebra induced by the evaluation maps.  Decision rules collapse
distributions to points; they are written in a threshold-predicate
language so that measurability with respect to the evaluation
sigma-algebra holds by construction.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import SampleOffGrid, SpaceMismatch, ValidationError
from .kernel import StochasticKernel, apply
from .measure import ONE, ZERO, Probability, dirac, evaluate
from .rationals import format_fraction, to_fraction
from .space import TOP, MeasurableSet, MeasurableSpace, two_point


def unit(space: MeasurableSpace, point: str) -> Probability:
    """Monad unit: the point mass at `point`."""
    return dirac(space, point)


@dataclass(frozen=True)
class SecondOrderMeasure:
    """A finitely supported probability measure on measures."""

    base_space: MeasurableSpace
    support: tuple[tuple[Probability, Fraction], ...]

    def __post_init__(self):
        support = tuple((q, to_fraction(w)) for q, w in self.support)
        object.__setattr__(self, "support", support)
        if not support:
            raise ValidationError("second-order measure needs a nonempty support")
        seen = set()
        for q, w in support:
            if q.space != self.base_space:
                raise SpaceMismatch(
                    "support distribution does not live on the base space")
            if w < 0:
                raise ValidationError(f"negative support weight {w}")
            if q in seen:
                raise ValidationError("support entries must be distinct")
            seen.add(q)
        total = sum((w for _, w in support), ZERO)
        if total != 1:
            raise ValidationError(f"support weights sum to {total}, expected 1")

    def __repr__(self) -> str:
        parts = " + ".join(
            f"{format_fraction(w)}*d[{q!r}]" for q, w in self.support)
        return f"SecondOrderMeasure({parts})"


def mix_second_order(
    base_space: MeasurableSpace,
    pairs: Iterable[tuple[Probability, Fraction]],
) -> SecondOrderMeasure:
    """Build a second-order measure, merging duplicate support points."""
    order: list[Probability] = []
    weights: dict[Probability, Fraction] = {}
    for q, w in pairs:
        w = to_fraction(w)
        if q not in weights:
            order.append(q)
            weights[q] = w
        else:
            weights[q] += w
    support = tuple((q, weights[q]) for q in order if weights[q] != 0)
    return SecondOrderMeasure(base_space, support)


def mu(second_order: SecondOrderMeasure) -> Probability:
    """Monad multiplication: average the support against its weights."""
    weights = [ZERO] * second_order.base_space.n_atoms
    for q, w in second_order.support:
        for a, qa in enumerate(q.weights):
            weights[a] += w * qa
    return Probability(second_order.base_space, tuple(weights))


def kleisli_extend(kernel: StochasticKernel):
    """Extend a kernel to a map between spaces of measures.

    The extension agrees with `apply`; factoring through `mu` on the
    finitely supported image gives the same answer.
    """
    def extended(measure: Probability) -> Probability:
        return apply(kernel, measure)

    return extended


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


@dataclass(frozen=True)
class SimplexGrid:
    """All distributions over a space's atoms with denominator `resolution`.

    The grid itself is a discrete measurable space with one point per
    distribution, so measures on the grid are finitely supported
    second-order objects that the rest of the package can manipulate.
    """

    base_space: MeasurableSpace
    resolution: int
    grid: MeasurableSpace
    distributions: tuple[Probability, ...]

    @cached_property
    def _index(self) -> dict[Probability, int]:
        return {q: i for i, q in enumerate(self.distributions)}

    def __len__(self) -> int:
        return len(self.distributions)

    def index_of(self, distribution: Probability) -> int:
        try:
            return self._index[distribution]
        except KeyError:
            raise SampleOffGrid(
                f"{distribution!r} is not a grid point at resolution "
                f"{self.resolution}") from None

    def contains(self, distribution: Probability) -> bool:
        return distribution in self._index


def simplex_grid(space: MeasurableSpace, resolution: int) -> SimplexGrid:
    """Enumerate every atom-weight vector with the given denominator."""
    if resolution < 1:
        raise ValidationError("resolution must be a positive integer")
    distributions = []
    labels = []
    for counts in _compositions(resolution, space.n_atoms):
        weights = tuple(Fraction(c, resolution) for c in counts)
        distributions.append(Probability(space, weights))
        labels.append("(" + ",".join(str(w) for w in weights) + ")")
    grid_space = MeasurableSpace(
        tuple(labels), tuple((i,) for i in range(len(labels))))
    return SimplexGrid(space, resolution, grid_space, tuple(distributions))


def evaluation_kernel(grid: SimplexGrid) -> StochasticKernel:
    """The counit on a grid: the row at a grid point is that distribution."""
    return StochasticKernel(
        grid.grid, grid.base_space,
        tuple(q.weights for q in grid.distributions))


def ap_expectation(grid: SimplexGrid, higher_order: Probability) -> Fraction:
    """Expected truth value of a distribution over Bernoulli parameters.

    `higher_order` is a measure on a grid over the two-point space; its
    expectation is read off by pushing it through the evaluation kernel
    and evaluating at the top truth value.
    """
    if grid.base_space != two_point():
        raise SpaceMismatch("grid is not over the two-point space")
    if higher_order.space != grid.grid:
        raise SpaceMismatch("distribution does not live on the grid")
    collapsed = apply(evaluation_kernel(grid), higher_order)
    top = MeasurableSet.from_points(grid.base_space, (TOP,))
    return evaluate(collapsed, top)


# --- decision rules ---------------------------------------------------------

_COMPARATORS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "=": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


@dataclass(frozen=True)
class Threshold:
    """Atomic predicate: compare the mass of a set against a constant."""

    subset: MeasurableSet
    comparator: str
    bound: Fraction

    def __post_init__(self):
        object.__setattr__(self, "bound", to_fraction(self.bound))
        if self.comparator not in _COMPARATORS:
            raise ValidationError(
                f"comparator must be one of {sorted(_COMPARATORS)}")

    def holds(self, distribution: Probability) -> bool:
        value = evaluate(distribution, self.subset)
        return _COMPARATORS[self.comparator](value, self.bound)


@dataclass(frozen=True)
class AllOf:
    terms: tuple["Predicate", ...]

    def holds(self, distribution: Probability) -> bool:
        return all(t.holds(distribution) for t in self.terms)


@dataclass(frozen=True)
class AnyOf:
    terms: tuple["Predicate", ...]

    def holds(self, distribution: Probability) -> bool:
        return any(t.holds(distribution) for t in self.terms)


@dataclass(frozen=True)
class Negation:
    term: "Predicate"

    def holds(self, distribution: Probability) -> bool:
        return not self.term.holds(distribution)


Predicate = Threshold | AllOf | AnyOf | Negation


def _predicate_thresholds(predicate: Predicate):
    if isinstance(predicate, Threshold):
        yield predicate
    elif isinstance(predicate, Negation):
        yield from _predicate_thresholds(predicate.term)
    elif isinstance(predicate, (AllOf, AnyOf)):
        for term in predicate.terms:
            yield from _predicate_thresholds(term)
    else:
        raise ValidationError(f"unknown predicate {type(predicate).__name__}")


@dataclass(frozen=True)
class DecisionRule:
    """A map from distributions to points, given by threshold clauses.

    Clauses are tried in order; the first whose predicate holds decides
    the output point.  The final clause must be a default (predicate
    None), which makes the rule total.  Because predicates only inspect
    evaluation coordinates, the rule is measurable for the
    sigma-algebra generated by the evaluation maps by construction.
    """

    base_space: MeasurableSpace
    clauses: tuple[tuple[Predicate | None, str], ...]

    def __post_init__(self):
        if not self.clauses:
            raise ValidationError("decision rule needs at least one clause")
        if self.clauses[-1][0] is not None:
            raise ValidationError("final clause must be a default")
        for predicate, _ in self.clauses[:-1]:
            if predicate is None:
                raise ValidationError("only the final clause may be a default")
        for predicate, output in self.clauses:
            self.base_space.point_index(output)
            if predicate is None:
                continue
            for threshold in _predicate_thresholds(predicate):
                if threshold.subset.space != self.base_space:
                    raise SpaceMismatch(
                        "threshold set does not live on the rule's space")

    def decide(self, distribution: Probability) -> str:
        if distribution.space != self.base_space:
            raise SpaceMismatch("distribution does not live on the rule's space")
        for predicate, output in self.clauses:
            if predicate is None or predicate.holds(distribution):
                return output
        raise AssertionError("unreachable: final clause is a default")


def dirac_detector_rule(space: MeasurableSpace, point: str) -> DecisionRule:
    """The rule that outputs `point` exactly on its point mass.

    On the two-point space with `point` the top truth value this is the
    classic nontrivial algebra: top iff the distribution is the point
    mass at top, bottom otherwise.
    """
    target = MeasurableSet.from_atoms(space, (space.atom_of(point),))
    default = next(p for p in space.points if p != point)
    return DecisionRule(
        space, ((Threshold(target, "=", ONE), point), (None, default)))


@dataclass(frozen=True)
class AssociativityViolation:
    sample_index: int
    sample: SecondOrderMeasure
    via_mu: str
    via_pushforward: str


@dataclass(frozen=True)
class AlgebraReport:
    """Outcome of checking the unit and associative laws for a rule."""

    unit_violations: tuple[tuple[str, str], ...]
    associativity_violations: tuple[AssociativityViolation, ...]
    points_checked: int
    samples_checked: int

    @property
    def ok(self) -> bool:
        return not self.unit_violations and not self.associativity_violations


def check_algebra(
    rule: DecisionRule,
    grid: SimplexGrid,
    second_order_samples: Sequence[SecondOrderMeasure],
) -> AlgebraReport:
    """Check the algebra laws for a decision rule.

    The unit law is checked exhaustively: the rule must send each point
    mass back to its point.  The associative law is checked per sample
    Q (supported on grid points): collapsing Q with `mu` and then
    deciding must agree with pushing Q forward along the rule and
    deciding the resulting distribution.
    """
    if rule.base_space != grid.base_space:
        raise SpaceMismatch("rule and grid have different base spaces")
    base = grid.base_space
    unit_violations = []
    for label in base.points:
        decided = rule.decide(dirac(base, label))
        if decided != label:
            unit_violations.append((label, decided))
    assoc_violations = []
    for index, sample in enumerate(second_order_samples):
        for q, _ in sample.support:
            grid.index_of(q)  # raises SampleOffGrid
        via_mu = rule.decide(mu(sample))
        pushed = [ZERO] * base.n_atoms
        for q, w in sample.support:
            pushed[base.atom_of(rule.decide(q))] += w
        via_pushforward = rule.decide(Probability(base, tuple(pushed)))
        if via_mu != via_pushforward:
            assoc_violations.append(AssociativityViolation(
                index, sample, via_mu, via_pushforward))
    return AlgebraReport(
        tuple(unit_violations),
        tuple(assoc_violations),
        points_checked=len(base.points),
        samples_checked=len(second_order_samples),
    )


@dataclass(frozen=True)
class MonadLawReport:
    """Outcome of the monad unit and associativity checks on a grid."""

    left_unit_violations: tuple[Probability, ...]
    right_unit_violations: tuple[Probability, ...]
    associativity_violations: tuple[int, ...]
    points_checked: int
    samples_checked: int

    @property
    def ok(self) -> bool:
        return not (
            self.left_unit_violations
            or self.right_unit_violations
            or self.associativity_violations
        )


def map_unit(distribution: Probability) -> SecondOrderMeasure:
    """Push a distribution forward along the unit: atoms become point masses."""
    base = distribution.space
    pairs = [
        (dirac(base, base.atom_points(a)[0]), w)
        for a, w in enumerate(distribution.weights)
        if w > 0
    ]
    return mix_second_order(base, pairs)


def flatten_third_order(
    base_space: MeasurableSpace,
    third_order: Sequence[tuple[SecondOrderMeasure, Fraction]],
) -> SecondOrderMeasure:
    """Multiplication one level up: merge the supports of the supports."""
    pairs = []
    for second, outer in third_order:
        for q, inner in second.support:
            pairs.append((q, outer * inner))
    return mix_second_order(base_space, pairs)


def map_mu(
    base_space: MeasurableSpace,
    third_order: Sequence[tuple[SecondOrderMeasure, Fraction]],
) -> SecondOrderMeasure:
    """Push a third-order measure forward along `mu`."""
    return mix_second_order(
        base_space, [(mu(second), w) for second, w in third_order])


def check_monad_laws(
    grid: SimplexGrid,
    second_order_samples: Sequence[SecondOrderMeasure],
    third_order_samples: Sequence[Sequence[tuple[SecondOrderMeasure, Fraction]]],
) -> MonadLawReport:
    """Check the monad laws over a grid.

    Unit laws are exhaustive over the grid points and re-checked at the
    collapse of every second-order sample (which usually lies off the
    grid); associativity is checked on the supplied third-order samples
    by comparing the two collapse orders.
    """
    base = grid.base_space
    left_violations = []
    right_violations = []
    for q in grid.distributions:
        if mu(SecondOrderMeasure(base, ((q, ONE),))) != q:
            left_violations.append(q)
        if mu(map_unit(q)) != q:
            right_violations.append(q)
    for sample in second_order_samples:
        for q, _ in sample.support:
            grid.index_of(q)
        collapsed = mu(sample)
        if mu(SecondOrderMeasure(base, ((collapsed, ONE),))) != collapsed:
            left_violations.append(collapsed)
        if mu(map_unit(collapsed)) != collapsed:
            right_violations.append(collapsed)
    assoc_violations = []
    for index, sample in enumerate(third_order_samples):
        if mu(map_mu(base, sample)) != mu(flatten_third_order(base, sample)):
            assoc_violations.append(index)
    return MonadLawReport(
        tuple(left_violations),
        tuple(right_violations),
        tuple(assoc_violations),
        points_checked=len(grid.distributions),
        samples_checked=len(second_order_samples) + len(third_order_samples),
    )


# --- deterministic sampling for law checks ----------------------------------

def _random_weights(rng: random.Random, count: int) -> list[Fraction]:
    numerators = [rng.randint(1, 9) for _ in range(count)]
    total = sum(numerators)
    return [Fraction(n, total) for n in numerators]


def random_second_order(
    grid: SimplexGrid, rng: random.Random, max_support: int = 4
) -> SecondOrderMeasure:
    """A random finitely supported measure on grid points."""
    size = rng.randint(1, min(max_support, len(grid)))
    indices = rng.sample(range(len(grid)), size)
    weights = _random_weights(rng, size)
    return SecondOrderMeasure(
        grid.base_space,
        tuple((grid.distributions[i], w) for i, w in zip(indices, weights)))


def random_third_order(
    grid: SimplexGrid, rng: random.Random, max_support: int = 3
) -> tuple[tuple[SecondOrderMeasure, Fraction], ...]:
    """A random finitely supported measure on second-order measures."""
    size = rng.randint(1, max_support)
    seconds = [random_second_order(grid, rng) for _ in range(size)]
    weights = _random_weights(rng, size)
    return tuple(zip(seconds, weights))
