"""Exact probability measures on finite measurable spaces.

Weights are stored per atom, never per point: a measure on a finite
space is determined by its atom values, and this keeps coarse
(non-discrete) sigma-algebras honest.  All arithmetic is in
`fractions.Fraction`, so every identity in this package is an exact
equality rather than a tolerance check.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotMeasurable, SpaceMismatch, ValidationError
from .rationals import format_fraction, to_fraction
from .space import MeasurableFunction, MeasurableSet, MeasurableSpace

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Probability:
    """A probability measure: one nonnegative rational weight per atom."""

    space: MeasurableSpace
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        weights = tuple(to_fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) != self.space.n_atoms:
            raise ValidationError(
                f"expected {self.space.n_atoms} atom weights, got {len(weights)}")
        for a, w in enumerate(weights):
            if w < 0:
                raise ValidationError(
                    f"negative weight {w} on atom {self.space.atom_label(a)}")
        total = sum(weights, ZERO)
        if total != 1:
            raise ValidationError(f"weights sum to {total}, expected 1")

    def weight_of_atom(self, atom_index: int) -> Fraction:
        return self.weights[atom_index]

    def support(self) -> tuple[int, ...]:
        """Indices of atoms carrying positive mass."""
        return tuple(a for a, w in enumerate(self.weights) if w > 0)

    def __repr__(self) -> str:
        parts = " ".join(
            f"{self.space.atom_label(a)}={format_fraction(w)}"
            for a, w in enumerate(self.weights))
        return f"Probability({parts})"


def dirac(space: MeasurableSpace, point: str) -> Probability:
    """Point mass at `point`: weight 1 on the atom containing it."""
    atom = space.atom_of(point)
    return Probability(
        space, tuple(ONE if a == atom else ZERO for a in range(space.n_atoms)))


def uniform(space: MeasurableSpace) -> Probability:
    share = Fraction(1, space.n_atoms)
    return Probability(space, (share,) * space.n_atoms)


def probability_from_atoms(
    space: MeasurableSpace, values: Iterable[Fraction | int | str]
) -> Probability:
    return Probability(space, tuple(to_fraction(v) for v in values))


def evaluate(measure: Probability, subset: MeasurableSet) -> Fraction:
    """Mass of a measurable set: the sum of its atom weights."""
    if subset.space != measure.space:
        raise SpaceMismatch("set does not live on the measure's space")
    return sum((measure.weights[a] for a in subset.atom_indices), ZERO)


def pushforward(func: MeasurableFunction, measure: Probability) -> Probability:
    """Image measure: the pushforward assigns B the mass of its preimage."""
    if measure.space != func.domain:
        raise SpaceMismatch("measure does not live on the function's domain")
    weights = [ZERO] * func.codomain.n_atoms
    for a, w in enumerate(measure.weights):
        weights[func.atom_target(a)] += w
    return Probability(func.codomain, tuple(weights))


@dataclass(frozen=True)
class SimpleFunction:
    """A rational-valued function constant on each atom of its space."""

    space: MeasurableSpace
    values: tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(to_fraction(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != self.space.n_atoms:
            raise ValidationError(
                f"expected {self.space.n_atoms} atom values, got {len(values)}")

    @classmethod
    def from_point_values(
        cls, space: MeasurableSpace, values: Mapping[str, Fraction | int | str]
    ) -> SimpleFunction:
        """Build from per-point values; raises unless atom-constant."""
        atom_values: list[Fraction | None] = [None] * space.n_atoms
        for label in space.points:
            if label not in values:
                raise ValidationError(f"missing value for point {label!r}")
            value = to_fraction(values[label])
            a = space.atom_of(label)
            if atom_values[a] is None:
                atom_values[a] = value
            elif atom_values[a] != value:
                raise NotMeasurable(
                    f"values differ inside atom {space.atom_label(a)}")
        return cls(space, tuple(atom_values))  # type: ignore[arg-type]

    @classmethod
    def indicator(cls, subset: MeasurableSet) -> SimpleFunction:
        return cls(
            subset.space,
            tuple(ONE if a in subset.atom_indices else ZERO
                  for a in range(subset.space.n_atoms)))

    @classmethod
    def constant(cls, space: MeasurableSpace, value: Fraction | int | str) -> SimpleFunction:
        return cls(space, (to_fraction(value),) * space.n_atoms)

    def scale(self, factor: Fraction) -> SimpleFunction:
        return SimpleFunction(self.space, tuple(factor * v for v in self.values))

    def add(self, other: SimpleFunction) -> SimpleFunction:
        if self.space != other.space:
            raise SpaceMismatch("functions live on different spaces")
        return SimpleFunction(
            self.space, tuple(a + b for a, b in zip(self.values, other.values)))


def integrate(func: SimpleFunction, measure: Probability) -> Fraction:
    """Integral of an atom-constant function: a weighted sum of values."""
    if func.space != measure.space:
        raise SpaceMismatch("function does not live on the measure's space")
    return sum(
        (v * w for v, w in zip(func.values, measure.weights)), ZERO)


def is_absolutely_continuous(mu: Probability, reference: Probability) -> bool:
    """True iff every atom that is null for `reference` is null for `mu`."""
    if mu.space != reference.space:
        raise SpaceMismatch("measures live on different spaces")
    return all(
        m == 0 for m, r in zip(mu.weights, reference.weights) if r == 0)
