"""Finite measurable spaces with sigma-algebras stored as atom partitions.

On a finite space every sigma-algebra is generated by a partition into
atoms, and every measurable set is a union of atoms.  Storing the
partition makes measurability checks index arithmetic and gives every
value a canonical, order-stable form.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import (
    EmptyBlock,
    NotMeasurable,
    OverlappingBlocks,
    SpaceMismatch,
    UncoveredPoint,
    UnknownPoint,
    ValidationError,
)

TOP = "⊤"
BOTTOM = "⊥"
TERMINAL_POINT = "•"


@dataclass(frozen=True)
class MeasurableSpace:
    """An ordered set of labelled points plus its atom partition.

    `atoms` is a tuple of blocks, each block a sorted tuple of point
    indices.  Blocks must be disjoint and cover all points.
    """

    points: tuple[str, ...]
    atoms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(
            self, "atoms", tuple(tuple(sorted(block)) for block in self.atoms))
        if not self.points:
            raise ValidationError("a measurable space needs at least one point")
        if len(set(self.points)) != len(self.points):
            raise ValidationError("point labels must be distinct")
        seen: set[int] = set()
        for block in self.atoms:
            if not block:
                raise EmptyBlock("atom partition contains an empty block")
            for index in block:
                if not 0 <= index < len(self.points):
                    raise UnknownPoint(f"point index {index} out of range")
                if index in seen:
                    raise OverlappingBlocks(
                        f"point {self.points[index]!r} belongs to two blocks")
                seen.add(index)
        if len(seen) != len(self.points):
            missing = [p for i, p in enumerate(self.points) if i not in seen]
            raise UncoveredPoint(f"points not covered by any block: {missing}")

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @cached_property
    def _point_index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.points)}

    @cached_property
    def _point_to_atom(self) -> tuple[int, ...]:
        lookup = [0] * len(self.points)
        for a, block in enumerate(self.atoms):
            for index in block:
                lookup[index] = a
        return tuple(lookup)

    def point_index(self, label: str) -> int:
        try:
            return self._point_index[label]
        except KeyError:
            raise UnknownPoint(f"unknown point {label!r}") from None

    def atom_of(self, label: str) -> int:
        """Index of the atom containing the labelled point."""
        return self._point_to_atom[self.point_index(label)]

    def atom_of_index(self, point_index: int) -> int:
        return self._point_to_atom[point_index]

    def atom_points(self, atom_index: int) -> tuple[str, ...]:
        return tuple(self.points[i] for i in self.atoms[atom_index])

    def atom_label(self, atom_index: int) -> str:
        members = self.atom_points(atom_index)
        if len(members) == 1:
            return members[0]
        return "{" + ",".join(members) + "}"

    @property
    def atom_labels(self) -> tuple[str, ...]:
        return tuple(self.atom_label(a) for a in range(self.n_atoms))

    @property
    def is_discrete(self) -> bool:
        return all(len(block) == 1 for block in self.atoms)

    def __repr__(self) -> str:
        blocks = ", ".join(
            "{" + ",".join(self.atom_points(a)) + "}" for a in range(self.n_atoms))
        return f"MeasurableSpace([{', '.join(self.points)}]; {blocks})"


def make_space(labels: Iterable[str], partition: Iterable[Iterable[str]]) -> MeasurableSpace:
    """Build a space from point labels and a partition given by labels."""
    points = tuple(labels)
    index = {label: i for i, label in enumerate(points)}
    if len(index) != len(points):
        raise ValidationError("point labels must be distinct")
    atoms = []
    for block in partition:
        block_labels = tuple(block)
        for label in block_labels:
            if label not in index:
                raise UnknownPoint(f"unknown point {label!r} in partition block")
        atoms.append(tuple(sorted(index[label] for label in block_labels)))
    return MeasurableSpace(points, tuple(atoms))


def discrete_space(labels: Iterable[str]) -> MeasurableSpace:
    """Space whose sigma-algebra separates every point."""
    points = tuple(labels)
    return MeasurableSpace(points, tuple((i,) for i in range(len(points))))


def space_from_generating_sets(
    labels: Iterable[str], generating_sets: Iterable[Iterable[str]]
) -> MeasurableSpace:
    """Space whose sigma-algebra is generated by arbitrary subsets.

    The generators need not be disjoint; they are converted to the atom
    partition at construction time.  Two points share an atom exactly
    when no generator separates them.
    """
    points = tuple(labels)
    index = {label: i for i, label in enumerate(points)}
    if len(index) != len(points):
        raise ValidationError("point labels must be distinct")
    generators = []
    for generating_set in generating_sets:
        members = set()
        for label in generating_set:
            if label not in index:
                raise UnknownPoint(f"unknown point {label!r} in generating set")
            members.add(index[label])
        generators.append(members)
    blocks: dict[tuple[bool, ...], list[int]] = {}
    for i in range(len(points)):
        key = tuple(i in g for g in generators)
        blocks.setdefault(key, []).append(i)
    atoms = tuple(tuple(block) for block in blocks.values())
    return MeasurableSpace(points, atoms)


def two_point() -> MeasurableSpace:
    """The discrete two-element truth-value space."""
    return discrete_space((TOP, BOTTOM))


def terminal() -> MeasurableSpace:
    """The canonical one-point space (terminal for kernels)."""
    return MeasurableSpace((TERMINAL_POINT,), ((0,),))


@dataclass(frozen=True)
class MeasurableSet:
    """A measurable set, i.e. a union of atoms of its space."""

    space: MeasurableSpace
    atom_indices: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "atom_indices", frozenset(self.atom_indices))
        for index in self.atom_indices:
            if not 0 <= index < self.space.n_atoms:
                raise UnknownPoint(f"atom index {index} out of range")

    @classmethod
    def from_atoms(cls, space: MeasurableSpace, indices: Iterable[int]) -> MeasurableSet:
        return cls(space, frozenset(indices))

    @classmethod
    def from_points(cls, space: MeasurableSpace, labels: Iterable[str]) -> MeasurableSet:
        """Set given by point labels; must be an exact union of atoms."""
        wanted = {space.point_index(label) for label in labels}
        atoms = {space.atom_of_index(i) for i in wanted}
        covered = {i for a in atoms for i in space.atoms[a]}
        if covered != wanted:
            raise NotMeasurable(
                f"point set {sorted(labels)} is not a union of atoms")
        return cls(space, frozenset(atoms))

    @classmethod
    def empty(cls, space: MeasurableSpace) -> MeasurableSet:
        return cls(space, frozenset())

    @classmethod
    def full(cls, space: MeasurableSpace) -> MeasurableSet:
        return cls(space, frozenset(range(space.n_atoms)))

    @property
    def sorted_atoms(self) -> tuple[int, ...]:
        return tuple(sorted(self.atom_indices))

    def point_labels(self) -> tuple[str, ...]:
        indices = sorted(i for a in self.atom_indices for i in self.space.atoms[a])
        return tuple(self.space.points[i] for i in indices)

    def contains_point(self, label: str) -> bool:
        return self.space.atom_of(label) in self.atom_indices

    def complement(self) -> MeasurableSet:
        return MeasurableSet(
            self.space, frozenset(range(self.space.n_atoms)) - self.atom_indices)

    def union(self, other: MeasurableSet) -> MeasurableSet:
        self._check_same_space(other)
        return MeasurableSet(self.space, self.atom_indices | other.atom_indices)

    def intersection(self, other: MeasurableSet) -> MeasurableSet:
        self._check_same_space(other)
        return MeasurableSet(self.space, self.atom_indices & other.atom_indices)

    def _check_same_space(self, other: MeasurableSet) -> None:
        if self.space != other.space:
            raise SpaceMismatch("sets live on different spaces")


@dataclass(frozen=True)
class MeasurableFunction:
    """A total point map whose atom preimages are unions of atoms.

    Equivalently: every domain atom lands inside a single codomain
    atom.  `mapping[i]` is the codomain point index of domain point i.
    """

    domain: MeasurableSpace
    codomain: MeasurableSpace
    mapping: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        if len(self.mapping) != len(self.domain.points):
            raise ValidationError("mapping must be total on the domain points")
        for target in self.mapping:
            if not 0 <= target < len(self.codomain.points):
                raise UnknownPoint(f"target index {target} out of range")
        for a, block in enumerate(self.domain.atoms):
            targets = {self.codomain.atom_of_index(self.mapping[i]) for i in block}
            if len(targets) > 1:
                raise NotMeasurable(
                    f"atom {self.domain.atom_label(a)} is split across codomain atoms")

    @classmethod
    def from_labels(
        cls,
        domain: MeasurableSpace,
        codomain: MeasurableSpace,
        mapping: Mapping[str, str],
    ) -> MeasurableFunction:
        targets = []
        for label in domain.points:
            if label not in mapping:
                raise ValidationError(f"mapping missing domain point {label!r}")
            targets.append(codomain.point_index(mapping[label]))
        return cls(domain, codomain, tuple(targets))

    def __call__(self, label: str) -> str:
        return self.codomain.points[self.mapping[self.domain.point_index(label)]]

    def atom_target(self, atom_index: int) -> int:
        """The codomain atom the given domain atom maps into."""
        first = self.domain.atoms[atom_index][0]
        return self.codomain.atom_of_index(self.mapping[first])

    def preimage(self, subset: MeasurableSet) -> MeasurableSet:
        if subset.space != self.codomain:
            raise SpaceMismatch("set does not live on the codomain")
        atoms = {
            a for a in range(self.domain.n_atoms)
            if self.atom_target(a) in subset.atom_indices
        }
        return MeasurableSet(self.domain, frozenset(atoms))


def is_measurable_function(
    domain: MeasurableSpace,
    codomain: MeasurableSpace,
    mapping: Mapping[str, str],
) -> bool:
    """True iff the preimage of every codomain atom is a union of atoms."""
    targets = []
    for label in domain.points:
        if label not in mapping:
            raise ValidationError(f"mapping missing domain point {label!r}")
        targets.append(codomain.point_index(mapping[label]))
    for block in domain.atoms:
        if len({codomain.atom_of_index(targets[i]) for i in block}) > 1:
            return False
    return True


def identity_function(space: MeasurableSpace) -> MeasurableFunction:
    return MeasurableFunction(space, space, tuple(range(len(space.points))))


def constant_function(
    domain: MeasurableSpace, codomain: MeasurableSpace, target: str
) -> MeasurableFunction:
    index = codomain.point_index(target)
    return MeasurableFunction(domain, codomain, (index,) * len(domain.points))


def bang_function(space: MeasurableSpace) -> MeasurableFunction:
    """The unique map into the canonical terminal space."""
    return constant_function(space, terminal(), TERMINAL_POINT)


def compose_functions(
    after: MeasurableFunction, before: MeasurableFunction
) -> MeasurableFunction:
    """Point composition ``after` ∘ `before``."""
    if before.codomain != after.domain:
        raise SpaceMismatch("functions are not composable")
    return MeasurableFunction(
        before.domain,
        after.codomain,
        tuple(after.mapping[t] for t in before.mapping),
    )


@dataclass(frozen=True)
class ProductSpace:
    """A product space bundled with its projections and index helpers.

    Points are ordered row-major in the left factor; atoms are all
    rectangles (atom of X) x (atom of Y), also row-major, so atom
    ``k = i * n_atoms(Y) + j``.
    """

    space: MeasurableSpace
    x_space: MeasurableSpace
    y_space: MeasurableSpace
    proj_x: MeasurableFunction
    proj_y: MeasurableFunction

    def atom_index(self, x_atom: int, y_atom: int) -> int:
        return x_atom * self.y_space.n_atoms + y_atom

    def atom_pair(self, atom_index: int) -> tuple[int, int]:
        return divmod(atom_index, self.y_space.n_atoms)

    def point_index(self, x_point: int, y_point: int) -> int:
        return x_point * len(self.y_space.points) + y_point

    def rectangle(self, a: MeasurableSet, b: MeasurableSet) -> MeasurableSet:
        """The measurable set A x B inside the product."""
        if a.space != self.x_space or b.space != self.y_space:
            raise SpaceMismatch("rectangle factors live on the wrong spaces")
        atoms = {
            self.atom_index(i, j)
            for i in a.atom_indices
            for j in b.atom_indices
        }
        return MeasurableSet(self.space, frozenset(atoms))


@lru_cache(maxsize=256)
def product(x_space: MeasurableSpace, y_space: MeasurableSpace) -> ProductSpace:
    """Product space with the sigma-algebra generated by the projections.

    Cached: spaces are immutable and products are rebuilt constantly by
    the joint-distribution machinery.
    """
    ny_points = len(y_space.points)
    labels = tuple(
        f"({xl},{yl})" for xl in x_space.points for yl in y_space.points)
    atoms = tuple(
        tuple(sorted(xi * ny_points + yi for xi in xb for yi in yb))
        for xb in x_space.atoms
        for yb in y_space.atoms
    )
    space = MeasurableSpace(labels, atoms)
    proj_x = MeasurableFunction(
        space, x_space,
        tuple(xi for xi in range(len(x_space.points)) for _ in range(ny_points)))
    proj_y = MeasurableFunction(
        space, y_space,
        tuple(yi for _ in range(len(x_space.points)) for yi in range(ny_points)))
    return ProductSpace(space, x_space, y_space, proj_x, proj_y)
