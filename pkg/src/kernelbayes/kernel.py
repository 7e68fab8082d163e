"""Stochastic (Markov) kernels between finite measurable spaces.

A kernel is stored as a row-stochastic matrix of exact rationals,
indexed (domain atom, codomain atom).  Indexing by atoms makes the
measurability requirement on each ``x -> f(x, B)`` true by
representation, and composition becomes exact matrix multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotWellDefined, SpaceMismatch, ValidationError
from .measure import ONE, ZERO, Probability, SimpleFunction
from .rationals import format_fraction, to_fraction
from .space import (
    TOP,
    MeasurableFunction,
    MeasurableSet,
    MeasurableSpace,
    bang_function,
    constant_function,
    identity_function,
    terminal,
    two_point,
)


@dataclass(frozen=True)
class StochasticKernel:
    """A measurable family of probability measures, one per domain atom."""

    domain: MeasurableSpace
    codomain: MeasurableSpace
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(to_fraction(e) for e in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) != self.domain.n_atoms:
            raise ValidationError(
                f"expected {self.domain.n_atoms} rows, got {len(rows)}")
        for a, row in enumerate(rows):
            if len(row) != self.codomain.n_atoms:
                raise ValidationError(
                    f"row {a} has {len(row)} entries, expected "
                    f"{self.codomain.n_atoms}")
            if any(e < 0 for e in row):
                raise ValidationError(f"negative entry in row {a}")
            total = sum(row, ZERO)
            if total != 1:
                raise ValidationError(
                    f"row {self.domain.atom_label(a)} sums to {total}, expected 1")

    def row_measure(self, atom_index: int) -> Probability:
        """The probability measure attached to a domain atom."""
        return Probability(self.codomain, self.rows[atom_index])

    def mass(self, atom_index: int, subset: MeasurableSet) -> Fraction:
        """Value f(x, B) for x in the given domain atom."""
        if subset.space != self.codomain:
            raise SpaceMismatch("set does not live on the codomain")
        return sum((self.rows[atom_index][b] for b in subset.atom_indices), ZERO)

    def __repr__(self) -> str:
        lines = []
        for a, row in enumerate(self.rows):
            entries = " ".join(format_fraction(e) for e in row)
            lines.append(f"{self.domain.atom_label(a)}: {entries}")
        return "StochasticKernel(" + "; ".join(lines) + ")"


def identity_kernel(space: MeasurableSpace) -> StochasticKernel:
    return lift_dirac(identity_function(space))


def compose(after: StochasticKernel, before: StochasticKernel) -> StochasticKernel:
    """Kernel composition: integrate `after` against each row of `before`.

    On finite spaces this is the exact matrix product
    ``(after ∘ before)[x, C] = sum_y before[x, y] * after[y, C]``.
    """
    if before.codomain != after.domain:
        raise SpaceMismatch("kernels are not composable")
    rows = tuple(
        tuple(
            sum((brow[y] * after.rows[y][z] for y in range(len(brow))), ZERO)
            for z in range(after.codomain.n_atoms)
        )
        for brow in before.rows
    )
    return StochasticKernel(before.domain, after.codomain, rows)


def lift_dirac(func: MeasurableFunction) -> StochasticKernel:
    """Embed a measurable function as the kernel of point masses at f(x)."""
    rows = []
    for a in range(func.domain.n_atoms):
        targets = {
            func.codomain.atom_of_index(func.mapping[i])
            for i in func.domain.atoms[a]
        }
        if len(targets) != 1:
            raise NotWellDefined(
                f"atom {func.domain.atom_label(a)} maps into several atoms")
        target = targets.pop()
        rows.append(tuple(
            ONE if b == target else ZERO for b in range(func.codomain.n_atoms)))
    return StochasticKernel(func.domain, func.codomain, tuple(rows))


def apply(kernel: StochasticKernel, measure: Probability) -> Probability:
    """Push a measure through a kernel: ``(f P)(B) = ∫ f(·, B) dP``."""
    if measure.space != kernel.domain:
        raise SpaceMismatch("measure does not live on the kernel's domain")
    weights = tuple(
        sum((measure.weights[a] * kernel.rows[a][b]
             for a in range(kernel.domain.n_atoms)), ZERO)
        for b in range(kernel.codomain.n_atoms)
    )
    return Probability(kernel.codomain, weights)


def is_deterministic(kernel: StochasticKernel) -> bool:
    """True iff every entry is 0 or 1."""
    return all(e == 0 or e == 1 for row in kernel.rows for e in row)


def deterministic_witness(kernel: StochasticKernel) -> MeasurableFunction | None:
    """The point function behind a deterministic kernel, when extractable.

    A witness is only returned when the codomain atoms are singletons;
    a coarser codomain cannot pin the kernel to a unique point map.
    """
    if not is_deterministic(kernel) or not kernel.codomain.is_discrete:
        return None
    mapping = [0] * len(kernel.domain.points)
    for a, row in enumerate(kernel.rows):
        target_atom = row.index(ONE)
        target_point = kernel.codomain.atoms[target_atom][0]
        for i in kernel.domain.atoms[a]:
            mapping[i] = target_point
    return MeasurableFunction(kernel.domain, kernel.codomain, tuple(mapping))


def bang(space: MeasurableSpace) -> StochasticKernel:
    """The unique kernel into the canonical terminal space."""
    return lift_dirac(bang_function(space))


def constant_kernel(domain: MeasurableSpace, target: Probability) -> StochasticKernel:
    """The kernel sending every input to `target`; factors through 1."""
    return StochasticKernel(
        domain, target.space, (target.weights,) * domain.n_atoms)


def is_independent(kernel: StochasticKernel) -> bool:
    """True iff all rows agree, i.e. the kernel factors through 1."""
    return all(row == kernel.rows[0] for row in kernel.rows[1:])


def kernel_from_measure(measure: Probability) -> StochasticKernel:
    """View a measure as a kernel out of the one-point space."""
    return constant_kernel(terminal(), measure)


def measure_from_kernel(kernel: StochasticKernel) -> Probability:
    """Collapse a kernel with a one-atom domain back to its measure."""
    if kernel.domain.n_atoms != 1:
        raise SpaceMismatch("kernel domain has more than one atom")
    return kernel.row_measure(0)


def kernel_to_unit_function(kernel: StochasticKernel) -> SimpleFunction:
    """The [0,1]-valued function behind a kernel into the truth-value space.

    Kernels into the two-point space and atom-constant functions into
    [0,1] carry the same data; this reads off ``x -> f(x, {top})``.
    """
    if kernel.codomain != two_point():
        raise SpaceMismatch("codomain is not the two-point space")
    top_atom = kernel.codomain.atom_of(TOP)
    return SimpleFunction(
        kernel.domain, tuple(row[top_atom] for row in kernel.rows))


def unit_function_to_kernel(func: SimpleFunction) -> StochasticKernel:
    """Inverse of `kernel_to_unit_function`; values must lie in [0,1]."""
    for a, v in enumerate(func.values):
        if not 0 <= v <= 1:
            raise ValidationError(
                f"value {v} on atom {func.space.atom_label(a)} outside [0,1]")
    return StochasticKernel(
        func.space, two_point(), tuple((v, 1 - v) for v in func.values))


def constant_to_point_kernel(
    domain: MeasurableSpace, codomain: MeasurableSpace, target: str
) -> StochasticKernel:
    return lift_dirac(constant_function(domain, codomain, target))
