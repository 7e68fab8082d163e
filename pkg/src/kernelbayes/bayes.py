"""Joint distributions, disintegration, and exact Bayesian updating.

A joint distribution on a product space is built from a prior and a
conditional kernel.  Disintegrating it against a marginal recovers a
conditional kernel; disintegrating the hypothesis-data joint against
the data marginal is exactly Bayesian inversion.  Everything is exact:
the product rule holds as an identity of rationals, and the notions the
theory only fixes "up to a null set" are compared with `ae_equal`.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    MeasurementNotAbsolutelyContinuous,
    SpaceMismatch,
    ValidationError,
)
from .kernel import (
    StochasticKernel,
    apply,
    compose,
    kernel_to_unit_function,
    unit_function_to_kernel,
)
from .measure import (
    ZERO,
    Probability,
    SimpleFunction,
    evaluate,
    integrate,
    is_absolutely_continuous,
    pushforward,
)
from .space import MeasurableSet, MeasurableSpace, ProductSpace, product

_SIDES = ("x", "y")


def _check_side(side: str) -> str:
    if side not in _SIDES:
        raise ValidationError(f"side must be one of {_SIDES}, got {side!r}")
    return side


@dataclass(frozen=True)
class JointDistribution:
    """A probability measure on a product space (not necessarily a product)."""

    x_space: MeasurableSpace
    y_space: MeasurableSpace
    joint: Probability

    def __post_init__(self):
        expected = product(self.x_space, self.y_space).space
        if self.joint.space != expected:
            raise SpaceMismatch(
                "joint measure does not live on the product of its factors")

    @property
    def prod(self) -> ProductSpace:
        return product(self.x_space, self.y_space)

    @property
    def marginal_x(self) -> Probability:
        return marginal(self, "x")

    @property
    def marginal_y(self) -> Probability:
        return marginal(self, "y")

    def rectangle_mass(self, a: MeasurableSet, b: MeasurableSet) -> Fraction:
        """Mass J(A x B) of a measurable rectangle."""
        return evaluate(self.joint, self.prod.rectangle(a, b))

    def atom_mass(self, x_atom: int, y_atom: int) -> Fraction:
        return self.joint.weights[self.prod.atom_index(x_atom, y_atom)]


def joint_from_prior(
    prior: Probability, conditional: StochasticKernel
) -> JointDistribution:
    """The joint determined by a prior and a conditional kernel.

    On rectangles, ``J(A x B) = sum over atoms a of A of
    prior(a) * conditional(a, B)``; the first marginal is the prior and
    the second is the prior pushed through the kernel.
    """
    if conditional.domain != prior.space:
        raise SpaceMismatch("kernel domain does not match the prior's space")
    prod = product(prior.space, conditional.codomain)
    weights = [ZERO] * prod.space.n_atoms
    for i, p in enumerate(prior.weights):
        for j, q in enumerate(conditional.rows[i]):
            weights[prod.atom_index(i, j)] = p * q
    return JointDistribution(
        prior.space, conditional.codomain, Probability(prod.space, tuple(weights)))


def marginal(joint_dist: JointDistribution, side: str) -> Probability:
    """Pushforward of the joint along a projection ("x" or "y")."""
    _check_side(side)
    prod = joint_dist.prod
    projection = prod.proj_x if side == "x" else prod.proj_y
    return pushforward(projection, joint_dist.joint)


def transpose_joint(joint_dist: JointDistribution) -> JointDistribution:
    """The same measure viewed on the product taken in the other order."""
    prod = joint_dist.prod
    flipped = product(joint_dist.y_space, joint_dist.x_space)
    weights = [ZERO] * flipped.space.n_atoms
    for k, w in enumerate(joint_dist.joint.weights):
        i, j = prod.atom_pair(k)
        weights[flipped.atom_index(j, i)] = w
    return JointDistribution(
        joint_dist.y_space,
        joint_dist.x_space,
        Probability(flipped.space, tuple(weights)),
    )


def check_compatibility(
    p_x: Probability,
    p_y: Probability,
    forward: StochasticKernel,
    backward: StochasticKernel,
) -> bool:
    """True iff forward maps p_x to p_y and backward maps p_y back to p_x.

    When this holds, the joints built from either side coincide as
    measures on the product (after transposing the backward one).
    """
    if forward.domain != p_x.space or forward.codomain != p_y.space:
        raise SpaceMismatch("forward kernel does not match the given spaces")
    if backward.domain != p_y.space or backward.codomain != p_x.space:
        raise SpaceMismatch("backward kernel does not match the given spaces")
    return apply(forward, p_x) == p_y and apply(backward, p_y) == p_x


def disintegrate(joint_dist: JointDistribution, given: str = "y") -> StochasticKernel:
    """Regular conditional probability of one factor given the other.

    With ``given="y"`` the result is a kernel Y -> X whose row at a
    y-atom is ``A -> J(A x y) / P_Y(y)``.  Rows at P_Y-null atoms are
    not constrained by the joint; they are set to the X-marginal, which
    keeps the inference retraction exact even on degenerate inputs and
    is deterministic for serialization.  Any other completion agrees
    with this one up to a P_Y-null set.
    """
    _check_side(given)
    on_y = given == "y"
    base = joint_dist.y_space if on_y else joint_dist.x_space
    other = joint_dist.x_space if on_y else joint_dist.y_space
    given_marginal = marginal(joint_dist, given)
    fallback = marginal(joint_dist, "x" if on_y else "y").weights
    rows = []
    for g in range(base.n_atoms):
        denom = given_marginal.weights[g]
        if denom == 0:
            rows.append(fallback)
        elif on_y:
            rows.append(tuple(
                joint_dist.atom_mass(o, g) / denom for o in range(other.n_atoms)))
        else:
            rows.append(tuple(
                joint_dist.atom_mass(g, o) / denom for o in range(other.n_atoms)))
    return StochasticKernel(base, other, tuple(rows))


def disintegrate_strong(
    joint_dist: JointDistribution, given: str = "y"
) -> StochasticKernel:
    """Conditional kernel into the full product, concentrated on the fiber.

    With ``given="y"`` this is a kernel Y -> X x Y with
    ``f(y, A x B) = J(A x (B intersect y)) / P_Y(y)`` on non-null atoms;
    projecting to X recovers `disintegrate`, projecting to Y gives the
    point mass at y, and pushing P_Y through it returns the joint.
    Null rows follow the same marginal convention as `disintegrate`.
    """
    _check_side(given)
    prod = joint_dist.prod
    base = joint_dist.y_space if given == "y" else joint_dist.x_space
    given_marginal = marginal(joint_dist, given)
    fallback = marginal(joint_dist, "x" if given == "y" else "y").weights
    rows = []
    for g in range(base.n_atoms):
        denom = given_marginal.weights[g]
        row = [ZERO] * prod.space.n_atoms
        for k in range(prod.space.n_atoms):
            i, j = prod.atom_pair(k)
            own, other = (j, i) if given == "y" else (i, j)
            if own != g:
                continue
            if denom > 0:
                row[k] = joint_dist.joint.weights[k] / denom
            else:
                row[k] = fallback[other]
        rows.append(tuple(row))
    return StochasticKernel(base, prod.space, tuple(rows))


def ae_equal(
    left: StochasticKernel, right: StochasticKernel, measure: Probability
) -> bool:
    """Equality of kernels up to a null set of the given domain measure."""
    if left.domain != right.domain or left.codomain != right.codomain:
        raise SpaceMismatch("kernels have different domains or codomains")
    if measure.space != left.domain:
        raise SpaceMismatch("measure does not live on the kernels' domain")
    return all(
        left.rows[a] == right.rows[a]
        for a in range(left.domain.n_atoms)
        if measure.weights[a] > 0
    )


@dataclass(frozen=True)
class BayesModel:
    """Hypothesis space, data space, prior, and sampling kernel."""

    hypotheses: MeasurableSpace
    data: MeasurableSpace
    prior: Probability
    sampling: StochasticKernel

    def __post_init__(self):
        if self.prior.space != self.hypotheses:
            raise SpaceMismatch("prior does not live on the hypothesis space")
        if self.sampling.domain != self.hypotheses:
            raise SpaceMismatch("sampling kernel domain is not the hypothesis space")
        if self.sampling.codomain != self.data:
            raise SpaceMismatch("sampling kernel codomain is not the data space")


@dataclass(frozen=True)
class InferenceResult:
    """The data-to-hypotheses kernel together with the induced data prior."""

    inference: StochasticKernel
    data_prior: Probability


def inference(model: BayesModel) -> InferenceResult:
    """Invert a sampling kernel against a prior.

    The data prior is the prior pushed through the sampling kernel; the
    inference kernel is the disintegration of the hypothesis-data joint
    given the data side.  The product rule
    ``integral over A of S(., B) dP_H = J(A x B)
    = integral over B of I(., A) dP_D`` then holds exactly on every
    rectangle, and applying the inference kernel to the data prior
    returns the prior.
    """
    joint_dist = joint_from_prior(model.prior, model.sampling)
    data_prior = apply(model.sampling, model.prior)
    return InferenceResult(disintegrate(joint_dist, given="y"), data_prior)


def posterior(result: InferenceResult, measurement: Probability) -> Probability:
    """Apply the inference kernel to a measurement on the data space.

    The measurement must be absolutely continuous with respect to the
    data prior; otherwise a different null-set completion of the
    inference kernel could change the answer, so the update is refused.
    """
    if measurement.space != result.data_prior.space:
        raise SpaceMismatch("measurement does not live on the data space")
    if not is_absolutely_continuous(measurement, result.data_prior):
        raise MeasurementNotAbsolutelyContinuous(
            "measurement puts mass on an atom with zero data-prior mass")
    return apply(result.inference, measurement)


def update_loop(
    model: BayesModel,
    measurements: Iterable[Probability],
    resample: Callable[[int, Probability], StochasticKernel] | None = None,
) -> tuple[Probability, ...]:
    """Sequential Bayesian updating.

    Each step re-derives the inference kernel from the current prior
    and sampling kernel, applies it to the step's measurement, and
    threads the posterior forward as the next prior.  When `resample`
    is given it is called with (step index, posterior) after each step
    and its result replaces the sampling kernel for the next step.
    """
    posteriors: list[Probability] = []
    current = model
    for step, measurement in enumerate(measurements):
        result = inference(current)
        try:
            updated = posterior(result, measurement)
        except MeasurementNotAbsolutelyContinuous as exc:
            raise MeasurementNotAbsolutelyContinuous(
                f"measurement at step {step} puts mass on an atom with zero "
                f"data-prior mass", step=step) from exc
        posteriors.append(updated)
        sampling = current.sampling if resample is None else resample(step, updated)
        current = BayesModel(current.hypotheses, current.data, updated, sampling)
    return tuple(posteriors)


def tonelli_check(
    joint_dist: JointDistribution, func: SimpleFunction
) -> tuple[Fraction, Fraction, Fraction]:
    """Integrate a [0,1]-valued function over a joint in three ways.

    Returns ``(integral over X, integral over the product, integral
    over Y)``.  The outer integrals are computed by composing the
    function (viewed as a kernel into the two-point space) with the
    strong disintegrations of the joint, so the three values agreeing
    is the iterated-integral identity, exactly.
    """
    prod = joint_dist.prod
    if func.space != prod.space:
        raise SpaceMismatch("function does not live on the product space")
    for v in func.values:
        if not 0 <= v <= 1:
            raise ValidationError(f"value {v} outside [0,1]")
    as_kernel = unit_function_to_kernel(func)
    via_x = kernel_to_unit_function(
        compose(as_kernel, disintegrate_strong(joint_dist, given="x")))
    via_y = kernel_to_unit_function(
        compose(as_kernel, disintegrate_strong(joint_dist, given="y")))
    return (
        integrate(via_x, joint_dist.marginal_x),
        integrate(func, joint_dist.joint),
        integrate(via_y, joint_dist.marginal_y),
    )
