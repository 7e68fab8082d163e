"""Exact probability over finite measurable spaces.

Finite measurable spaces, stochastic kernels and their composition,
joint distributions and disintegration, exact Bayesian updating, the
probability monad with decision-rule law checking, and an exact
optimal-transport solver.  All arithmetic is rational, so every
identity is checked as an exact equality.
"""

from .bayes import (
    BayesModel,
    InferenceResult,
    JointDistribution,
    ae_equal,
    check_compatibility,
    disintegrate,
    disintegrate_strong,
    inference,
    joint_from_prior,
    marginal,
    posterior,
    tonelli_check,
    transpose_joint,
    update_loop,
)
from .errors import (
    EmptyBlock,
    InfeasiblePlan,
    KernelBayesError,
    MeasurementNotAbsolutelyContinuous,
    NotMeasurable,
    NotWellDefined,
    OverlappingBlocks,
    ParseError,
    SampleOffGrid,
    SpaceMismatch,
    UncoveredPoint,
    UnknownPoint,
    ValidationError,
)
from .giry import (
    AlgebraReport,
    AllOf,
    AnyOf,
    DecisionRule,
    MonadLawReport,
    Negation,
    SecondOrderMeasure,
    SimplexGrid,
    Threshold,
    ap_expectation,
    check_algebra,
    check_monad_laws,
    dirac_detector_rule,
    evaluation_kernel,
    kleisli_extend,
    mix_second_order,
    mu,
    simplex_grid,
    unit,
)
from .kernel import (
    StochasticKernel,
    apply,
    bang,
    compose,
    constant_kernel,
    deterministic_witness,
    identity_kernel,
    is_deterministic,
    is_independent,
    kernel_from_measure,
    kernel_to_unit_function,
    lift_dirac,
    measure_from_kernel,
    unit_function_to_kernel,
)
from .measure import (
    Probability,
    SimpleFunction,
    dirac,
    evaluate,
    integrate,
    is_absolutely_continuous,
    pushforward,
    uniform,
)
from .space import (
    BOTTOM,
    TOP,
    MeasurableFunction,
    MeasurableSet,
    MeasurableSpace,
    ProductSpace,
    bang_function,
    compose_functions,
    constant_function,
    discrete_space,
    identity_function,
    is_measurable_function,
    make_space,
    product,
    space_from_generating_sets,
    terminal,
    two_point,
)
from .transport import TransportPlan, TransportProblem, solve_transport, verify_plan

__version__ = "0.1.0"
