"""Command-line front end: deterministic reports over scenario files.

Four subcommands: `infer` runs the inference kernel and posterior
updates, `laws` checks the monad and decision-rule laws, `transport`
solves and certifies an optimal transport instance, and `ap` inspects
distributions over Bernoulli parameters.  Given identical inputs and
seed, reports are byte-identical.

Exit codes: 0 success, 2 parse or validation error, 3 precondition
failure, 4 law violations found.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import random
import sys
from dataclasses import dataclass, field

from .bayes import BayesModel, inference, update_loop
from .errors import (
    KernelBayesError,
    MeasurementNotAbsolutelyContinuous,
    ParseError,
    SampleOffGrid,
    ValidationError,
)
from .giry import (
    SecondOrderMeasure,
    check_algebra,
    check_monad_laws,
    random_second_order,
    random_third_order,
    simplex_grid,
    ap_expectation,
)
from .kernel import StochasticKernel
from .measure import Probability, dirac, uniform
from .rationals import format_fraction, to_fraction
from .scenario import Scenario, load_scenario, scenario_digest
from .space import two_point
from .transport import solve_transport, verify_plan

DEFAULT_SEED = 0
SEED_ENV_VAR = "KERNELBAYES_SEED"


@dataclass
class Report:
    """Deterministic text report; identical inputs give identical bytes."""

    lines: list[str] = field(default_factory=list)
    exit_code: int = 0

    def add(self, line: str = "") -> None:
        self.lines.append(line)

    def render(self) -> str:
        return "\n".join(self.lines) + "\n"


def _fmt_measure(measure: Probability) -> str:
    return " ".join(
        f"{measure.space.atom_label(a)}={format_fraction(w)}"
        for a, w in enumerate(measure.weights))


def _fmt_vector(measure: Probability) -> str:
    return "(" + ",".join(str(w) for w in measure.weights) + ")"


def _fmt_sample(sample: SecondOrderMeasure) -> str:
    return " + ".join(
        f"{_fmt_vector(q)}*{format_fraction(w)}" for q, w in sample.support)


def _add_kernel(report: Report, kernel: StochasticKernel) -> None:
    report.add("  columns: " + " ".join(kernel.codomain.atom_labels))
    for a, row in enumerate(kernel.rows):
        entries = " ".join(format_fraction(e) for e in row)
        report.add(f"  {kernel.domain.atom_label(a)}: {entries}")


def _require_section(scenario: Scenario, attribute: str, what: str):
    value = getattr(scenario, attribute)
    if value is None:
        raise ValidationError(f"scenario has no {what} section")
    return value


def cmd_infer(path: str) -> Report:
    """Run inference and the posterior update loop for a scenario."""
    scenario = load_scenario(path)
    model_ref = _require_section(scenario, "model", "model")
    model: BayesModel = model_ref.resolved
    result = inference(model)
    report = Report()
    report.add("command: infer")
    report.add(f"inputs: sha256:{scenario_digest(scenario)}")
    report.add(f"hypothesis atoms: {' '.join(model.hypotheses.atom_labels)}")
    report.add(f"data atoms: {' '.join(model.data.atom_labels)}")
    report.add(f"prior: {_fmt_measure(model.prior)}")
    report.add(f"data prior: {_fmt_measure(result.data_prior)}")
    report.add("inference kernel (rows: data atoms, columns: hypothesis atoms):")
    _add_kernel(report, result.inference)
    if scenario.measurements:
        measurements = [scenario.measures[name] for name in scenario.measurements]
        posteriors = update_loop(model, measurements)
        for step, (name, post) in enumerate(
                zip(scenario.measurements, posteriors), start=1):
            report.add(f"posterior[{step}] ({name}): {_fmt_measure(post)}")
    return report


def _resolve_seed(flag_seed: int | None, scenario_seed: int | None) -> int:
    if flag_seed is not None:
        return flag_seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParseError(f"{SEED_ENV_VAR} must be an integer, got {env!r}")
    if scenario_seed is not None:
        return scenario_seed
    return DEFAULT_SEED


def cmd_laws(path: str, samples: int, seed: int | None) -> Report:
    """Check monad laws and the decision-rule algebra laws for a scenario."""
    scenario = load_scenario(path)
    grid = _require_section(scenario, "grid", "grid").resolved
    rule = _require_section(scenario, "rule", "rule").resolved
    resolved_seed = _resolve_seed(seed, scenario.seed)
    rng = random.Random(resolved_seed)
    generated = [random_second_order(grid, rng) for _ in range(samples)]
    third_order = [random_third_order(grid, rng) for _ in range(samples)]
    all_samples = list(scenario.second_order_samples) + generated

    monad = check_monad_laws(grid, all_samples, third_order)
    algebra = check_algebra(rule, grid, all_samples)

    report = Report()
    report.add("command: laws")
    report.add(f"inputs: sha256:{scenario_digest(scenario)}")
    report.add(f"seed: {resolved_seed}")
    report.add(f"samples: {samples} generated + "
               f"{len(scenario.second_order_samples)} from scenario")
    report.add(f"grid: resolution {grid.resolution}, {len(grid)} points")
    unit_ok = not monad.left_unit_violations and not monad.right_unit_violations
    report.add(
        f"monad unit laws: {'ok' if unit_ok else 'VIOLATED'}"
        f" ({monad.points_checked} grid points, "
        f"{len(all_samples)} sampled collapses)")
    report.add(
        f"monad associativity: "
        f"{'ok' if not monad.associativity_violations else 'VIOLATED'}"
        f" ({len(third_order)} third-order samples)")
    for index in monad.associativity_violations:
        report.add(f"  third-order sample {index}: collapse orders disagree")
    report.add(
        f"rule unit law: {'ok' if not algebra.unit_violations else 'VIOLATED'}"
        f" ({algebra.points_checked} points)")
    for point, decided in algebra.unit_violations:
        report.add(f"  point {point}: rule sends its point mass to {decided}")
    report.add(
        f"rule associativity: "
        f"{'ok' if not algebra.associativity_violations else 'VIOLATED'}"
        f" ({algebra.samples_checked} samples)")
    for violation in algebra.associativity_violations:
        report.add(
            f"  sample {violation.sample_index}: Q = {_fmt_sample(violation.sample)};"
            f" mu route -> {violation.via_mu};"
            f" pushforward route -> {violation.via_pushforward}")
    total = (
        len(monad.left_unit_violations)
        + len(monad.right_unit_violations)
        + len(monad.associativity_violations)
        + len(algebra.unit_violations)
        + len(algebra.associativity_violations))
    report.add(f"violations: {total}")
    report.exit_code = 0 if total == 0 else 4
    return report


def cmd_transport(path: str) -> Report:
    """Solve a scenario's transport problem and certify the plan."""
    scenario = load_scenario(path)
    problem = _require_section(scenario, "transport", "transport").resolved
    plan = solve_transport(problem)
    certified = verify_plan(problem, plan)
    report = Report()
    report.add("command: transport")
    report.add(f"inputs: sha256:{scenario_digest(scenario)}")
    report.add(f"supply: {_fmt_measure(problem.supply)}")
    report.add(f"demand: {_fmt_measure(problem.demand)}")
    report.add("cost (rows: supply atoms, columns: demand atoms):")
    for i, row in enumerate(problem.cost):
        entries = " ".join(format_fraction(e) for e in row)
        report.add(f"  {problem.supply.space.atom_label(i)}: {entries}")
    report.add("plan (rows: supply atoms, columns: demand atoms):")
    for i, row in enumerate(plan.flow()):
        entries = " ".join(format_fraction(e) for e in row)
        report.add(f"  {problem.supply.space.atom_label(i)}: {entries}")
    report.add(f"objective: {format_fraction(plan.objective)}")
    report.add(f"certified optimal: {'yes' if certified else 'no'}")
    return report


def _parse_distribution(choice: str, grid) -> Probability:
    if choice == "uniform":
        return uniform(grid.grid)
    if choice.startswith("point:"):
        value = to_fraction(choice[len("point:"):])
        if not 0 <= value <= 1:
            raise ParseError(f"point parameter {choice!r} outside [0,1]")
        target = Probability(grid.base_space, (value, 1 - value))
        if not grid.contains(target):
            raise ParseError(
                f"point {format_fraction(value)} is not on the "
                f"resolution-{grid.resolution} grid")
        return dirac(grid.grid, grid.grid.points[grid.index_of(target)])
    raise ParseError(
        f"distribution must be 'uniform' or 'point:<rational>', got {choice!r}")


def cmd_ap(resolution: int, distribution: str) -> Report:
    """Expected truth value of a distribution over Bernoulli parameters."""
    if resolution < 1:
        raise ParseError("resolution must be a positive integer")
    grid = simplex_grid(two_point(), resolution)
    higher_order = _parse_distribution(distribution, grid)
    expectation = ap_expectation(grid, higher_order)
    canonical = f"ap:resolution={resolution}:distribution={distribution}"
    digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
    report = Report()
    report.add("command: ap")
    report.add(f"inputs: sha256:{digest}")
    report.add(f"resolution: {resolution}")
    report.add(f"distribution: {distribution}")
    report.add(f"expected value: {format_fraction(expectation)}")
    report.add("weights over bernoulli parameters:")
    for index, label in enumerate(grid.grid.points):
        weight = higher_order.weights[index]
        report.add(f"  {label}: {format_fraction(weight)}")
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kernelbayes",
        description="Exact finite-space engine: Bayesian inversion, "
                    "monad and decision-rule law checks, optimal transport.")
    commands = parser.add_subparsers(dest="command", required=True)

    infer = commands.add_parser("infer", help="run inference and updates")
    infer.add_argument("scenario", help="path to a scenario JSON file")

    laws = commands.add_parser("laws", help="check monad and algebra laws")
    laws.add_argument("scenario", help="path to a scenario JSON file")
    laws.add_argument("--samples", type=int, default=100,
                      help="number of pseudo-random samples (default 100)")
    laws.add_argument("--seed", type=int, default=None,
                      help=f"sampling seed (overrides ${SEED_ENV_VAR} and the "
                           f"scenario seed)")

    transport = commands.add_parser("transport", help="solve optimal transport")
    transport.add_argument("scenario", help="path to a scenario JSON file")

    ap = commands.add_parser("ap", help="distributions over Bernoulli parameters")
    ap.add_argument("--resolution", type=int, default=100,
                    help="simplex grid denominator (default 100)")
    ap.add_argument("--distribution", default="uniform",
                    help="'uniform' or 'point:<rational>' (default uniform)")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "infer":
            report = cmd_infer(args.scenario)
        elif args.command == "laws":
            if args.samples < 0:
                raise ParseError("--samples must be nonnegative")
            report = cmd_laws(args.scenario, args.samples, args.seed)
        elif args.command == "transport":
            report = cmd_transport(args.scenario)
        else:
            report = cmd_ap(args.resolution, args.distribution)
    except (MeasurementNotAbsolutelyContinuous, SampleOffGrid) as exc:
        sys.stderr.buffer.write(f"error: {exc}\n".encode("utf-8"))
        sys.stderr.buffer.flush()
        return 3
    except KernelBayesError as exc:
        sys.stderr.buffer.write(f"error: {exc}\n".encode("utf-8"))
        sys.stderr.buffer.flush()
        return 2
    sys.stdout.buffer.write(report.render().encode("utf-8"))
    sys.stdout.buffer.flush()
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
