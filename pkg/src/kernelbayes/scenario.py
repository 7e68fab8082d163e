"""Scenario files: a JSON format tying spaces, measures, and kernels together.

Rationals are written as ``"num/den"`` strings so exactness survives
serialization; floating literals are rejected.  Every reference is
resolved and every invariant checked at load time, and error messages
name the offending entity.
"""

from __future__ import annotations

import hashlib
import json
from contextlib import contextmanager
from dataclasses import dataclass

from .bayes import BayesModel
from .errors import KernelBayesError, ParseError, ValidationError
from .giry import (
    AllOf,
    AnyOf,
    DecisionRule,
    Negation,
    SecondOrderMeasure,
    SimplexGrid,
    Threshold,
    simplex_grid,
)
from .kernel import StochasticKernel
from .measure import Probability
from .rationals import format_fraction, to_fraction
from .space import MeasurableSet, MeasurableSpace, make_space
from .transport import TransportProblem

_TOP_LEVEL_KEYS = {
    "spaces", "measures", "kernels", "model", "measurements",
    "transport", "grid", "rule", "second_order_samples", "seed",
}


@dataclass
class ModelRef:
    prior: str
    sampling: str
    resolved: BayesModel


@dataclass
class TransportRef:
    supply: str
    demand: str
    resolved: TransportProblem


@dataclass
class GridRef:
    space: str
    resolution: int
    resolved: SimplexGrid


@dataclass
class RuleRef:
    space: str
    resolved: DecisionRule


@dataclass
class Scenario:
    """A fully resolved scenario file."""

    spaces: dict[str, MeasurableSpace]
    measures: dict[str, Probability]
    kernels: dict[str, StochasticKernel]
    model: ModelRef | None
    measurements: tuple[str, ...]
    transport: TransportRef | None
    grid: GridRef | None
    rule: RuleRef | None
    second_order_samples: tuple[SecondOrderMeasure, ...]
    seed: int | None


@contextmanager
def _entity(name: str):
    """Re-raise package errors with the offending entity named."""
    try:
        yield
    except KernelBayesError as exc:
        raise type(exc)(f"{name}: {exc}") from exc


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParseError(message)


def _as_dict(value, name: str) -> dict:
    _require(isinstance(value, dict), f"{name}: expected an object")
    return value


def _as_list(value, name: str) -> list:
    _require(isinstance(value, list), f"{name}: expected a list")
    return value


def _as_str(value, name: str) -> str:
    _require(isinstance(value, str), f"{name}: expected a string")
    return value


def _as_int(value, name: str) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool),
             f"{name}: expected an integer")
    return value


def _lookup(table: dict, key: str, kind: str, name: str):
    _require(key in table, f"{name}: unknown {kind} {key!r}")
    return table[key]


def _parse_space(name: str, data) -> MeasurableSpace:
    data = _as_dict(data, name)
    _require(set(data) <= {"points", "atoms"},
             f"{name}: unknown keys {sorted(set(data) - {'points', 'atoms'})}")
    points = [_as_str(p, name) for p in _as_list(data.get("points"), name)]
    if "atoms" in data:
        blocks = [
            [_as_str(p, name) for p in _as_list(block, name)]
            for block in _as_list(data["atoms"], name)
        ]
    else:
        blocks = [[p] for p in points]
    with _entity(name):
        return make_space(points, blocks)


def _parse_measure(name: str, data, spaces: dict[str, MeasurableSpace]) -> Probability:
    data = _as_dict(data, name)
    _require(set(data) == {"space", "atoms"},
             f"{name}: expected keys 'space' and 'atoms'")
    space = _lookup(spaces, _as_str(data["space"], name), "space", name)
    entries = _as_list(data["atoms"], name)
    _require(len(entries) == space.n_atoms,
             f"{name}: expected {space.n_atoms} atom entries, got {len(entries)}")
    weights = []
    for a, entry in enumerate(entries):
        entry = _as_list(entry, name)
        _require(len(entry) == 2, f"{name}: atom entries are [label, rational] pairs")
        label, value = entry
        expected = space.atom_label(a)
        _require(label == expected,
                 f"{name}: atom {a} labelled {label!r}, expected {expected!r}")
        with _entity(name):
            weights.append(to_fraction(value))
    with _entity(name):
        return Probability(space, tuple(weights))


def _parse_kernel(name: str, data, spaces) -> StochasticKernel:
    data = _as_dict(data, name)
    _require(set(data) == {"domain", "codomain", "rows"},
             f"{name}: expected keys 'domain', 'codomain', 'rows'")
    domain = _lookup(spaces, _as_str(data["domain"], name), "space", name)
    codomain = _lookup(spaces, _as_str(data["codomain"], name), "space", name)
    rows = []
    for row in _as_list(data["rows"], name):
        with _entity(name):
            rows.append(tuple(to_fraction(e) for e in _as_list(row, name)))
    with _entity(name):
        return StochasticKernel(domain, codomain, tuple(rows))


def _parse_predicate(name: str, data, space: MeasurableSpace):
    data = _as_dict(data, name)
    if "all" in data:
        _require(set(data) == {"all"}, f"{name}: bad predicate keys")
        return AllOf(tuple(
            _parse_predicate(name, t, space) for t in _as_list(data["all"], name)))
    if "any" in data:
        _require(set(data) == {"any"}, f"{name}: bad predicate keys")
        return AnyOf(tuple(
            _parse_predicate(name, t, space) for t in _as_list(data["any"], name)))
    if "not" in data:
        _require(set(data) == {"not"}, f"{name}: bad predicate keys")
        return Negation(_parse_predicate(name, data["not"], space))
    _require(set(data) == {"set", "op", "value"},
             f"{name}: predicate needs 'set', 'op', 'value'")
    labels = [_as_str(p, name) for p in _as_list(data["set"], name)]
    with _entity(name):
        subset = MeasurableSet.from_points(space, labels)
        return Threshold(subset, _as_str(data["op"], name), to_fraction(data["value"]))


def _parse_rule(data, spaces) -> RuleRef:
    name = "rule"
    data = _as_dict(data, name)
    _require(set(data) == {"space", "clauses"},
             f"{name}: expected keys 'space' and 'clauses'")
    space_name = _as_str(data["space"], name)
    space = _lookup(spaces, space_name, "space", name)
    clauses = []
    for c, clause in enumerate(_as_list(data["clauses"], name)):
        clause = _as_dict(clause, name)
        _require(set(clause) <= {"when", "then"} and "then" in clause,
                 f"{name}: clause {c} needs 'then' and optionally 'when'")
        predicate = (
            _parse_predicate(f"{name} clause {c}", clause["when"], space)
            if "when" in clause else None)
        clauses.append((predicate, _as_str(clause["then"], name)))
    with _entity(name):
        return RuleRef(space_name, DecisionRule(space, tuple(clauses)))


def _parse_samples(data, grid: GridRef | None) -> tuple[SecondOrderMeasure, ...]:
    name = "second_order_samples"
    _require(grid is not None, f"{name}: requires a grid")
    base = grid.resolved.base_space
    samples = []
    for s, sample in enumerate(_as_list(data, name)):
        sample = _as_dict(sample, name)
        _require(set(sample) == {"support"}, f"{name}: sample {s} needs 'support'")
        support = []
        for entry in _as_list(sample["support"], name):
            entry = _as_list(entry, name)
            _require(len(entry) == 2,
                     f"{name}: sample {s} entries are [weights, rational] pairs")
            vector, weight = entry
            vector = _as_list(vector, name)
            with _entity(f"{name}[{s}]"):
                dist = Probability(base, tuple(to_fraction(v) for v in vector))
                support.append((dist, to_fraction(weight)))
        with _entity(f"{name}[{s}]"):
            samples.append(SecondOrderMeasure(base, tuple(support)))
    return tuple(samples)


def parse_scenario(data) -> Scenario:
    """Resolve and validate a scenario given as a decoded JSON object."""
    data = _as_dict(data, "scenario")
    unknown = set(data) - _TOP_LEVEL_KEYS
    _require(not unknown, f"scenario: unknown keys {sorted(unknown)}")

    spaces: dict[str, MeasurableSpace] = {}
    for name, value in _as_dict(data.get("spaces", {}), "spaces").items():
        spaces[name] = _parse_space(f"space {name!r}", value)

    measures: dict[str, Probability] = {}
    for name, value in _as_dict(data.get("measures", {}), "measures").items():
        measures[name] = _parse_measure(f"measure {name!r}", value, spaces)

    kernels: dict[str, StochasticKernel] = {}
    for name, value in _as_dict(data.get("kernels", {}), "kernels").items():
        kernels[name] = _parse_kernel(f"kernel {name!r}", value, spaces)

    model = None
    if "model" in data:
        section = _as_dict(data["model"], "model")
        _require(set(section) == {"prior", "sampling"},
                 "model: expected keys 'prior' and 'sampling'")
        prior_name = _as_str(section["prior"], "model")
        sampling_name = _as_str(section["sampling"], "model")
        prior = _lookup(measures, prior_name, "measure", "model")
        sampling = _lookup(kernels, sampling_name, "kernel", "model")
        with _entity("model"):
            model = ModelRef(
                prior_name, sampling_name,
                BayesModel(sampling.domain, sampling.codomain, prior, sampling))

    measurements: list[str] = []
    if "measurements" in data:
        _require(model is not None, "measurements: require a model")
        for name in _as_list(data["measurements"], "measurements"):
            name = _as_str(name, "measurements")
            measure = _lookup(measures, name, "measure", "measurements")
            _require(measure.space == model.resolved.data,
                     f"measurements: {name!r} does not live on the data space")
            measurements.append(name)

    transport = None
    if "transport" in data:
        section = _as_dict(data["transport"], "transport")
        _require(set(section) == {"supply", "demand", "cost"},
                 "transport: expected keys 'supply', 'demand', 'cost'")
        supply_name = _as_str(section["supply"], "transport")
        demand_name = _as_str(section["demand"], "transport")
        supply = _lookup(measures, supply_name, "measure", "transport")
        demand = _lookup(measures, demand_name, "measure", "transport")
        rows = []
        for row in _as_list(section["cost"], "transport"):
            with _entity("transport"):
                rows.append(tuple(to_fraction(e) for e in _as_list(row, "transport")))
        with _entity("transport"):
            transport = TransportRef(
                supply_name, demand_name,
                TransportProblem(supply, demand, tuple(rows)))

    grid = None
    if "grid" in data:
        section = _as_dict(data["grid"], "grid")
        _require(set(section) == {"space", "resolution"},
                 "grid: expected keys 'space' and 'resolution'")
        space_name = _as_str(section["space"], "grid")
        space = _lookup(spaces, space_name, "space", "grid")
        resolution = _as_int(section["resolution"], "grid")
        with _entity("grid"):
            grid = GridRef(space_name, resolution, simplex_grid(space, resolution))

    rule = None
    if "rule" in data:
        rule = _parse_rule(data["rule"], spaces)

    samples: tuple[SecondOrderMeasure, ...] = ()
    if "second_order_samples" in data:
        samples = _parse_samples(data["second_order_samples"], grid)

    seed = _as_int(data["seed"], "seed") if "seed" in data else None

    return Scenario(
        spaces=spaces,
        measures=measures,
        kernels=kernels,
        model=model,
        measurements=tuple(measurements),
        transport=transport,
        grid=grid,
        rule=rule,
        second_order_samples=samples,
        seed=seed,
    )


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ParseError(f"cannot read scenario {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"scenario {path!r} is not valid JSON: {exc}") from exc
    return parse_scenario(data)


# --- serialization ----------------------------------------------------------

def space_to_dict(space: MeasurableSpace) -> dict:
    return {
        "points": list(space.points),
        "atoms": [list(space.atom_points(a)) for a in range(space.n_atoms)],
    }


def measure_to_dict(measure: Probability, space_name: str) -> dict:
    return {
        "space": space_name,
        "atoms": [
            [measure.space.atom_label(a), format_fraction(w)]
            for a, w in enumerate(measure.weights)
        ],
    }


def kernel_to_dict(kernel: StochasticKernel, domain_name: str, codomain_name: str) -> dict:
    return {
        "domain": domain_name,
        "codomain": codomain_name,
        "rows": [[format_fraction(e) for e in row] for row in kernel.rows],
    }


def _predicate_to_dict(predicate) -> dict:
    if isinstance(predicate, Threshold):
        return {
            "set": list(predicate.subset.point_labels()),
            "op": predicate.comparator,
            "value": format_fraction(predicate.bound),
        }
    if isinstance(predicate, AllOf):
        return {"all": [_predicate_to_dict(t) for t in predicate.terms]}
    if isinstance(predicate, AnyOf):
        return {"any": [_predicate_to_dict(t) for t in predicate.terms]}
    if isinstance(predicate, Negation):
        return {"not": _predicate_to_dict(predicate.term)}
    raise ValidationError(f"unknown predicate type {type(predicate).__name__}")


def _sample_to_dict(sample: SecondOrderMeasure) -> dict:
    return {
        "support": [
            [[format_fraction(w) for w in dist.weights], format_fraction(weight)]
            for dist, weight in sample.support
        ],
    }


def _space_name(scenario: Scenario, space: MeasurableSpace, context: str) -> str:
    for name, candidate in scenario.spaces.items():
        if candidate == space:
            return name
    raise ValidationError(f"{context}: space is not among the named spaces")


def scenario_to_dict(scenario: Scenario) -> dict:
    """Canonical JSON-ready form; reloading it reproduces the scenario."""
    out: dict = {}
    out["spaces"] = {
        name: space_to_dict(space) for name, space in scenario.spaces.items()}
    if scenario.measures:
        out["measures"] = {
            name: measure_to_dict(
                m, _space_name(scenario, m.space, f"measure {name!r}"))
            for name, m in scenario.measures.items()
        }
    if scenario.kernels:
        out["kernels"] = {
            name: kernel_to_dict(
                k,
                _space_name(scenario, k.domain, f"kernel {name!r}"),
                _space_name(scenario, k.codomain, f"kernel {name!r}"),
            )
            for name, k in scenario.kernels.items()
        }
    if scenario.model is not None:
        out["model"] = {
            "prior": scenario.model.prior,
            "sampling": scenario.model.sampling,
        }
    if scenario.measurements:
        out["measurements"] = list(scenario.measurements)
    if scenario.transport is not None:
        out["transport"] = {
            "supply": scenario.transport.supply,
            "demand": scenario.transport.demand,
            "cost": [
                [format_fraction(e) for e in row]
                for row in scenario.transport.resolved.cost
            ],
        }
    if scenario.grid is not None:
        out["grid"] = {
            "space": scenario.grid.space,
            "resolution": scenario.grid.resolution,
        }
    if scenario.rule is not None:
        out["rule"] = {
            "space": scenario.rule.space,
            "clauses": [
                ({"when": _predicate_to_dict(p), "then": output}
                 if p is not None else {"then": output})
                for p, output in scenario.rule.resolved.clauses
            ],
        }
    if scenario.second_order_samples:
        out["second_order_samples"] = [
            _sample_to_dict(s) for s in scenario.second_order_samples]
    if scenario.seed is not None:
        out["seed"] = scenario.seed
    return out


def scenario_digest(scenario: Scenario) -> str:
    """sha256 of the canonical serialized form of the resolved inputs."""
    canonical = json.dumps(
        scenario_to_dict(scenario),
        sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
