"""Exact discrete optimal transport between two marginals.

Solves for the joint distribution with prescribed marginals that
minimizes a linear cost, using the primal transportation simplex over
exact rationals: northwest-corner start, Bland's smallest-index rule
for entering and leaving cells (which rules out cycling without any
epsilon perturbation).  Verification is independent of the solver: a
plan is certified optimal by recovering dual potentials from its
support with a shortest-path pass and checking complementary
slackness, which fails exactly when an improving cycle exists.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .bayes import JointDistribution
from .errors import InfeasiblePlan, SpaceMismatch, ValidationError
from .measure import ZERO, Probability
from .rationals import to_fraction
from .space import product


@dataclass(frozen=True)
class TransportProblem:
    """Supply and demand marginals plus a unit-cost matrix over atoms."""

    supply: Probability
    demand: Probability
    cost: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        cost = tuple(tuple(to_fraction(e) for e in row) for row in self.cost)
        object.__setattr__(self, "cost", cost)
        if len(cost) != self.supply.space.n_atoms:
            raise ValidationError(
                f"cost has {len(cost)} rows, expected "
                f"{self.supply.space.n_atoms}")
        for row in cost:
            if len(row) != self.demand.space.n_atoms:
                raise ValidationError(
                    f"cost row has {len(row)} entries, expected "
                    f"{self.demand.space.n_atoms}")


@dataclass(frozen=True)
class TransportPlan:
    """A feasible joint distribution together with its objective value."""

    joint: JointDistribution
    objective: Fraction

    def flow(self) -> tuple[tuple[Fraction, ...], ...]:
        """The plan as a (supply atom, demand atom) matrix."""
        prod = self.joint.prod
        n = self.joint.y_space.n_atoms
        weights = self.joint.joint.weights
        return tuple(
            tuple(weights[prod.atom_index(i, j)] for j in range(n))
            for i in range(self.joint.x_space.n_atoms)
        )


def _northwest_corner(supply, demand):
    """Initial basic feasible solution with exactly m + n - 1 basic cells."""
    m, n = len(supply), len(demand)
    flow = [[ZERO] * n for _ in range(m)]
    basis = []
    remaining_supply = list(supply)
    remaining_demand = list(demand)
    i = j = 0
    while True:
        moved = min(remaining_supply[i], remaining_demand[j])
        flow[i][j] = moved
        basis.append((i, j))
        remaining_supply[i] -= moved
        remaining_demand[j] -= moved
        if i == m - 1 and j == n - 1:
            break
        if remaining_supply[i] == 0 and i < m - 1:
            i += 1
        elif j < n - 1:
            j += 1
        else:
            i += 1
    return flow, basis


def _duals(cost, basis, m, n):
    """Potentials u, v with u[i] + v[j] = cost[i][j] on the basis tree."""
    u = [None] * m
    v = [None] * n
    by_row = [[] for _ in range(m)]
    by_col = [[] for _ in range(n)]
    for i, j in basis:
        by_row[i].append(j)
        by_col[j].append(i)
    u[0] = ZERO
    queue = deque([("r", 0)])
    while queue:
        kind, k = queue.popleft()
        if kind == "r":
            for j in by_row[k]:
                if v[j] is None:
                    v[j] = cost[k][j] - u[k]
                    queue.append(("c", j))
        else:
            for i in by_col[k]:
                if u[i] is None:
                    u[i] = cost[i][k] - v[k]
                    queue.append(("r", i))
    return u, v


def _basis_cycle(basis, entering):
    """The unique cycle the entering cell closes in the basis tree.

    Returned as a cell list starting at `entering`; consecutive cells
    alternately share a row and a column, so signs alternate +, -, ...
    """
    i0, j0 = entering
    adjacency: dict[tuple[str, int], list[tuple[tuple[str, int], tuple[int, int]]]] = {}
    for i, j in basis:
        adjacency.setdefault(("r", i), []).append((("c", j), (i, j)))
        adjacency.setdefault(("c", j), []).append((("r", i), (i, j)))
    start, goal = ("r", i0), ("c", j0)
    parents: dict[tuple[str, int], tuple[tuple[str, int], tuple[int, int]]] = {start: (start, entering)}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for neighbor, cell in adjacency.get(node, ()):
            if neighbor not in parents:
                parents[neighbor] = (node, cell)
                queue.append(neighbor)
    path_cells = []
    node = goal
    while node != start:
        node, cell = parents[node]
        path_cells.append(cell)
    return [entering] + path_cells


def solve_transport(problem: TransportProblem) -> TransportPlan:
    """Minimize the expected cost over all joints with the given marginals.

    Returns a vertex of the transportation polytope; the polytope is
    never empty because the product of the marginals is feasible.
    """
    supply = problem.supply.weights
    demand = problem.demand.weights
    cost = problem.cost
    m, n = len(supply), len(demand)
    flow, basis = _northwest_corner(supply, demand)
    basis_set = set(basis)
    while True:
        u, v = _duals(cost, basis, m, n)
        entering = None
        for i in range(m):
            for j in range(n):
                if (i, j) not in basis_set and cost[i][j] - u[i] - v[j] < 0:
                    entering = (i, j)
                    break
            if entering:
                break
        if entering is None:
            break
        cycle = _basis_cycle(basis, entering)
        negative = cycle[1::2]
        theta = min(flow[i][j] for i, j in negative)
        leaving = min(
            (i, j) for i, j in negative if flow[i][j] == theta)
        for position, (i, j) in enumerate(cycle):
            if position % 2 == 0:
                flow[i][j] += theta
            else:
                flow[i][j] -= theta
        basis[basis.index(leaving)] = entering
        basis_set.remove(leaving)
        basis_set.add(entering)
    objective = sum(
        (flow[i][j] * cost[i][j] for i in range(m) for j in range(n)), ZERO)
    prod = product(problem.supply.space, problem.demand.space)
    weights = [ZERO] * prod.space.n_atoms
    for i in range(m):
        for j in range(n):
            weights[prod.atom_index(i, j)] = flow[i][j]
    joint = JointDistribution(
        problem.supply.space,
        problem.demand.space,
        Probability(prod.space, tuple(weights)),
    )
    return TransportPlan(joint, objective)


def _has_improving_cycle(cost, flow, m, n) -> bool:
    """Bellman-Ford negative-cycle test on the exchange graph.

    Nodes are rows and columns; any cell can gain flow (row -> column at
    its cost) and any cell carrying flow can lose it (column -> row at
    minus its cost).  A negative cycle is an exchange that lowers the
    objective while preserving both marginals, so its absence certifies
    optimality; the final distances are dual potentials witnessing
    complementary slackness.
    """
    edges = []
    for i in range(m):
        for j in range(n):
            edges.append((i, m + j, cost[i][j]))
            if flow[i][j] > 0:
                edges.append((m + j, i, -cost[i][j]))
    distance = [ZERO] * (m + n)
    for _ in range(m + n):
        changed = False
        for tail, head, weight in edges:
            candidate = distance[tail] + weight
            if candidate < distance[head]:
                distance[head] = candidate
                changed = True
        if not changed:
            return False
    return True


def verify_plan(problem: TransportProblem, plan: TransportPlan) -> bool:
    """Independent optimality certificate for a transport plan.

    Raises `InfeasiblePlan` when the plan's marginals do not match the
    problem; returns False when the stated objective disagrees with the
    plan or a cost-reducing exchange exists; True means certified
    optimal.
    """
    if (plan.joint.x_space != problem.supply.space
            or plan.joint.y_space != problem.demand.space):
        raise SpaceMismatch("plan does not live on the problem's spaces")
    if plan.joint.marginal_x != problem.supply:
        raise InfeasiblePlan("plan's first marginal differs from the supply")
    if plan.joint.marginal_y != problem.demand:
        raise InfeasiblePlan("plan's second marginal differs from the demand")
    flow = plan.flow()
    m = problem.supply.space.n_atoms
    n = problem.demand.space.n_atoms
    objective = sum(
        (flow[i][j] * problem.cost[i][j] for i in range(m) for j in range(n)),
        ZERO)
    if objective != plan.objective:
        return False
    return not _has_improving_cycle(problem.cost, flow, m, n)
