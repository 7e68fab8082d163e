"""Independent oracles the tests check the library against.

Each oracle recomputes a quantity by direct enumeration, staying away
from the code paths it is used to verify.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from kernelbayes import JointDistribution, Probability, StochasticKernel

ZERO = Fraction(0)


def sigma_algebra_atoms(n_points: int, generators: list[set[int]]) -> set[frozenset[int]]:
    """Atoms of the sigma-algebra generated by the given subsets.

    On a finite set, two points lie in the same atom exactly when every
    generator contains both or neither.
    """
    classes: dict[tuple[bool, ...], set[int]] = {}
    for point in range(n_points):
        key = tuple(point in g for g in generators)
        classes.setdefault(key, set()).add(point)
    return {frozenset(block) for block in classes.values()}


def evaluate_oracle(measure: Probability, atom_indices) -> Fraction:
    total = ZERO
    for a in sorted(atom_indices):
        total += measure.weights[a]
    return total


def pushforward_oracle(func, measure: Probability) -> tuple[Fraction, ...]:
    """Mass transport enumerated codomain-atom by codomain-atom."""
    weights = []
    for b in range(func.codomain.n_atoms):
        mass = ZERO
        for a in range(measure.space.n_atoms):
            point = measure.space.atoms[a][0]
            image = func.mapping[point]
            if func.codomain.atom_of_index(image) == b:
                mass += measure.weights[a]
        weights.append(mass)
    return tuple(weights)


def apply_oracle(kernel: StochasticKernel, measure: Probability) -> tuple[Fraction, ...]:
    """Matrix-vector product written out longhand."""
    m = kernel.domain.n_atoms
    n = kernel.codomain.n_atoms
    return tuple(
        sum((measure.weights[a] * kernel.rows[a][b] for a in range(m)), ZERO)
        for b in range(n)
    )


def marginal_oracle(joint_dist: JointDistribution, side: str) -> tuple[Fraction, ...]:
    """Brute-force fiber sums over the product atoms."""
    prod = joint_dist.prod
    nx = joint_dist.x_space.n_atoms
    ny = joint_dist.y_space.n_atoms
    if side == "x":
        return tuple(
            sum((joint_dist.joint.weights[prod.atom_index(i, j)]
                 for j in range(ny)), ZERO)
            for i in range(nx))
    return tuple(
        sum((joint_dist.joint.weights[prod.atom_index(i, j)]
             for i in range(nx)), ZERO)
        for j in range(ny))


def conditional_oracle(
    joint_dist: JointDistribution, given: str
) -> list[tuple[Fraction, ...] | None]:
    """Ratio-formula conditionals; None where the conditioning atom is null."""
    nx = joint_dist.x_space.n_atoms
    ny = joint_dist.y_space.n_atoms
    prod = joint_dist.prod
    base_marginal = marginal_oracle(joint_dist, given)
    rows: list[tuple[Fraction, ...] | None] = []
    if given == "y":
        for j in range(ny):
            if base_marginal[j] == 0:
                rows.append(None)
                continue
            rows.append(tuple(
                joint_dist.joint.weights[prod.atom_index(i, j)] / base_marginal[j]
                for i in range(nx)))
    else:
        for i in range(nx):
            if base_marginal[i] == 0:
                rows.append(None)
                continue
            rows.append(tuple(
                joint_dist.joint.weights[prod.atom_index(i, j)] / base_marginal[i]
                for j in range(ny)))
    return rows


def urn_posteriors_oracle(
    prior: tuple[Fraction, ...],
    sampling_rows: tuple[tuple[Fraction, ...], ...],
    observations: list[int],
) -> list[tuple[Fraction, ...]]:
    """Sequential posteriors by brute-force joint enumeration.

    At each step, enumerate the joint weights prior(h) * sampling(h, d),
    restrict to the observed data atom, and renormalize.
    """
    current = list(prior)
    out = []
    for observed in observations:
        joint_column = [current[h] * sampling_rows[h][observed]
                        for h in range(len(current))]
        total = sum(joint_column, ZERO)
        current = [w / total for w in joint_column]
        out.append(tuple(current))
    return out


def double_sum_oracle(joint_dist: JointDistribution, values) -> Fraction:
    """Direct double sum of an atom-constant function against the joint."""
    prod = joint_dist.prod
    total = ZERO
    for i in range(joint_dist.x_space.n_atoms):
        for j in range(joint_dist.y_space.n_atoms):
            k = prod.atom_index(i, j)
            total += joint_dist.joint.weights[k] * values[k]
    return total


# --- transportation polytope vertex enumeration ------------------------------

def _tree_flows(cells, supply, demand, m, n):
    """Solve the flows on a candidate spanning-tree basis, or None.

    Nodes are rows 0..m-1 and columns m..m+n-1; `cells` must connect
    all of them without a cycle.  Flows are found by repeatedly
    resolving leaf nodes; any negative flow disqualifies the basis.
    """
    parent = list(range(m + n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in cells:
        a, b = find(i), find(m + j)
        if a == b:
            return None
        parent[a] = b

    balance = list(supply) + list(demand)
    degree = [0] * (m + n)
    incident = [[] for _ in range(m + n)]
    for index, (i, j) in enumerate(cells):
        for node in (i, m + j):
            degree[node] += 1
            incident[node].append(index)
    flows = [None] * len(cells)
    solved = [False] * len(cells)
    stack = [node for node in range(m + n) if degree[node] == 1]
    while stack:
        node = stack.pop()
        if degree[node] != 1:
            continue
        edge = next(e for e in incident[node] if not solved[e])
        i, j = cells[edge]
        flows[edge] = balance[node]
        solved[edge] = True
        other = m + j if node == i else i
        balance[other] -= balance[node]
        balance[node] = ZERO
        degree[node] -= 1
        degree[other] -= 1
        if degree[other] == 1:
            stack.append(other)
    if any(f is None or f < 0 for f in flows):
        return None
    return {cells[e]: flows[e] for e in range(len(cells))}


def min_cost_by_vertex_enumeration(supply, demand, cost) -> Fraction:
    """Minimum objective over all vertices of the transportation polytope."""
    m, n = len(supply), len(demand)
    cells = [(i, j) for i in range(m) for j in range(n)]
    best = None
    for basis in itertools.combinations(cells, m + n - 1):
        flows = _tree_flows(basis, supply, demand, m, n)
        if flows is None:
            continue
        objective = sum(
            (flow * cost[i][j] for (i, j), flow in flows.items()), ZERO)
        if best is None or objective < best:
            best = objective
    assert best is not None, "transportation polytope cannot be empty"
    return best


def min_cost_2x2_oracle(supply, demand, cost) -> Fraction:
    """2x2 special case: the feasible set is an interval in one variable."""
    a0, b0 = supply[0], demand[0]
    low = max(ZERO, a0 + b0 - 1)
    high = min(a0, b0)

    def objective(t):
        return (t * cost[0][0]
                + (a0 - t) * cost[0][1]
                + (b0 - t) * cost[1][0]
                + (1 - a0 - b0 + t) * cost[1][1])

    return min(objective(low), objective(high))
