"""Exact solvers: optimal makespan, minimal potential, worst potential optimum.

Two routes to every answer:

* :func:`brute_force` enumerates all m^n assignments with no pruning and no
  symmetry reduction. It is the ground-truth oracle for testing and is
  deliberately kept independent of the branch-and-bound code paths.
* :func:`optimal_makespan` and :func:`potential_optimum` run symmetry-broken
  depth-first branch-and-bound and scale far beyond the oracle.

Symmetry breaking (identical machines, interchangeable equal weights): jobs
are branched in nonincreasing weight order, a job may open at most one new
machine (restricted-growth assignment), and consecutive equal-weight jobs go
to nondecreasing machine indices. Every allocation has exactly one canonical
representative in this reduced space, and makespan/potential are invariant
under the symmetries, so values and worst-case level-set statistics are
preserved.

The worst potential optimum needs the whole minimizer set, so the potential
solve is two-phase: phase 1 finds the minimal potential pruning anything
strictly worse than the incumbent, phase 2 re-walks the tree pruning only
bounds strictly above the known minimum and inspects every tie.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Allocation, Instance, loads, makespan, potential

__all__ = [
    "OracleTooLargeError",
    "ResourceExhaustedError",
    "SolveReport",
    "lpt",
    "brute_force",
    "optimal_makespan",
    "minimum_potential",
    "potential_optimum",
    "irse",
    "DEFAULT_NODE_LIMIT",
    "DEFAULT_BRUTE_FORCE_CAP",
]

DEFAULT_NODE_LIMIT = 10**9
DEFAULT_BRUTE_FORCE_CAP = 10**8


class OracleTooLargeError(ValueError):
    """State space exceeds the configured enumeration cap."""


class ResourceExhaustedError(RuntimeError):
    """Search node budget exhausted before an exact answer was proven."""

    def __init__(self, message: str, nodes_explored: int):
        super().__init__(message)
        self.nodes_explored = nodes_explored


@dataclass(frozen=True)
class SolveReport:
    """Full exact solve of one instance.

    ``po_count_up_to_symmetry`` counts potential-optimal allocations up to
    machine relabeling and interchange of equal-weight jobs (canonical
    representatives). ``nodes_explored`` totals all search phases.
    """

    instance: Instance
    opt_makespan: int
    min_potential: int
    worst_po_makespan: int
    opt_witness: Allocation
    worst_po_witness: Allocation
    nodes_explored: int
    po_count_up_to_symmetry: int

    def irse(self) -> Fraction:
        """Worst potential-optimal makespan over optimal makespan, reduced."""
        if self.instance.n == 0:
            raise ValueError("IRSE is undefined for an empty instance")
        return Fraction(self.worst_po_makespan, self.opt_makespan)


class _Budget:
    """Node counter with a hard cap; one spend per job placement tried."""

    __slots__ = ("nodes", "limit")

    def __init__(self, limit: int | None):
        self.nodes = 0
        self.limit = DEFAULT_NODE_LIMIT if limit is None else limit

    def spend(self) -> None:
        self.nodes += 1
        if self.nodes > self.limit:
            raise ResourceExhaustedError(
                f"node limit {self.limit} exhausted", self.nodes
            )


def lpt(instance: Instance) -> tuple[int, Allocation]:
    """Longest-processing-time greedy: each job to the least loaded machine.

    Used only to seed upper bounds; ties break to the lowest machine index
    so the result is deterministic.
    """
    m = instance.m
    machine_loads = [0] * m
    assign = []
    for w in instance.weights:
        j = min(range(m), key=lambda t: machine_loads[t])
        assign.append(j)
        machine_loads[j] += w
    return max(machine_loads), Allocation(tuple(assign))


def brute_force(
    instance: Instance,
    objective: str = "makespan",
    cap: int = DEFAULT_BRUTE_FORCE_CAP,
) -> tuple[int, list[Allocation]]:
    """Exhaustively minimize over all m^n assignments; ground truth oracle.

    Returns the optimal value and every optimal assignment vector in
    lexicographic order. No pruning, no symmetry reduction: this is the
    reference the branch-and-bound solvers are tested against.
    """
    if objective not in ("makespan", "potential"):
        raise ValueError(f"objective must be 'makespan' or 'potential', got {objective!r}")
    n, m = instance.n, instance.m
    states = m**n
    if states > cap:
        raise OracleTooLargeError(f"m^n = {states} exceeds oracle cap {cap}")
    weights = instance.weights
    machine_loads = [0] * m
    assign = [0] * n
    best: int | None = None
    witnesses: list[tuple[int, ...]] = []
    want_potential = objective == "potential"

    def visit(i: int) -> None:
        nonlocal best
        if i == n:
            if want_potential:
                value = sum(l * l for l in machine_loads)
            else:
                value = max(machine_loads)
            if best is None or value < best:
                best = value
                witnesses.clear()
                witnesses.append(tuple(assign))
            elif value == best:
                witnesses.append(tuple(assign))
            return
        w = weights[i]
        for j in range(m):
            machine_loads[j] += w
            assign[i] = j
            visit(i + 1)
            machine_loads[j] -= w

    visit(0)
    assert best is not None
    return best, [Allocation(a) for a in witnesses]


def _candidates(
    i: int,
    used: int,
    m: int,
    weights: tuple[int, ...],
    assign: list[int],
) -> range:
    """Symmetry-broken candidate machines for job i.

    Restricted growth: any already used machine, or the single first unused
    one. Equal-weight chain: if job i-1 has the same weight, start at its
    machine so equal jobs land at nondecreasing indices.
    """
    lo = assign[i - 1] if i > 0 and weights[i] == weights[i - 1] else 0
    hi = min(used, m - 1)
    return range(lo, hi + 1)


def _feasible_at(
    instance: Instance, target: int, budget: _Budget
) -> tuple[int, ...] | None:
    """Lexicographically first canonical assignment with max load <= target.

    Among machines of equal current load only the lowest index is branched;
    the skipped branches are label exchanges of the kept one, so neither
    feasibility nor lexicographic minimality is lost.
    """
    n, m = instance.n, instance.m
    weights = instance.weights
    machine_loads = [0] * m
    assign = [0] * n

    def place(i: int, used: int) -> bool:
        if i == n:
            return True
        w = weights[i]
        seen: set[int] = set()
        for j in _candidates(i, used, m, weights, assign):
            lj = machine_loads[j]
            if lj + w > target or lj in seen:
                continue
            seen.add(lj)
            budget.spend()
            machine_loads[j] += w
            assign[i] = j
            if place(i + 1, used + (1 if j == used else 0)):
                return True
            machine_loads[j] -= w
        return False

    if place(0, 0):
        return tuple(assign)
    return None


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _optimal_makespan_counted(
    instance: Instance, budget: _Budget
) -> tuple[int, Allocation]:
    n, m = instance.n, instance.m
    if n == 0:
        return 0, Allocation(())
    lpt_value, _ = lpt(instance)
    lower = max(_ceil_div(instance.total_weight, m), instance.weights[0])
    for target in range(lower, lpt_value + 1):
        witness = _feasible_at(instance, target, budget)
        if witness is not None:
            return target, Allocation(witness)
    raise AssertionError("LPT allocation must be feasible at its own makespan")


def optimal_makespan(
    instance: Instance, node_limit: int | None = None
) -> tuple[int, Allocation]:
    """Exact minimal makespan and a witness allocation.

    Branch-and-bound between the pooled lower bound max(ceil(W/m), w_max)
    and the LPT upper bound: a bounded feasibility search per candidate
    makespan, walked lexicographically so the witness is the
    lexicographically smallest optimal assignment vector.
    """
    budget = _Budget(node_limit)
    return _optimal_makespan_counted(instance, budget)


def _waterfill_bound(machine_loads: list[int], remaining: int) -> int:
    """Lower bound on the completed potential of a partial assignment.

    Pour the remaining weight fractionally onto the machines so the lowest
    loads equalize; by convexity of sum-of-squares no integral completion
    can do better. Returned as the integer ceiling, which stays a valid
    bound because true potentials are integers.
    """
    if remaining == 0:
        return sum(l * l for l in machine_loads)
    ls = sorted(machine_loads)
    m = len(ls)
    prefix = 0
    for k in range(1, m + 1):
        prefix += ls[k - 1]
        if k == m or remaining + prefix <= k * ls[k]:
            level_num = remaining + prefix  # water level is level_num / k
            tail = sum(ls[t] * ls[t] for t in range(k, m))
            return tail + _ceil_div(level_num * level_num, k)
    raise AssertionError("waterfill always terminates at k = m")


def _greedy_potential(instance: Instance) -> int:
    value, alloc = lpt(instance)
    return potential(loads(instance, alloc))


def _min_potential_counted(instance: Instance, budget: _Budget) -> int:
    n, m = instance.n, instance.m
    if n == 0:
        return 0
    weights = instance.weights
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[i]
    machine_loads = [0] * m
    assign = [0] * n
    best = _greedy_potential(instance)

    def descend(i: int, used: int, phi: int) -> None:
        nonlocal best
        if i == n:
            if phi < best:
                best = phi
            return
        # Phase-1 contract: prune only subtrees that cannot strictly improve.
        if _waterfill_bound(machine_loads, suffix[i]) > best:
            return
        w = weights[i]
        seen: set[int] = set()
        for j in _candidates(i, used, m, weights, assign):
            lj = machine_loads[j]
            if lj in seen:
                continue
            seen.add(lj)
            budget.spend()
            machine_loads[j] += w
            assign[i] = j
            descend(i + 1, used + (1 if j == used else 0), phi + 2 * lj * w + w * w)
            machine_loads[j] -= w

    descend(0, 0, 0)
    return best


def minimum_potential(instance: Instance, node_limit: int | None = None) -> int:
    """Exact minimum of the sum of squared machine loads."""
    budget = _Budget(node_limit)
    return _min_potential_counted(instance, budget)


def _po_level_set_counted(
    instance: Instance, min_pot: int, budget: _Budget
) -> tuple[int, Allocation, int]:
    """Walk every canonical allocation at the minimal potential.

    Returns (worst makespan, its lexicographically smallest witness, count of
    canonical potential optima). Ties on the bound must be explored, so the
    only pruning is a water-filling bound strictly above the minimum. Equal
    current loads are NOT deduplicated here: distinct canonical optima can
    share intermediate load multisets and each must be counted.
    """
    n, m = instance.n, instance.m
    if n == 0:
        return 0, Allocation(()), 1
    weights = instance.weights
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[i]
    machine_loads = [0] * m
    assign = [0] * n
    worst_mk = -1
    worst_wit: tuple[int, ...] | None = None
    count = 0

    def walk(i: int, used: int, phi: int) -> None:
        nonlocal worst_mk, worst_wit, count
        if i == n:
            if phi == min_pot:
                count += 1
                mk = max(machine_loads)
                if mk > worst_mk:
                    worst_mk = mk
                    worst_wit = tuple(assign)
            return
        if _waterfill_bound(machine_loads, suffix[i]) > min_pot:
            return
        w = weights[i]
        for j in _candidates(i, used, m, weights, assign):
            lj = machine_loads[j]
            budget.spend()
            machine_loads[j] += w
            assign[i] = j
            walk(i + 1, used + (1 if j == used else 0), phi + 2 * lj * w + w * w)
            machine_loads[j] -= w

    walk(0, 0, 0)
    assert worst_wit is not None and count >= 1
    return worst_mk, Allocation(worst_wit), count


def potential_optimum(
    instance: Instance, node_limit: int | None = None
) -> SolveReport:
    """Exact minimal potential plus the worst makespan over ALL its optima.

    Runs the makespan solve, then the two potential phases, under one shared
    node budget; ``nodes_explored`` totals all of them. Witnesses are the
    lexicographically smallest assignment vectors achieving their values, so
    repeated solves are byte-identical.
    """
    budget = _Budget(node_limit)
    opt_value, opt_witness = _optimal_makespan_counted(instance, budget)
    min_pot = _min_potential_counted(instance, budget)
    worst_mk, worst_witness, po_count = _po_level_set_counted(instance, min_pot, budget)
    if instance.n == 0:
        worst_mk = 0
    return SolveReport(
        instance=instance,
        opt_makespan=opt_value,
        min_potential=min_pot,
        worst_po_makespan=worst_mk,
        opt_witness=opt_witness,
        worst_po_witness=worst_witness,
        nodes_explored=budget.nodes,
        po_count_up_to_symmetry=po_count,
    )


def irse(instance: Instance, node_limit: int | None = None) -> Fraction:
    """Worst potential-optimal makespan divided by the optimal makespan.

    Exact reduced fraction; always >= 1. Undefined (ValueError) on an empty
    instance.
    """
    if instance.n == 0:
        raise ValueError("IRSE is undefined for an empty instance")
    return potential_optimum(instance, node_limit=node_limit).irse()
