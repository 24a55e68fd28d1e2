"""Equilibrium selection: potential-descending local search and logit dynamics.

Local search accepts any move from the enabled neighborhoods (single-job
moves, pairwise job swaps, bundle swaps up to a size cap) that strictly
decreases the integer potential, so it terminates at a locally optimal
allocation.

The noisy best-response chain activates a uniformly random job each step
and resamples its machine from the Gibbs kernel over the resulting
potential: placement p gets probability proportional to exp(-beta * Phi(p)),
evaluated through move deltas for stability. For a fixed activated job the
candidate potentials are identical from every placement of that job, which
makes the kernel reversible with stationary distribution proportional to
exp(-beta * Phi); :func:`exact_stationary` computes that distribution by an
independent linear solve on the full transition matrix so the two routes can
be checked against each other.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .core import Allocation, Instance, machine_loads
from .solvers import OracleTooLargeError, ResourceExhaustedError, minimum_potential

__all__ = [
    "NeighborhoodSpec",
    "DynamicsConfig",
    "TraceStats",
    "local_search",
    "logit_step",
    "simulate",
    "gibbs_distribution",
    "logit_transition_matrix",
    "exact_stationary",
    "profile_distribution",
    "GENERATOR_NAME",
    "STATIONARY_STATE_CAP",
]

# random.Random is the Mersenne Twister; recorded in traces for reproducibility.
GENERATOR_NAME = "random.Random(MT19937)"

STATIONARY_STATE_CAP = 10**4
_FREQUENCY_STATE_CAP = 10**6
_SOLVE_NODE_CAP = 10**7
_TRACE_POINTS = 1024


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Which improvement moves local search may use.

    ``bundle_swap_max`` caps the job count of each exchanged bundle; 0
    disables bundle swaps, and size 2 already covers the rearrangements that
    certify the 4/3 ceiling. At least one neighborhood must be enabled.
    """

    single_move: bool = True
    pair_swap: bool = True
    bundle_swap_max: int = 2

    def __post_init__(self) -> None:
        if not isinstance(self.bundle_swap_max, int) or self.bundle_swap_max < 0:
            raise ValueError("bundle_swap_max must be a nonnegative integer")
        if not (self.single_move or self.pair_swap or self.bundle_swap_max >= 1):
            raise ValueError("at least one neighborhood must be enabled")


@dataclass(frozen=True)
class DynamicsConfig:
    """One logit simulation run: noise level, length, seed, start point."""

    beta: Fraction | int | float
    steps: int
    seed: int
    initial: Allocation | str = "random"

    def __post_init__(self) -> None:
        if float(self.beta) < 0:
            raise ValueError("beta must be nonnegative")
        if not isinstance(self.steps, int) or self.steps < 1:
            raise ValueError("steps must be a positive integer")


@dataclass(frozen=True)
class TraceStats:
    """Outcome of one simulation run.

    ``profile_counts`` maps sorted-load signatures to visit counts (recorded
    for state spaces up to 10^6 assignments); ``visits_at_min_potential`` is
    None when the instance was too large to solve for the reference minimum,
    in which case ``potential_trace`` holds a subsampled potential
    trajectory instead.
    """

    beta: Fraction
    steps: int
    seed: int
    generator: str
    final: Allocation
    min_potential: int | None
    visits_at_min_potential: int | None
    profile_counts: dict[tuple[int, ...], int] | None
    potential_trace: tuple[int, ...] | None = None

    @property
    def empirical_state_frequencies(self) -> dict[tuple[int, ...], Fraction] | None:
        """Visit frequencies as exact fractions of the step count; sums to 1."""
        if self.profile_counts is None:
            return None
        return {
            sig: Fraction(count, self.steps)
            for sig, count in sorted(self.profile_counts.items(), reverse=True)
        }


def _jobs_by_machine(instance: Instance, assignment: list[int]) -> list[list[int]]:
    by_machine: list[list[int]] = [[] for _ in range(instance.m)]
    for job, machine in enumerate(assignment):
        by_machine[machine].append(job)
    return by_machine


def local_search(
    instance: Instance,
    start: Allocation,
    spec: NeighborhoodSpec = NeighborhoodSpec(),
) -> Allocation:
    """First-improvement descent to a locally potential-optimal allocation.

    Moves are scanned in a fixed deterministic order (single moves by job
    then target, swaps and bundle exchanges by machine pair then job
    indices) and each accepted move strictly decreases the integer
    potential, so the descent terminates. The result admits no improving
    enabled move.
    """
    loads_now = list(machine_loads(instance, start))  # validates the pair
    assignment = list(start.assignment)
    weights = instance.weights
    m = instance.m
    bmax = min(spec.bundle_swap_max, instance.n)

    def find_single_move() -> tuple[int, int] | None:
        for job, src in enumerate(assignment):
            w = weights[job]
            for target in range(m):
                if target == src:
                    continue
                if 2 * w * (loads_now[target] - loads_now[src] + w) < 0:
                    return job, target
        return None

    def apply_bundle_exchange(jobs_a: list[int], jobs_b: list[int], a: int, b: int) -> None:
        for job in jobs_a:
            assignment[job] = b
        for job in jobs_b:
            assignment[job] = a
        xa = sum(weights[j] for j in jobs_a)
        xb = sum(weights[j] for j in jobs_b)
        loads_now[a] += xb - xa
        loads_now[b] += xa - xb

    def find_exchange(size_cap: int, exact_one_one: bool) -> tuple[list[int], list[int], int, int] | None:
        by_machine = _jobs_by_machine(instance, assignment)
        for a in range(m):
            for b in range(a + 1, m):
                la, lb = loads_now[a], loads_now[b]
                sizes: list[tuple[int, int]]
                if exact_one_one:
                    sizes = [(1, 1)]
                else:
                    sizes = [
                        (sa, sb)
                        for sa in range(size_cap + 1)
                        for sb in range(size_cap + 1)
                        if (sa, sb) != (0, 0)
                    ]
                for sa, sb in sizes:
                    for bundle_a in itertools.combinations(by_machine[a], sa):
                        xa = sum(weights[j] for j in bundle_a)
                        for bundle_b in itertools.combinations(by_machine[b], sb):
                            xb = sum(weights[j] for j in bundle_b)
                            # swap delta: -2*(x_b - x_a)*(y_b - y_a)
                            if -2 * (xb - xa) * ((lb - xb) - (la - xa)) < 0:
                                return list(bundle_a), list(bundle_b), a, b
        return None

    while True:
        if spec.single_move:
            found = find_single_move()
            if found is not None:
                job, target = found
                src = assignment[job]
                w = weights[job]
                assignment[job] = target
                loads_now[src] -= w
                loads_now[target] += w
                continue
        if spec.pair_swap:
            exch = find_exchange(1, exact_one_one=True)
            if exch is not None:
                apply_bundle_exchange(exch[0], exch[1], exch[2], exch[3])
                continue
        if bmax >= 1:
            exch = find_exchange(bmax, exact_one_one=False)
            if exch is not None:
                apply_bundle_exchange(exch[0], exch[1], exch[2], exch[3])
                continue
        break
    return Allocation(tuple(assignment))


class _Chain:
    """Mutable logit chain state: assignment, loads, running potential."""

    def __init__(self, instance: Instance, assignment: list[int], beta: Fraction | int | float):
        self.instance = instance
        self.weights = instance.weights
        self.m = instance.m
        self.n = instance.n
        self.assignment = assignment
        self.loads = list(machine_loads(instance, Allocation(tuple(assignment))))
        self.potential = sum(l * l for l in self.loads)
        self.beta = float(beta)
        self._exp_cache: dict[int, float] = {}

    def _weight_for_delta(self, delta_shifted: int) -> float:
        w = self._exp_cache.get(delta_shifted)
        if w is None:
            w = math.exp(-self.beta * delta_shifted)
            self._exp_cache[delta_shifted] = w
        return w

    def step(self, rng: random.Random) -> None:
        """One update: activate a uniform job, Gibbs-resample its machine.

        Consumes exactly two draws (job index, placement) per step. Deltas
        are shifted by their minimum before exponentiation so the largest
        Gibbs weight is always 1.
        """
        job = rng.randrange(self.n)
        u = rng.random()
        w = self.weights[job]
        src = self.assignment[job]
        l_src = self.loads[src]
        deltas = [
            0 if t == src else 2 * w * (self.loads[t] - l_src + w)
            for t in range(self.m)
        ]
        dmin = min(deltas)
        gibbs = [self._weight_for_delta(d - dmin) for d in deltas]
        threshold = u * sum(gibbs)
        acc = 0.0
        choice = self.m - 1
        for t, g in enumerate(gibbs):
            acc += g
            if threshold < acc:
                choice = t
                break
        if choice != src:
            delta = deltas[choice]
            self.assignment[job] = choice
            self.loads[src] -= w
            self.loads[choice] += w
            self.potential += delta


def logit_step(
    instance: Instance,
    alloc: Allocation,
    beta: Fraction | int | float,
    rng: random.Random,
) -> Allocation:
    """One noisy best-response update; see :class:`_Chain.step` for the kernel."""
    if instance.n == 0:
        raise ValueError("cannot step dynamics with no jobs")
    chain = _Chain(instance, list(alloc.assignment), beta)
    chain.step(rng)
    return Allocation(tuple(chain.assignment))


def simulate(instance: Instance, config: DynamicsConfig) -> TraceStats:
    """Run the logit chain for ``config.steps`` updates, fully seeded.

    The state is recorded after each update (the start state is not
    counted). When the instance is small enough to solve, visits at the
    minimal potential are counted against the exact minimum; otherwise a
    subsampled potential trajectory is kept instead.
    """
    if instance.n == 0:
        raise ValueError("cannot simulate an instance with no jobs")
    rng = random.Random(config.seed)
    if isinstance(config.initial, Allocation):
        assignment = list(config.initial.assignment)
        machine_loads(instance, config.initial)  # validate
    elif config.initial == "random":
        assignment = [rng.randrange(instance.m) for _ in range(instance.n)]
    else:
        raise ValueError(f"initial must be an Allocation or 'random', got {config.initial!r}")

    min_pot: int | None = None
    if instance.m**instance.n <= _FREQUENCY_STATE_CAP:
        try:
            min_pot = minimum_potential(instance, node_limit=_SOLVE_NODE_CAP)
        except ResourceExhaustedError:
            min_pot = None

    chain = _Chain(instance, assignment, config.beta)
    record_profiles = instance.m**instance.n <= _FREQUENCY_STATE_CAP
    profile_counts: dict[tuple[int, ...], int] | None = {} if record_profiles else None
    trace: list[int] | None = None
    stride = 0
    if min_pot is None:
        stride = max(1, config.steps // _TRACE_POINTS)
        trace = []

    visits = 0
    for step_index in range(1, config.steps + 1):
        chain.step(rng)
        if min_pot is not None:
            if chain.potential == min_pot:
                visits += 1
        elif trace is not None and step_index % stride == 0:
            trace.append(chain.potential)
        if profile_counts is not None:
            sig = tuple(sorted(chain.loads, reverse=True))
            profile_counts[sig] = profile_counts.get(sig, 0) + 1

    return TraceStats(
        beta=Fraction(config.beta),
        steps=config.steps,
        seed=config.seed,
        generator=GENERATOR_NAME,
        final=Allocation(tuple(chain.assignment)),
        min_potential=min_pot,
        visits_at_min_potential=visits if min_pot is not None else None,
        profile_counts=profile_counts,
        potential_trace=tuple(trace) if trace is not None else None,
    )


def _enumerate_states(instance: Instance, cap: int) -> list[tuple[int, ...]]:
    states = instance.m**instance.n
    if states > cap:
        raise OracleTooLargeError(f"m^n = {states} exceeds state cap {cap}")
    return list(itertools.product(range(instance.m), repeat=instance.n))


def gibbs_distribution(
    instance: Instance, beta: Fraction | int | float, cap: int = STATIONARY_STATE_CAP
) -> dict[tuple[int, ...], float]:
    """Closed-form stationary distribution: probability ~ exp(-beta * Phi).

    Direct enumeration from the potential values; this is the formula-side
    oracle that :func:`exact_stationary` (the matrix side) is tested
    against.
    """
    states = _enumerate_states(instance, cap)
    b = float(beta)
    phis = []
    for state in states:
        loads_now = [0] * instance.m
        for w, j in zip(instance.weights, state):
            loads_now[j] += w
        phis.append(sum(l * l for l in loads_now))
    phi_min = min(phis)
    weights = [math.exp(-b * (phi - phi_min)) for phi in phis]
    total = sum(weights)
    return {state: w / total for state, w in zip(states, weights)}


def logit_transition_matrix(
    instance: Instance, beta: Fraction | int | float, cap: int = STATIONARY_STATE_CAP
) -> tuple[list[tuple[int, ...]], scipy.sparse.csr_matrix]:
    """Full one-step transition matrix of the logit chain (rows = from)."""
    states = _enumerate_states(instance, cap)
    index = {state: i for i, state in enumerate(states)}
    n, m = instance.n, instance.m
    b = float(beta)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for state in states:
        i = index[state]
        loads_now = [0] * m
        for w, j in zip(instance.weights, state):
            loads_now[j] += w
        for job in range(n):
            w = instance.weights[job]
            src = state[job]
            l_src = loads_now[src]
            deltas = [0 if t == src else 2 * w * (loads_now[t] - l_src + w) for t in range(m)]
            dmin = min(deltas)
            gibbs = [math.exp(-b * (d - dmin)) for d in deltas]
            z = sum(gibbs)
            for t in range(m):
                succ = state[:job] + (t,) + state[job + 1 :]
                rows.append(i)
                cols.append(index[succ])
                vals.append(gibbs[t] / (n * z))
    matrix = scipy.sparse.coo_matrix(
        (vals, (rows, cols)), shape=(len(states), len(states))
    ).tocsr()
    return states, matrix


_GTH_DENSE_CAP = 2048


def _gth_stationary(p: np.ndarray) -> np.ndarray:
    """Stationary vector by GTH state elimination (no subtractions).

    Censors states from the highest index down; every quantity is a sum or
    product of nonnegative numbers, so entries keep componentwise relative
    accuracy even when probabilities span hundreds of orders of magnitude
    (stiff chains at large beta defeat ordinary linear solves).
    """
    a = np.array(p, dtype=np.float64)
    size = a.shape[0]
    if size == 1:
        return np.ones(1)
    scale = np.empty(size)
    for k in range(size - 1, 0, -1):
        s = a[k, :k].sum()
        scale[k] = s
        a[k, :k] /= s
        a[:k, :k] += np.outer(a[:k, k], a[k, :k])
    u = np.zeros(size)
    u[0] = 1.0
    for k in range(1, size):
        u[k] = (u[:k] @ a[:k, k]) / scale[k]
    return u / u.sum()


def exact_stationary(
    instance: Instance, beta: Fraction | int | float, cap: int = STATIONARY_STATE_CAP
) -> dict[tuple[int, ...], float]:
    """Stationary distribution of the logit chain from its transition matrix.

    Independent of the Gibbs closed form, with which it must agree by
    reversibility. Uses GTH elimination (stable for stiff chains) up to
    2048 states and a sparse direct solve of pi P = pi above that.
    """
    if instance.n == 0:
        raise ValueError("no states to build a chain over")
    states, matrix = logit_transition_matrix(instance, beta, cap=cap)
    size = len(states)
    if size <= _GTH_DENSE_CAP:
        pi = _gth_stationary(matrix.toarray())
    else:
        a = (matrix.T - scipy.sparse.identity(size, format="csr")).tolil()
        a[size - 1, :] = 1.0
        b_vec = np.zeros(size)
        b_vec[size - 1] = 1.0
        pi = scipy.sparse.linalg.spsolve(a.tocsr(), b_vec)
        pi = pi / pi.sum()
    return {state: float(p) for state, p in zip(states, pi)}


def profile_distribution(
    instance: Instance, dist: dict[tuple[int, ...], float]
) -> dict[tuple[int, ...], float]:
    """Aggregate a distribution over assignments to sorted-load signatures."""
    out: dict[tuple[int, ...], float] = {}
    for state, p in dist.items():
        loads_now = [0] * instance.m
        for w, j in zip(instance.weights, state):
            loads_now[j] += w
        sig = tuple(sorted(loads_now, reverse=True))
        out[sig] = out.get(sig, 0.0) + p
    return out
