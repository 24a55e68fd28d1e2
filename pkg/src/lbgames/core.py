"""Exact domain model for load balancing games on identical machines.

An instance is ``m`` identical machines plus a multiset of positive integer
job weights. An allocation assigns each job to one machine; the load of a
machine is the sum of the weights placed on it. Two exact quantities drive
everything else:

* the makespan, the maximum machine load, and
* the potential, the sum of squared machine loads.

A move that strictly decreases the potential is an improvement step; an
allocation where no single-job move decreases the potential is a pure Nash
equilibrium, and an allocation minimizing the potential globally is a
potential optimum. All arithmetic here is integer or reduced-fraction
exact; there are no floats in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "INT64_MAX",
    "Ratio",
    "CapacityError",
    "InvalidAllocationError",
    "NoOpMoveError",
    "Instance",
    "Allocation",
    "LoadProfile",
    "BundleSplit",
    "machine_loads",
    "loads",
    "makespan",
    "potential",
    "move_delta",
    "is_nash",
    "swap_delta",
    "canonicalize",
    "scaled",
]

INT64_MAX = 2**63 - 1

# Exact rational values (IRSE ratios, bound comparisons). fractions.Fraction
# already maintains gcd(num, den) = 1 with a positive denominator and a total
# order, which is exactly the contract needed here.
Ratio = Fraction


class CapacityError(ValueError):
    """Instance too large for 64-bit-safe potential arithmetic."""


class InvalidAllocationError(ValueError):
    """Allocation does not fit the instance (wrong length or machine index)."""


class NoOpMoveError(ValueError):
    """Requested move leaves the job on its current machine."""


@dataclass(frozen=True)
class Instance:
    """A load balancing game: machine count plus job weight multiset.

    Weights are stored sorted nonincreasing regardless of input order.
    Construction enforces the capacity guard n^2 * (sum w)^2 <= 2^63 - 1,
    which bounds every potential value and every move delta (and modest
    aggregates of them) within native signed 64-bit range, so downstream
    code may safely drop into fixed-width arithmetic.
    """

    m: int
    weights: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError(f"machine count must be a positive integer, got {self.m!r}")
        ws = tuple(sorted(self.weights, reverse=True))
        for w in ws:
            if not isinstance(w, int) or w < 1:
                raise ValueError(f"job weights must be positive integers, got {w!r}")
        n = len(ws)
        total = sum(ws)
        if n * n * total * total > INT64_MAX:
            raise CapacityError(
                f"capacity guard violated: n^2 * (sum of weights)^2 = "
                f"{n * n * total * total} exceeds 2^63 - 1"
            )
        object.__setattr__(self, "weights", ws)

    @property
    def n(self) -> int:
        """Number of jobs."""
        return len(self.weights)

    @property
    def total_weight(self) -> int:
        return sum(self.weights)


@dataclass(frozen=True)
class Allocation:
    """Job-to-machine assignment; position i holds the machine of job i.

    Job order matches the owning instance's (sorted) weight order. The
    machine indices are validated against a concrete instance by the
    operations that consume the pair.
    """

    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        asg = tuple(self.assignment)
        for a in asg:
            if not isinstance(a, int) or a < 0:
                raise InvalidAllocationError(
                    f"machine indices must be nonnegative integers, got {a!r}"
                )
        object.__setattr__(self, "assignment", asg)

    @property
    def n(self) -> int:
        return len(self.assignment)


@dataclass(frozen=True)
class LoadProfile:
    """Multiset of machine loads, stored sorted nonincreasing."""

    loads: tuple[int, ...]

    def __post_init__(self) -> None:
        ls = tuple(sorted(self.loads, reverse=True))
        for l in ls:
            if not isinstance(l, int) or l < 0:
                raise ValueError(f"loads must be nonnegative integers, got {l!r}")
        object.__setattr__(self, "loads", ls)


@dataclass(frozen=True)
class BundleSplit:
    """Loads of two machines, each split as l = x + y with x a bundle weight.

    ``x_i`` (resp. ``x_j``) is the total weight of a possibly empty subset of
    the jobs on machine i (resp. j) and ``y`` is the rest of that machine's
    load. Build with :meth:`from_bundles` to guarantee the four parts are
    realizable as disjoint job subsets.
    """

    machine_i: int
    machine_j: int
    x_i: int
    y_i: int
    x_j: int
    y_j: int

    def __post_init__(self) -> None:
        if self.machine_i == self.machine_j:
            raise ValueError("bundle split needs two distinct machines")
        for part in (self.x_i, self.y_i, self.x_j, self.y_j):
            if not isinstance(part, int) or part < 0:
                raise ValueError(f"bundle parts must be nonnegative integers, got {part!r}")

    @classmethod
    def from_bundles(
        cls,
        instance: Instance,
        alloc: Allocation,
        machine_i: int,
        machine_j: int,
        bundle_i: Iterable[int],
        bundle_j: Iterable[int],
    ) -> "BundleSplit":
        """Split two machine loads along concrete job subsets.

        ``bundle_i`` and ``bundle_j`` are job indices currently on machine_i
        and machine_j respectively; their weights form x_i and x_j.
        """
        ml = machine_loads(instance, alloc)
        if not (0 <= machine_i < instance.m and 0 <= machine_j < instance.m):
            raise ValueError("machine index out of range")
        x = {machine_i: 0, machine_j: 0}
        for machine, bundle in ((machine_i, bundle_i), (machine_j, bundle_j)):
            seen = set()
            for job in bundle:
                if not (0 <= job < instance.n) or alloc.assignment[job] != machine:
                    raise ValueError(f"job {job} is not on machine {machine}")
                if job in seen:
                    raise ValueError(f"job {job} listed twice in a bundle")
                seen.add(job)
                x[machine] += instance.weights[job]
        return cls(
            machine_i=machine_i,
            machine_j=machine_j,
            x_i=x[machine_i],
            y_i=ml[machine_i] - x[machine_i],
            x_j=x[machine_j],
            y_j=ml[machine_j] - x[machine_j],
        )


def machine_loads(instance: Instance, alloc: Allocation) -> tuple[int, ...]:
    """Per-machine loads in machine index order (not sorted)."""
    assignment = alloc.assignment
    if len(assignment) != instance.n:
        raise InvalidAllocationError(
            f"allocation length {len(assignment)} != job count {instance.n}"
        )
    out = [0] * instance.m
    for w, j in zip(instance.weights, assignment):
        if j >= instance.m:
            raise InvalidAllocationError(f"machine index {j} out of range for m={instance.m}")
        out[j] += w
    return tuple(out)


def loads(instance: Instance, alloc: Allocation) -> LoadProfile:
    """Load profile (sorted nonincreasing) induced by an allocation."""
    return LoadProfile(machine_loads(instance, alloc))


def makespan(profile: LoadProfile) -> int:
    """Maximum machine load."""
    return profile.loads[0] if profile.loads else 0


def potential(profile: LoadProfile) -> int:
    """Sum of squared machine loads, exact."""
    return sum(l * l for l in profile.loads)


def move_delta(instance: Instance, alloc: Allocation, job: int, target: int) -> int:
    """Potential change from moving one job, without full recomputation.

    Moving a job of weight w from machine s to machine t changes the
    potential by 2*w*(l_t - l_s + w). Negative means the move improves.
    """
    if not 0 <= job < instance.n:
        raise ValueError(f"job index {job} out of range")
    if not 0 <= target < instance.m:
        raise ValueError(f"target machine {target} out of range")
    ml = machine_loads(instance, alloc)
    src = alloc.assignment[job]
    if src == target:
        raise NoOpMoveError(f"job {job} is already on machine {target}")
    w = instance.weights[job]
    return 2 * w * (ml[target] - ml[src] + w)


def is_nash(instance: Instance, alloc: Allocation) -> bool:
    """True iff no single job can strictly reduce the potential by moving.

    Equivalently (the equilibrium condition): for every job of weight w on
    machine i and every machine j, l_i - w <= l_j. Only the smallest other
    load can violate this, so the check is O(n + m).
    """
    ml = machine_loads(instance, alloc)
    if instance.m == 1 or instance.n == 0:
        return True
    order = sorted(range(instance.m), key=lambda j: ml[j])
    lo_idx, lo = order[0], ml[order[0]]
    lo2 = ml[order[1]]
    for w, j in zip(instance.weights, alloc.assignment):
        other = lo2 if j == lo_idx else lo
        if ml[j] - w > other:
            return False
    return True


def swap_delta(split: BundleSplit) -> int:
    """Potential change from exchanging bundle x_i with bundle x_j.

    Equals -2*(x_j - x_i)*(y_j - y_i): strictly negative exactly when the
    x-parts and the y-parts are ordered the same strict way, which is the
    improving-swap condition.
    """
    return -2 * (split.x_j - split.x_i) * (split.y_j - split.y_i)


def canonicalize(instance: Instance) -> Instance:
    """Weights divided by their gcd (order is already canonical)."""
    if not instance.weights:
        return instance
    g = math.gcd(*instance.weights)
    if g == 1:
        return instance
    return Instance(instance.m, tuple(w // g for w in instance.weights))


def scaled(instance: Instance, factor: int) -> Instance:
    """All weights multiplied by a positive integer factor."""
    if not isinstance(factor, int) or factor < 1:
        raise ValueError(f"scale factor must be a positive integer, got {factor!r}")
    return Instance(instance.m, tuple(w * factor for w in instance.weights))
