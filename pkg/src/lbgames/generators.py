"""Instance generators: the parametric lower-bound family and random games.

The family indexed by k >= 2 has m = k + 1 machines and n = 2k + 2 jobs
with weights

    k, k, k, k+1, k+1, ..., 2k-1, 2k-1, (5k-1)/2.

Its potential-minimizing allocations include one of makespan (7k-1)/2 while
the optimal makespan is 3k, so the worst-equilibrium ratio is exactly
(7k-1)/(6k) = (7m-8)/(6m-6), increasing in k with limit 7/6. The big job's
weight (5k-1)/2 is integral only for odd k; even k is handled by doubling
every weight, which leaves the ratio unchanged.
"""

from __future__ import annotations

import random
from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .core import Allocation, Instance

__all__ = [
    "FamilyParams",
    "FamilyInstance",
    "FamilyWitnesses",
    "lower_bound_family",
    "family_witnesses",
    "random_instance",
]


@dataclass(frozen=True)
class FamilyParams:
    """Family index; machines m = k + 1 and jobs n = 2k + 2."""

    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 2:
            raise ValueError(f"family parameter k must be an integer >= 2, got {self.k!r}")


@dataclass(frozen=True)
class FamilyInstance:
    """Family member plus its predicted exact solve values.

    ``scale`` is 1 for odd k and 2 for even k (global doubling to keep the
    big job integral). Predictions are pre-scaled; the ratio is scale
    invariant.
    """

    k: int
    scale: int
    instance: Instance
    opt_makespan: int
    worst_po_makespan: int
    irse: Fraction


class FamilyWitnesses(NamedTuple):
    worst_po: Allocation  # potential-optimal with the worst makespan
    optimal: Allocation  # makespan-optimal


def lower_bound_family(k: int) -> FamilyInstance:
    """Build family member k with its predicted opt/worst-PO/ratio values."""
    params = FamilyParams(k)
    k = params.k
    scale = 1 if k % 2 == 1 else 2
    weights = [k] * 3
    for j in range(k + 1, 2 * k):
        weights += [j, j]
    weights = [w * scale for w in weights]
    weights.append((5 * k - 1) * scale // 2)
    instance = Instance(m=k + 1, weights=tuple(weights))
    return FamilyInstance(
        k=k,
        scale=scale,
        instance=instance,
        opt_makespan=3 * k * scale,
        worst_po_makespan=(7 * k - 1) * scale // 2,
        irse=Fraction(7 * k - 1, 6 * k),
    )


class _IndexPools:
    """Hands out job indices by weight value; weights are sorted in Instance."""

    def __init__(self, instance: Instance):
        self.pools: dict[int, deque[int]] = defaultdict(deque)
        for idx, w in enumerate(instance.weights):
            self.pools[w].append(idx)

    def take(self, weight: int) -> int:
        return self.pools[weight].popleft()


def _pair_min_max(values: list[int]) -> list[tuple[int, int]]:
    """Pair the smallest remaining value with the largest; here every pair
    lands on the same sum by construction of the family."""
    vs = sorted(values)
    pairs = []
    lo, hi = 0, len(vs) - 1
    while lo < hi:
        pairs.append((vs[lo], vs[hi]))
        lo += 1
        hi -= 1
    assert lo > hi, "family remainders always pair off evenly"
    return pairs


def family_witnesses(k: int) -> FamilyWitnesses:
    """The two benchmark allocations of family member k.

    ``worst_po``: the big job shares machine 0 with one smallest job (load
    (7k-1)/2) and the rest balance the other k machines at 3k-1 each; this
    is a potential optimum with the worst makespan in the family.

    ``optimal``: the big job is alone, the three smallest jobs share one
    machine (load 3k), and the remaining jobs pair to 3k; this achieves the
    optimal makespan. Both allocations have equal potential.
    """
    fam = lower_bound_family(k)
    inst = fam.instance
    s = fam.scale
    big = (5 * k - 1) * s // 2
    small = k * s

    def build(machines: list[list[int]]) -> Allocation:
        assert sum(len(mach) for mach in machines) == inst.n
        assignment = [0] * inst.n
        for machine_idx, jobs in enumerate(machines):
            for job in jobs:
                assignment[job] = machine_idx
        return Allocation(tuple(assignment))

    # Worst potential optimum: big + one smallest together, rest balanced.
    pools = _IndexPools(inst)
    machines = [[pools.take(big), pools.take(small)]]
    remaining = [small, small] + [j * s for j in range(k + 1, 2 * k) for _ in range(2)]
    for a, b in _pair_min_max(remaining):
        machines.append([pools.take(a), pools.take(b)])
    left = build(machines)

    # Makespan optimum: big alone, three smallest together, pairs at 3k.
    pools = _IndexPools(inst)
    machines = [[pools.take(big)], [pools.take(small) for _ in range(3)]]
    remaining = [j * s for j in range(k + 1, 2 * k) for _ in range(2)]
    for a, b in _pair_min_max(remaining):
        machines.append([pools.take(a), pools.take(b)])
    right = build(machines)

    return FamilyWitnesses(worst_po=left, optimal=right)


def random_instance(n: int, m: int, w_max: int, seed: int) -> Instance:
    """Seeded uniform instance: n weights drawn from [1, w_max].

    Same seed, same instance; the weight order is canonicalized by the
    Instance constructor, gcd is left untouched.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"job count must be a positive integer, got {n!r}")
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"machine count must be a positive integer, got {m!r}")
    if not isinstance(w_max, int) or w_max < 1:
        raise ValueError(f"w_max must be a positive integer, got {w_max!r}")
    rng = random.Random(seed)
    return Instance(m=m, weights=tuple(rng.randint(1, w_max) for _ in range(n)))
