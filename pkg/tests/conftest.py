"""Shared test helpers: independent recomputation oracles.

These deliberately avoid the library's incremental code paths; they are the
from-scratch references that delta formulas, solvers, and chains are checked
against.
"""

from __future__ import annotations

import random

from hypothesis import settings

from lbgames import Allocation, Instance

settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile("ci")


def loads_by_hand(instance: Instance, assignment) -> list[int]:
    """Direct per-machine summation, no library calls."""
    out = [0] * instance.m
    for w, j in zip(instance.weights, assignment):
        out[j] += w
    return out


def potential_by_hand(instance: Instance, assignment) -> int:
    return sum(l * l for l in loads_by_hand(instance, assignment))


def makespan_by_hand(instance: Instance, assignment) -> int:
    return max(loads_by_hand(instance, assignment)) if instance.m else 0


def random_small_instance(rng: random.Random, n_max=8, m_max=4, w_max=20) -> Instance:
    n = rng.randint(1, n_max)
    m = rng.randint(1, m_max)
    return Instance(m=m, weights=tuple(rng.randint(1, w_max) for _ in range(n)))


def random_allocation(rng: random.Random, instance: Instance) -> Allocation:
    return Allocation(tuple(rng.randrange(instance.m) for _ in range(instance.n)))


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys) / 2
