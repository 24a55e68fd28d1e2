"""Solvers against the exhaustive oracle and the frozen benchmark values."""

import random
from fractions import Fraction

import pytest

from conftest import random_small_instance
from lbgames import (
    Allocation,
    Instance,
    OracleTooLargeError,
    ResourceExhaustedError,
    brute_force,
    irse,
    is_nash,
    loads,
    lpt,
    makespan,
    minimum_potential,
    optimal_makespan,
    potential,
    potential_optimum,
    scaled,
)

FAMILY_K3 = Instance(m=4, weights=(7, 5, 5, 4, 4, 3, 3, 3))
FAMILY_K2_DOUBLED = Instance(m=3, weights=(9, 6, 6, 4, 4, 4))
FAMILY_K5 = Instance(m=6, weights=(12, 9, 9, 8, 8, 7, 7, 6, 6, 5, 5, 5))


def worst_po_makespan_by_oracle(instance):
    _, witnesses = brute_force(instance, "potential")
    return max(makespan(loads(instance, w)) for w in witnesses)


class TestBruteForce:
    def test_makespan_small(self):
        value, witnesses = brute_force(Instance(m=2, weights=(2, 1, 1)), "makespan")
        assert value == 2
        assert Allocation((0, 1, 1)) in witnesses

    def test_family_min_potential(self):
        value, _ = brute_force(FAMILY_K3, "potential")
        assert value == 292

    def test_single_machine(self):
        inst = Instance(m=1, weights=(5, 3))
        assert brute_force(inst, "makespan") == (8, [Allocation((0, 0))])
        assert brute_force(inst, "potential") == (64, [Allocation((0, 0))])

    def test_cap(self):
        with pytest.raises(OracleTooLargeError):
            brute_force(Instance(m=4, weights=(1,) * 10), cap=1000)

    def test_bad_objective(self):
        with pytest.raises(ValueError):
            brute_force(Instance(m=1, weights=(1,)), "loadsum")


class TestOptimalMakespan:
    def test_family_k3(self):
        value, witness = optimal_makespan(FAMILY_K3)
        assert value == 9
        assert makespan(loads(FAMILY_K3, witness)) == 9

    def test_two_machines(self):
        value, witness = optimal_makespan(Instance(m=2, weights=(4, 3, 3, 2)))
        assert value == 6
        assert sorted(loads(Instance(m=2, weights=(4, 3, 3, 2)), witness).loads) == [6, 6]

    def test_single_job(self):
        assert optimal_makespan(Instance(m=3, weights=(5,)))[0] == 5

    def test_empty(self):
        value, witness = optimal_makespan(Instance(m=2, weights=()))
        assert value == 0 and witness == Allocation(())

    def test_pooled_lower_bound_respected(self):
        rng = random.Random(3301)
        for _ in range(200):
            inst = random_small_instance(rng, n_max=7, m_max=4, w_max=15)
            value, _ = optimal_makespan(inst)
            assert value >= max(-(-inst.total_weight // inst.m), inst.weights[0])

    def test_lpt_upper_bounds_optimum(self):
        rng = random.Random(3302)
        for _ in range(100):
            inst = random_small_instance(rng)
            assert lpt(inst)[0] >= optimal_makespan(inst)[0]


class TestPotentialOptimum:
    def test_family_k3_report(self):
        report = potential_optimum(FAMILY_K3)
        assert report.min_potential == 292
        assert report.worst_po_makespan == 10
        assert report.opt_makespan == 9
        assert report.irse() == Fraction(10, 9)

    def test_two_unit_jobs(self):
        report = potential_optimum(Instance(m=2, weights=(1, 1)))
        assert report.min_potential == 2
        assert report.worst_po_makespan == 1
        assert report.po_count_up_to_symmetry == 1

    def test_family_k2_doubled(self):
        report = potential_optimum(FAMILY_K2_DOUBLED)
        # min potential 369 = 13^2 + 10^2 + 10^2, via brute force
        assert report.min_potential == 369
        assert report.worst_po_makespan == 13
        assert report.irse() == Fraction(13, 12)

    def test_witness_fields_consistent(self):
        rng = random.Random(414)
        for _ in range(60):
            inst = random_small_instance(rng, n_max=7, m_max=4, w_max=12)
            report = potential_optimum(inst)
            assert potential(loads(inst, report.worst_po_witness)) == report.min_potential
            assert makespan(loads(inst, report.worst_po_witness)) == report.worst_po_makespan
            assert makespan(loads(inst, report.opt_witness)) == report.opt_makespan
            assert report.opt_makespan <= report.worst_po_makespan
            assert is_nash(inst, report.worst_po_witness)

    def test_empty_instance(self):
        report = potential_optimum(Instance(m=3, weights=()))
        assert report.opt_makespan == 0
        assert report.min_potential == 0
        assert report.worst_po_makespan == 0


class TestIrse:
    def test_family_values(self):
        assert irse(FAMILY_K3) == Fraction(10, 9)
        assert irse(FAMILY_K5) == Fraction(17, 15)

    def test_single_job(self):
        assert irse(Instance(m=3, weights=(5,))) == Fraction(1, 1)

    def test_empty_instance_rejected(self):
        with pytest.raises(ValueError):
            irse(Instance(m=2, weights=()))


class TestOracleEquivalence:
    """B&B must match exhaustive enumeration exactly, witnesses included."""

    def corpus(self):
        rng = random.Random(616161)
        instances = [
            FAMILY_K2_DOUBLED,
            Instance(m=1, weights=(4, 2, 1)),
            Instance(m=4, weights=(3,)),  # more machines than jobs
            Instance(m=3, weights=(2, 2, 2, 2, 2, 2)),  # all equal
            Instance(m=2, weights=()),
        ]
        while len(instances) < 45:
            inst = random_small_instance(rng, n_max=8, m_max=4, w_max=12)
            if inst.m**inst.n <= 10**5:
                instances.append(inst)
        return instances

    def test_values_and_witnesses_match(self):
        for inst in self.corpus():
            bf_mk, mk_wits = brute_force(inst, "makespan")
            bf_pot, pot_wits = brute_force(inst, "potential")
            report = potential_optimum(inst)
            assert report.opt_makespan == bf_mk
            assert report.min_potential == bf_pot
            worst = max(makespan(loads(inst, w)) for w in pot_wits)
            assert report.worst_po_makespan == worst
            # shared tie-break: lexicographically smallest assignment vector
            assert report.opt_witness == mk_wits[0]
            worst_set = [w for w in pot_wits if makespan(loads(inst, w)) == worst]
            assert report.worst_po_witness == worst_set[0]

    def test_po_witnesses_are_nash(self):
        for inst in self.corpus():
            if inst.n == 0:
                continue
            _, pot_wits = brute_force(inst, "potential")
            for w in pot_wits:
                assert is_nash(inst, w)


class TestScalingInvariance:
    def test_minimizer_sets_unchanged(self):
        rng = random.Random(115)
        for _ in range(25):
            inst = random_small_instance(rng, n_max=5, m_max=3, w_max=8)
            big = scaled(inst, rng.randint(2, 4))
            for objective in ("makespan", "potential"):
                _, wits = brute_force(inst, objective)
                _, wits_scaled = brute_force(big, objective)
                assert wits == wits_scaled


class TestDeterminismAndLimits:
    def test_repeated_solves_identical(self):
        rng = random.Random(9)
        for _ in range(20):
            inst = random_small_instance(rng)
            assert potential_optimum(inst) == potential_optimum(inst)

    def test_node_limit_raises(self):
        with pytest.raises(ResourceExhaustedError) as err:
            potential_optimum(FAMILY_K5, node_limit=50)
        assert err.value.nodes_explored > 50

    def test_minimum_potential_matches_report(self):
        rng = random.Random(10)
        for _ in range(30):
            inst = random_small_instance(rng, n_max=7)
            assert minimum_potential(inst) == potential_optimum(inst).min_potential
