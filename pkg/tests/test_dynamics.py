"""Local search and logit dynamics against exact chain oracles."""

import itertools
import math
import random
from fractions import Fraction

import pytest

from conftest import potential_by_hand, random_allocation, random_small_instance, total_variation
from lbgames import (
    Allocation,
    DynamicsConfig,
    Instance,
    NeighborhoodSpec,
    OracleTooLargeError,
    exact_stationary,
    family_witnesses,
    gibbs_distribution,
    local_search,
    logit_step,
    logit_transition_matrix,
    lower_bound_family,
    potential_optimum,
    profile_distribution,
    simulate,
)

TWO_UNIT = Instance(m=2, weights=(1, 1))
TWO_ONE = Instance(m=2, weights=(2, 1))


def no_enabled_move_improves(instance, alloc, spec):
    """Exhaustive neighborhood scan, independent of the search code."""
    base = potential_by_hand(instance, alloc.assignment)
    n, m = instance.n, instance.m
    if spec.single_move:
        for job, t in itertools.product(range(n), range(m)):
            if t == alloc.assignment[job]:
                continue
            cand = list(alloc.assignment)
            cand[job] = t
            if potential_by_hand(instance, cand) < base:
                return False
    by_machine = [[] for _ in range(m)]
    for job, machine in enumerate(alloc.assignment):
        by_machine[machine].append(job)
    caps = []
    if spec.pair_swap:
        caps.append(1)
    if spec.bundle_swap_max >= 1:
        caps.append(spec.bundle_swap_max)
    for cap in caps:
        for a, b in itertools.combinations(range(m), 2):
            for sa in range(cap + 1):
                for sb in range(cap + 1):
                    if sa == sb == 0 or (cap == 1 and (sa, sb) != (1, 1)):
                        continue
                    for bundle_a in itertools.combinations(by_machine[a], sa):
                        for bundle_b in itertools.combinations(by_machine[b], sb):
                            cand = list(alloc.assignment)
                            for j in bundle_a:
                                cand[j] = b
                            for j in bundle_b:
                                cand[j] = a
                            if potential_by_hand(instance, cand) < base:
                                return False
    return True


class TestNeighborhoodSpec:
    def test_all_disabled_rejected(self):
        with pytest.raises(ValueError):
            NeighborhoodSpec(single_move=False, pair_swap=False, bundle_swap_max=0)

    def test_negative_bundle_rejected(self):
        with pytest.raises(ValueError):
            NeighborhoodSpec(bundle_swap_max=-1)


class TestLocalSearch:
    def test_unique_descent(self):
        inst = Instance(m=2, weights=(2, 2, 2))
        out = local_search(inst, Allocation((0, 0, 0)), NeighborhoodSpec(pair_swap=False, bundle_swap_max=0))
        assert sorted(potential_by_hand(inst, out.assignment) for _ in [0])[0] == 20
        assert sorted((out.assignment.count(0), out.assignment.count(1))) == [1, 2]

    def test_po_witness_is_local_optimum_for_all_neighborhoods(self):
        fam = lower_bound_family(3)
        spec = NeighborhoodSpec(bundle_swap_max=fam.instance.n)
        for witness in family_witnesses(3):
            assert local_search(fam.instance, witness, spec) == witness

    def test_balanced_two_machine_fixed_point(self):
        inst = Instance(m=2, weights=(3, 3, 2, 2, 2))
        start = Allocation((0, 0, 1, 1, 1))  # loads (6, 6): brute-force minimal
        spec = NeighborhoodSpec(pair_swap=False, bundle_swap_max=0)
        assert local_search(inst, start, spec) == start

    def test_descends_and_locally_optimal(self):
        rng = random.Random(1212)
        spec = NeighborhoodSpec()
        for _ in range(80):
            inst = random_small_instance(rng, n_max=7, m_max=3, w_max=9)
            start = random_allocation(rng, inst)
            out = local_search(inst, start, spec)
            assert potential_by_hand(inst, out.assignment) <= potential_by_hand(
                inst, start.assignment
            )
            assert no_enabled_move_improves(inst, out, spec)

    def test_pair_swaps_escape_single_move_optima(self):
        # {4,3} vs {3,2}: loads (7,5), a Nash point (no single move helps),
        # but swapping the machine-0 3 with the 2 reaches the (6,6) optimum
        inst = Instance(m=2, weights=(4, 3, 3, 2))
        alloc = Allocation((0, 0, 1, 1))
        single_only = NeighborhoodSpec(pair_swap=False, bundle_swap_max=0)
        assert local_search(inst, alloc, single_only) == alloc
        improved = local_search(inst, alloc, NeighborhoodSpec())
        assert potential_by_hand(inst, improved.assignment) == 72  # loads (6,6)


class TestLogitKernel:
    def test_step_is_deterministic_given_rng_state(self):
        rng_a, rng_b = random.Random(5), random.Random(5)
        alloc = Allocation((0, 0, 0))
        inst = Instance(m=3, weights=(3, 2, 1))
        a = logit_step(inst, alloc, Fraction(1, 2), rng_a)
        b = logit_step(inst, alloc, Fraction(1, 2), rng_b)
        assert a == b

    def test_beta_zero_single_step_uniform(self):
        # with beta = 0 every placement of the activated job is equally likely
        rng = random.Random(99)
        counts = {}
        inst = TWO_UNIT
        for _ in range(40000):
            out = logit_step(inst, Allocation((0, 0)), 0, rng)
            counts[out.assignment] = counts.get(out.assignment, 0) + 1
        # successors: stay (0,0) w.p. 1/2, (1,0) w.p. 1/4, (0,1) w.p. 1/4
        assert abs(counts.get((0, 0), 0) / 40000 - 0.5) < 0.02
        assert abs(counts.get((1, 0), 0) / 40000 - 0.25) < 0.02
        assert abs(counts.get((0, 1), 0) / 40000 - 0.25) < 0.02

    def test_strong_noise_free_limit(self):
        # beta large: from (0,0) on two unit jobs the activated job leaves
        rng = random.Random(1)
        for _ in range(50):
            out = logit_step(TWO_UNIT, Allocation((0, 0)), 50, rng)
            assert sorted(out.assignment) == [0, 1]

    @pytest.mark.parametrize("beta", [0, 1, 3, Fraction(1, 2)])
    @pytest.mark.parametrize("inst", [TWO_UNIT, TWO_ONE, Instance(m=3, weights=(2, 1))])
    def test_detailed_balance(self, inst, beta):
        states, matrix = logit_transition_matrix(inst, beta)
        gibbs = gibbs_distribution(inst, beta)
        dense = matrix.toarray()
        for i, a in enumerate(states):
            for j, b in enumerate(states):
                lhs = gibbs[a] * dense[i, j]
                rhs = gibbs[b] * dense[j, i]
                assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), abs(rhs))

    def test_rows_are_distributions(self):
        _, matrix = logit_transition_matrix(TWO_ONE, 2)
        rows = matrix.sum(axis=1)
        assert all(abs(float(r) - 1.0) < 1e-12 for r in rows.flat)


class TestExactStationary:
    @pytest.mark.parametrize("beta", [0, 1, 3])
    @pytest.mark.parametrize(
        "inst",
        [
            TWO_UNIT,
            TWO_ONE,
            Instance(m=2, weights=(2, 1, 1)),
            Instance(m=3, weights=(3, 2, 2)),
            Instance(m=2, weights=(3, 2, 2, 1, 1, 1, 1, 1, 1, 1)),  # 1024 states
        ],
    )
    def test_matches_gibbs(self, inst, beta):
        exact = exact_stationary(inst, beta)
        gibbs = gibbs_distribution(inst, beta)
        assert total_variation(exact, gibbs) <= 1e-10

    def test_closed_form_two_unit_jobs(self):
        pi = exact_stationary(TWO_UNIT, 1)
        split = math.exp(-2) / (2 * math.exp(-2) + 2 * math.exp(-4))
        assert abs(pi[(0, 1)] - split) < 1e-12
        assert abs(pi[(1, 0)] - split) < 1e-12

    def test_beta_zero_uniform(self):
        pi = exact_stationary(TWO_ONE, 0)
        assert all(abs(p - 0.25) < 1e-12 for p in pi.values())

    def test_gibbs_two_one_levels(self):
        # potentials 9, 5, 5, 9 across the four states
        gibbs = gibbs_distribution(TWO_ONE, 1)
        z = 2 * math.exp(-9) + 2 * math.exp(-5)
        assert abs(gibbs[(0, 0)] - math.exp(-9) / z) < 1e-15
        assert abs(gibbs[(0, 1)] - math.exp(-5) / z) < 1e-15

    def test_state_cap(self):
        with pytest.raises(OracleTooLargeError):
            exact_stationary(Instance(m=4, weights=(1,) * 8), 1)  # 65536 states


class TestSimulate:
    def test_reproducible(self):
        cfg = DynamicsConfig(beta=Fraction(3, 2), steps=2000, seed=7)
        assert simulate(TWO_ONE, cfg) == simulate(TWO_ONE, cfg)

    def test_matches_logit_step_chain(self):
        start = Allocation((0, 0, 0))
        inst = Instance(m=2, weights=(2, 2, 1))
        cfg = DynamicsConfig(beta=1, steps=25, seed=123, initial=start)
        stats = simulate(inst, cfg)
        rng = random.Random(123)
        alloc = start
        for _ in range(25):
            alloc = logit_step(inst, alloc, 1, rng)
        assert stats.final == alloc

    def test_frequencies_sum_to_one_exactly(self):
        cfg = DynamicsConfig(beta=1, steps=3456, seed=0)
        stats = simulate(TWO_UNIT, cfg)
        assert sum(stats.empirical_state_frequencies.values()) == Fraction(1)

    def test_visits_at_min_tracks_gibbs(self):
        cfg = DynamicsConfig(beta=3, steps=200_000, seed=11)
        stats = simulate(TWO_UNIT, cfg)
        expected = 1 / (1 + math.exp(-6))  # mass of the two split states
        assert stats.min_potential == 2
        assert abs(stats.visits_at_min_potential / cfg.steps - expected) < 0.02

    def test_family_chain_concentrates_on_minimum(self):
        fam = lower_bound_family(3)
        cfg = DynamicsConfig(beta=2, steps=300_000, seed=2024)
        stats = simulate(fam.instance, cfg)
        assert stats.min_potential == 292
        assert stats.visits_at_min_potential / cfg.steps > 0.5

    def test_empirical_matches_exact_profile_distribution(self):
        cfg = DynamicsConfig(beta=1, steps=200_000, seed=31)
        stats = simulate(TWO_ONE, cfg)
        exact = profile_distribution(TWO_ONE, exact_stationary(TWO_ONE, 1))
        empirical = {sig: c / cfg.steps for sig, c in stats.profile_counts.items()}
        assert total_variation(exact, empirical) <= 0.05

    def test_bad_config(self):
        with pytest.raises(ValueError):
            DynamicsConfig(beta=-1, steps=10, seed=0)
        with pytest.raises(ValueError):
            DynamicsConfig(beta=1, steps=0, seed=0)
        with pytest.raises(ValueError):
            simulate(TWO_UNIT, DynamicsConfig(beta=1, steps=5, seed=0, initial="warm"))

    def test_min_visit_fraction_nondecreasing_in_beta_exact(self):
        # computed on exact stationary distributions, not simulations
        for inst in (TWO_UNIT, TWO_ONE):
            report = potential_optimum(inst)
            fractions_at_min = []
            for beta in (0, 1, 3):
                pi = exact_stationary(inst, beta)
                mass = 0.0
                for state, p in pi.items():
                    if potential_by_hand(inst, state) == report.min_potential:
                        mass += p
                fractions_at_min.append(mass)
            assert fractions_at_min == sorted(fractions_at_min)
