#!/usr/bin/env python3
"""
Oracle Tests
Exact rational kernels, remaining times, exhaustive search and the full bit-string chain
"""

import sys
import os
from fractions import Fraction

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules.errors import AbsorbingLevelError, CapacityError
from modules.kernel import hypergeometric_transition
from modules.oracle import (exact_remaining_times, exact_total, exact_transition, exhaustive_optimal_policy,
                            fraction_grid, full_state_chain_times, solve_fraction_system)
from modules.policy import PolicyTable, TableKind, k_drift_table, k_opt_table, static_rate_table, static_strength_table
from modules.runtime import remaining_times, total_expected_time


def strengths(*values):
    return PolicyTable(len(values), TableKind.STRENGTHS, tuple(values), {'algorithm': 'rls'})


def rates(algorithm, *values):
    return PolicyTable(len(values), TableKind.RATES, tuple(values), {'algorithm': algorithm, 'p_min': 0.0})


class TestExactTransition:

    def test_small_cases(self):
        assert exact_transition(3, 1, 2) == {1: Fraction(2, 3), 3: Fraction(1, 3)}
        assert exact_transition(3, 1, 1) == {0: Fraction(1, 3), 2: Fraction(2, 3)}
        assert exact_transition(4, 2, 2) == {0: Fraction(1, 6), 2: Fraction(2, 3), 4: Fraction(1, 6)}

    @pytest.mark.parametrize("n", [1, 6, 11])
    def test_sums_to_one_and_matches_float_kernel(self, n):
        for level in range(n + 1):
            for k in range(n + 1):
                exact = exact_transition(n, level, k)
                assert sum(exact.values()) == 1
                approx = hypergeometric_transition(n, level, k)
                for fitness, p in exact.items():
                    assert approx[fitness] == pytest.approx(float(p), rel=1e-12)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            exact_transition(21, 3, 2)


class TestExactRemainingTimes:

    def test_optimal_strengths_three_bits(self):
        assert exact_remaining_times(3, strengths(3, 2, 1)) == {
            0: Fraction(1), 1: Fraction(3), 2: Fraction(3), 3: Fraction(0)}

    def test_resampling_ea_three_bits(self):
        times = exact_remaining_times(3, rates('ea-res', Fraction(1), Fraction(3, 4), Fraction(0)))
        assert times[1] == Fraction(27, 7)
        assert times[2] == Fraction(3)

    def test_standard_ea_three_bits(self):
        times = exact_remaining_times(3, rates('ea', Fraction(1), Fraction(2, 3), Fraction(1, 3)))
        assert times[2] == Fraction(27, 4)
        assert exact_total(times) == Fraction(83, 16)

    def test_single_bit_flips(self):
        assert exact_remaining_times(3, strengths(1, 1, 1))[2] == 3

    def test_absorbing(self):
        with pytest.raises(AbsorbingLevelError):
            exact_remaining_times(2, strengths(2, 2))

    def test_capacity(self):
        with pytest.raises(CapacityError):
            exact_remaining_times(17, static_strength_table(17, 1))

    @pytest.mark.parametrize("n", range(1, 9))
    def test_float_recurrence_agrees_on_strengths(self, n):
        for policy in (k_opt_table(n)[0], k_drift_table(n), static_strength_table(n, 1)):
            exact = exact_remaining_times(n, policy)
            approx = remaining_times(n, policy)
            for level in range(n):
                assert approx[level] == pytest.approx(float(exact[level]), rel=1e-10)

    @pytest.mark.parametrize("n", [2, 5, 8])
    @pytest.mark.parametrize("family", ['ea', 'ea-res'])
    def test_float_recurrence_agrees_on_rational_rates(self, n, family):
        for p in fraction_grid(64)[2::9]:
            policy = static_rate_table(n, family, float(p), tail_epsilon=0.0)
            exact = exact_remaining_times(n, policy)
            approx = remaining_times(n, policy)
            for level in range(n):
                assert approx[level] == pytest.approx(float(exact[level]), rel=1e-10)


class TestExhaustiveSearch:

    def test_three_bits(self):
        table, total = exhaustive_optimal_policy(3)
        assert table.values == (3, 2, 1)
        assert total == Fraction(19, 8)

    def test_two_bits(self):
        table, total = exhaustive_optimal_policy(2)
        assert table.values == (2, 1)
        assert total == Fraction(5, 4)

    def test_one_bit(self):
        table, total = exhaustive_optimal_policy(1)
        assert table.values == (1,)
        assert total == Fraction(1, 2)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_backward_minimization_is_globally_optimal(self, n):
        _, total = exhaustive_optimal_policy(n)
        _, times = k_opt_table(n)
        assert total_expected_time(times) == pytest.approx(float(total), rel=1e-12)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            exhaustive_optimal_policy(7)


class TestFullStateChain:

    def test_one_bit(self):
        assert full_state_chain_times(1, strengths(1))[0] == 1

    def test_two_bits_single_flips(self):
        assert full_state_chain_times(2, strengths(1, 1))[1] == 2

    @pytest.mark.parametrize("n", range(2, 9))
    def test_matches_level_chain(self, n):
        policies = [k_opt_table(n)[0], k_drift_table(n), static_strength_table(n, 2 if n > 2 else 1)]
        for policy in policies:
            try:
                level_times = exact_remaining_times(n, policy)
            except AbsorbingLevelError:
                continue
            assert full_state_chain_times(n, policy) == level_times

    def test_matches_level_chain_for_rates(self):
        policy = rates('ea', Fraction(1, 2), Fraction(1, 4), Fraction(1, 4), Fraction(1, 8))
        assert full_state_chain_times(4, policy) == exact_remaining_times(4, policy)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [9, 10])
    def test_matches_level_chain_large(self, n):
        policy = k_opt_table(n)[0]
        assert full_state_chain_times(n, policy) == exact_remaining_times(n, policy)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            full_state_chain_times(11, static_strength_table(11, 1))

    def test_solver(self):
        solution = solve_fraction_system([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]],
                                         [Fraction(3), Fraction(5)])
        assert solution == [Fraction(4, 5), Fraction(7, 5)]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
