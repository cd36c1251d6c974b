#!/usr/bin/env python3
"""
Runtime Tests
Remaining-time recurrences, initial distribution and derived quantities
"""

import sys
import os
import math

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules.errors import AbsorbingLevelError, DomainError
from modules.policy import PolicyTable, TableKind, k_opt_table, static_rate_table, static_strength_table
from modules.runtime import (init_distribution, normalized_time, relative_advantage, remaining_time_gradient,
                             remaining_times, remaining_times_fixed_point, total_expected_time)


def coupon_collector_times(n):
    return [sum(n / (n - j) for j in range(level, n)) for level in range(n + 1)]


class TestInitialDistribution:

    def test_three_bits(self):
        p0 = init_distribution(3)
        assert np.allclose(p0.mass, [1 / 8, 3 / 8, 3 / 8, 1 / 8])

    @pytest.mark.parametrize("n", [1, 10, 1000, 5000])
    def test_normalized(self, n):
        p0 = init_distribution(n)
        assert p0.mass.sum() == pytest.approx(1.0, abs=1e-12)
        assert p0[n // 2] == pytest.approx(max(p0.mass))


class TestRemainingTimes:

    @pytest.mark.parametrize("n", [3, 20, 200])
    def test_single_bit_flips_are_coupon_collector(self, n):
        times = remaining_times(n, static_strength_table(n, 1))
        assert np.allclose(times.times, coupon_collector_times(n), rtol=1e-12)

    def test_static_rls_three_bits(self):
        times = remaining_times(3, static_strength_table(3, 1))
        assert times[2] == pytest.approx(3.0)
        assert times[0] == pytest.approx(5.5)

    def test_last_level_of_standard_ea(self):
        n = 10
        times = remaining_times(n, static_rate_table(n, 'ea', 1 / n, tail_epsilon=0.0))
        assert times[n - 1] == pytest.approx(1 / ((1 / n) * (1 - 1 / n) ** (n - 1)), rel=1e-12)

    def test_optimum_has_zero_remaining_time(self):
        assert remaining_times(7, static_strength_table(7, 1))[7] == 0.0

    def test_fixed_point_iteration_agrees(self):
        table, times = k_opt_table(6)
        iterated = remaining_times_fixed_point(6, table)
        assert np.allclose(iterated.times, times.times, rtol=1e-10)

    def test_downstream_table_is_used(self):
        n = 8
        policy = static_strength_table(n, 1)
        _, optimal = k_opt_table(n)
        mixed = remaining_times(n, policy, downstream=optimal)
        assert mixed[n - 1] == pytest.approx(n)
        # Level l reads optimal times above it
        assert mixed[n - 2] == pytest.approx(n / 2 + optimal[n - 1])

    def test_absorbing_level(self):
        policy = PolicyTable(2, TableKind.STRENGTHS, (2, 2))
        with pytest.raises(AbsorbingLevelError) as excinfo:
            remaining_times(2, policy)
        assert excinfo.value.level == 1

    def test_zero_rate_standard_ea_is_absorbing(self):
        with pytest.raises(AbsorbingLevelError):
            remaining_times(4, static_rate_table(4, 'ea', 0.0))

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            remaining_times(4, static_strength_table(5, 1))


class TestDerivedQuantities:

    def test_total_three_bits(self):
        _, times = k_opt_table(3)
        assert total_expected_time(times) == pytest.approx(19 / 8)

    def test_normalized_time(self):
        assert normalized_time(432.4, 100) == pytest.approx(0.939, abs=5e-4)
        with pytest.raises(DomainError):
            normalized_time(1.0, 1)

    def test_gradient(self):
        times = remaining_times(5, static_strength_table(5, 1))
        gradient = remaining_time_gradient(times)
        assert sorted(gradient) == [1, 2, 3, 4, 5]
        assert gradient[5] == pytest.approx(-5.0)
        assert gradient[1] == pytest.approx(-1.0)
        assert all(g < 0 for g in gradient.values())

    def test_relative_advantage(self):
        assert relative_advantage(90.0, 100.0) == pytest.approx(0.1)
        assert relative_advantage(100.0, 100.0) == 0.0
        with pytest.raises(DomainError):
            relative_advantage(1.0, 0.0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
