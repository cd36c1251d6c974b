#!/usr/bin/env python3
"""
Simulation Tests
Level-chain runs, reproducibility and anytime statistics
"""

import sys
import os
import math

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules.errors import DomainError
from modules.kernel import MutationLaw, hypergeometric_transition
from modules.policy import PolicyTable, TableKind, k_opt_table, static_rate_table, static_strength_table
from modules.runtime import remaining_times, total_expected_time
from modules.simulate import (RunRecord, default_budget_cap, derive_seed, fixed_budget, fixed_target, make_rng,
                              run, run_batch, run_bitstring, sample_offspring_fitness, sample_strength,
                              standard_error)


class TestSampling:

    def test_deterministic_strength(self):
        rng = make_rng(1)
        assert {sample_strength(MutationLaw.deterministic(10, 5), rng) for _ in range(20)} == {5}

    def test_flip_one_convention(self):
        rng = make_rng(2)
        assert {sample_strength(MutationLaw.conditional_binomial(10, 0.0), rng) for _ in range(20)} == {1}

    def test_certain_binomial(self):
        rng = make_rng(3)
        assert {sample_strength(MutationLaw.binomial(3, 1.0), rng) for _ in range(20)} == {3}

    def test_conditional_binomial_never_zero(self):
        rng = make_rng(4)
        samples = [sample_strength(MutationLaw.conditional_binomial(50, 0.01), rng) for _ in range(2000)]
        assert min(samples) >= 1

    def test_binomial_mean(self):
        rng = make_rng(5)
        samples = np.array([sample_strength(MutationLaw.binomial(100, 0.05), rng) for _ in range(20000)])
        assert samples.mean() == pytest.approx(5.0, abs=4 * math.sqrt(100 * 0.05 * 0.95 / 20000))

    def test_offspring_frequencies_match_kernel(self):
        n, level, k, draws = 20, 8, 5, 100_000
        rng = make_rng(6)
        counts = np.zeros(n + 1)
        for _ in range(draws):
            counts[sample_offspring_fitness(n, level, k, rng)] += 1
        expected = hypergeometric_transition(n, level, k).mass
        sigma = np.sqrt(draws * expected * (1 - expected))
        assert np.all(np.abs(counts - draws * expected) <= 4 * sigma + 1e-9)

    def test_offspring_parity(self):
        rng = make_rng(7)
        for _ in range(200):
            j = sample_offspring_fitness(30, 11, 4, rng)
            assert 0 <= j <= 30 and (j - 11 - 4) % 2 == 0


class TestRuns:

    def test_flip_all_single_bit(self):
        policy = static_strength_table(1, 1)
        for seed in range(10):
            record = run(policy, 1, seed, budget_cap=10)
            expected = 0 if record.initial_fitness == 1 else 1
            assert record.hit_optimum_at == expected

    def test_three_bits_optimal_policy(self):
        policy, _ = k_opt_table(3)
        for seed in range(20):
            record = run(policy, 3, seed)
            assert record.final_fitness == 3
            fitness = record.fitness()
            assert np.all(np.diff(fitness) > 0)
            assert np.all(np.diff(record.evaluations()) > 0)
            if record.initial_fitness < 3:
                assert record.hit_optimum_at >= 1

    def test_budget_exhaustion_is_recorded(self):
        record = run(static_strength_table(200, 1), 200, 11, budget_cap=5)
        assert record.hit_optimum_at is None
        assert record.events[-1][0] <= 5

    def test_invalid_budget(self):
        with pytest.raises(DomainError):
            run(static_strength_table(5, 1), 5, 0, budget_cap=0)

    def test_record_invariants(self):
        with pytest.raises(DomainError):
            RunRecord(1, 5, ((0, 2), (3, 2)))
        with pytest.raises(DomainError):
            RunRecord(1, 5, ((0, 2), (3, 5)))

    def test_default_budget_cap(self):
        assert default_budget_cap(100) == math.ceil(100 * 100 * math.log(100))
        assert default_budget_cap(1) >= 1


class TestBatches:

    def test_reproducible(self):
        policy, _ = k_opt_table(30)
        a = run_batch(policy, 30, runs=20, master_seed=42, workers=1)
        b = run_batch(policy, 30, runs=20, master_seed=42, workers=4)
        assert [r.events for r in a] == [r.events for r in b]
        assert [r.seed for r in a] == [derive_seed(42, i) for i in range(20)]

    def test_distinct_streams(self):
        seeds = {derive_seed(0, i) for i in range(1000)}
        assert len(seeds) == 1000
        assert derive_seed(1, 0) != derive_seed(0, 1)

    def test_mean_matches_expectation(self):
        n, runs = 20, 400
        policy = static_strength_table(n, 1)
        expected = total_expected_time(remaining_times(n, policy))
        stats = fixed_target(run_batch(policy, n, runs=runs, master_seed=7), [n])
        assert stats.count[0] == runs
        assert abs(stats.mean[0] - expected) <= 4 * standard_error(stats)[0]

    def test_resampling_ea_mean_matches_expectation(self):
        n, runs = 25, 400
        policy = static_rate_table(n, 'ea-res', 1 / n)
        expected = total_expected_time(remaining_times(n, policy))
        stats = fixed_target(run_batch(policy, n, runs=runs, master_seed=3), [n])
        assert abs(stats.mean[0] - expected) <= 4 * standard_error(stats)[0]

    def test_invalid_run_count(self):
        with pytest.raises(DomainError):
            run_batch(static_strength_table(5, 1), 5, runs=0)


class TestAnytimeStatistics:

    @pytest.fixture
    def records(self):
        policy, _ = k_opt_table(40)
        return run_batch(policy, 40, runs=50, master_seed=1)

    def test_large_budget_reaches_optimum(self, records):
        stats = fixed_budget(records, [10 ** 6])
        assert stats.mean[0] == 40
        assert stats.std[0] == 0.0
        assert stats.count[0] == 50

    def test_budgets_are_monotone(self, records):
        stats = fixed_budget(records, [1, 10, 50, 100, 200])
        assert np.all(np.diff(stats.mean) >= 0)

    def test_budget_one_is_initial_fitness(self, records):
        stats = fixed_budget(records, [1])
        assert stats.mean[0] == pytest.approx(np.mean([r.initial_fitness for r in records]), abs=1e-12)

    def test_budget_counts_initial_evaluation(self):
        policy = static_strength_table(40, 40)
        records = run_batch(policy, 40, runs=200, master_seed=1, budget_cap=1)
        initial = np.array([r.initial_fitness for r in records], dtype=float)
        final = np.array([r.final_fitness for r in records], dtype=float)
        stats = fixed_budget(records, [1, 2])
        assert stats.mean[0] == pytest.approx(initial.mean(), abs=1e-12)
        assert stats.mean[1] == pytest.approx(final.mean(), abs=1e-12)

    def test_budget_two_sees_first_offspring(self):
        record = RunRecord(seed=0, n=10, events=((0, 4), (1, 6), (5, 10)), hit_optimum_at=5)
        assert fixed_budget([record], [1]).mean[0] == 4
        assert fixed_budget([record], [2]).mean[0] == 6
        assert fixed_budget([record], [5]).mean[0] == 6
        assert fixed_budget([record], [6]).mean[0] == 10

    def test_target_zero_is_free(self, records):
        stats = fixed_target(records, [0])
        assert stats.mean[0] == 0.0
        assert stats.censored[0] == 0

    def test_target_below_initial_fitness(self, records):
        for record in records:
            assert fixed_target([record], [record.initial_fitness]).mean[0] == 0.0

    def test_invalid_queries(self, records):
        with pytest.raises(DomainError):
            fixed_budget(records, [0])
        with pytest.raises(DomainError):
            fixed_target(records, [41])
        with pytest.raises(DomainError):
            fixed_budget([], [5])

    def test_censored_runs(self):
        policy = static_strength_table(60, 1)
        records = run_batch(policy, 60, runs=30, master_seed=9, budget_cap=20)
        stats = fixed_target(records, [60])
        assert stats.censored[0] == 30
        assert stats.count[0] == 0
        assert math.isnan(stats.mean[0])
        rows = stats.as_rows()
        assert rows[0]['censored'] == 30
        assert stats.runs[0] == 30
        assert fixed_budget(records, [5]).runs[0] == 30


class TestBitStrings:

    def test_reaches_optimum(self):
        record = run_bitstring(static_strength_table(12, 1), 12, seed=5)
        assert record.final_fitness == 12

    def test_mean_matches_level_chain(self):
        n, runs = 12, 300
        policy, times = k_opt_table(n)
        hits = np.array([run_bitstring(policy, n, derive_seed(8, i)).hit_optimum_at for i in range(runs)], dtype=float)
        se = hits.std(ddof=1) / math.sqrt(runs)
        assert abs(hits.mean() - total_expected_time(times)) <= 4 * se

    def test_dimension_limit(self):
        with pytest.raises(DomainError):
            run_bitstring(static_strength_table(65, 1), 65, seed=0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
