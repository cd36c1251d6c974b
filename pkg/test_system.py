"""
Test Script for the OneMax Mutation-Policy Toolkit
End-to-end checks of the three-bit tables, the runtime table and the simulation protocol
"""

import sys

import pytest

from modules.policy import k_drift_table, k_opt_table, p_drift_table, p_opt_table
from modules.runtime import (normalized_time, relative_advantage, remaining_times, remaining_times_fixed_point,
                             total_expected_time)
from modules.simulate import fixed_budget, fixed_target, run_batch, standard_error
from modules.variants import VARIANTS, compute_variant, get_variant

# Expected optimization times of the runtime table; RLS rows carry one decimal
RUNTIME_TABLE = {
    100: {
        'rls-opt': 432.4, 'rls-drift': 432.6, 'rls-static': 449,
        'ea-res-opt': 433.866, 'ea-res-opt-pmin-1/2n': 533, 'ea-res-opt-pmin-1/n': 662,
        'ea-res-drift': 434.112, 'ea-res-drift-pmin-1/2n': 533, 'ea-res-drift-pmin-1/n': 663,
        'ea-res-static-1/2n': 549, 'ea-res-static-1/n': 678,
        'ea-opt': 1005, 'ea-drift': 1005, 'ea-back': 1007, 'ea-static-opt': 1057, 'ea-static-1/n': 1070,
    },
    1000: {
        'rls-opt': 6644.0, 'rls-drift': 6644.2, 'rls-static': 6792,
        'ea-res-opt-pmin-1/2n': 8320, 'ea-res-opt-pmin-1/n': 10547,
        'ea-opt': 16253, 'ea-back': 16282, 'ea-static-1/n': 16895,
    },
}

# Unfloored resampling rows are evaluated to three decimals; the published
# 436 (n=100) and 6664 (n=1000) are upper bounds
PUBLISHED_BOUNDS = {100: 436, 1000: 6664}
UNFLOORED_RESAMPLING = ('ea-res-opt', 'ea-res-drift')


def tolerance(name):
    if name in UNFLOORED_RESAMPLING:
        return 0.01
    return 0.05 if get_variant(name).decimals == 1 else 0.5


def test_three_bit_rls():
    drift = k_drift_table(3)
    opt, opt_times = k_opt_table(3)
    drift_times = remaining_times(3, drift)
    assert drift.as_dict() == {0: 3, 1: 3, 2: 1}
    assert opt.as_dict() == {0: 3, 1: 2, 2: 1}
    assert [drift_times[level] for level in range(3)] == pytest.approx([1, 4, 3], abs=1e-9)
    assert [opt_times[level] for level in range(3)] == pytest.approx([1, 3, 3], abs=1e-9)
    assert total_expected_time(drift_times) == pytest.approx(2.75, abs=1e-9)
    assert total_expected_time(opt_times) == pytest.approx(2.375, abs=1e-9)


def test_three_bit_standard_ea():
    opt, opt_times = p_opt_table(3, 'ea')
    drift_times = remaining_times(3, p_drift_table(3, 'ea'))
    assert list(opt.values) == pytest.approx([1, 2 / 3, 1 / 3], abs=1e-6)
    assert [drift_times[level] for level in range(3)] == pytest.approx([1, 7.75, 6.75], abs=1e-9)
    assert [opt_times[level] for level in range(3)] == pytest.approx([1, 6.75, 6.75], abs=1e-9)
    assert total_expected_time(drift_times) == pytest.approx(5.5625, abs=1e-9)
    assert total_expected_time(opt_times) == pytest.approx(5.1875, abs=1e-9)


def test_three_bit_resampling_ea():
    opt, opt_times = p_opt_table(3, 'ea-res', p_min=0.0)
    drift = p_drift_table(3, 'ea-res', p_min=0.0)
    assert list(opt.values) == pytest.approx([1, 0.75, 0], abs=1e-6)
    assert list(drift.values) == pytest.approx([1, 1, 0], abs=1e-6)
    assert opt_times[1] == pytest.approx(27 / 7, abs=1e-9)
    assert total_expected_time(remaining_times(3, drift)) == pytest.approx(2.75, abs=1e-9)
    assert total_expected_time(opt_times) == pytest.approx(2.6964, abs=1e-4)


def test_every_variant_has_an_expectation():
    assert set(RUNTIME_TABLE[100]) == set(VARIANTS)


@pytest.mark.parametrize("name", sorted(RUNTIME_TABLE[100]))
def test_runtime_table_dimension_100(name):
    _, times = compute_variant(name, 100)
    assert total_expected_time(times) == pytest.approx(RUNTIME_TABLE[100][name], abs=tolerance(name))


def test_normalized_optimal_rls():
    _, times = compute_variant('rls-opt', 100)
    assert normalized_time(total_expected_time(times), 100) == pytest.approx(0.939, abs=0.002)


def test_raising_the_rate_floor_costs_time():
    totals = {name: total_expected_time(compute_variant(name, 100)[1])
              for name in ('ea-res-opt', 'ea-res-opt-pmin-1/2n', 'ea-res-opt-pmin-1/n')}
    assert relative_advantage(totals['ea-res-opt'], totals['ea-res-opt-pmin-1/n']) > 0.3
    assert totals['ea-res-opt'] < totals['ea-res-opt-pmin-1/2n'] < totals['ea-res-opt-pmin-1/n']


def test_unfloored_resampling_sits_between_rls_and_published_value():
    rls = total_expected_time(compute_variant('rls-opt', 100)[1])
    policy, times = compute_variant('ea-res-opt', 100)
    drift = total_expected_time(compute_variant('ea-res-drift', 100)[1])
    optimal = total_expected_time(times)
    assert rls <= optimal <= drift < PUBLISHED_BOUNDS[100]
    assert total_expected_time(remaining_times_fixed_point(100, policy)) == pytest.approx(optimal, rel=1e-9)


@pytest.mark.slow
def test_unfloored_resampling_at_1000():
    rls = total_expected_time(compute_variant('rls-opt', 1000)[1])
    optimal = total_expected_time(compute_variant('ea-res-opt', 1000)[1])
    assert rls <= optimal <= PUBLISHED_BOUNDS[1000] + 0.5


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(RUNTIME_TABLE[1000]))
def test_runtime_table_dimension_1000(name):
    _, times = compute_variant(name, 1000)
    assert total_expected_time(times) == pytest.approx(RUNTIME_TABLE[1000][name], abs=tolerance(name))


@pytest.mark.slow
def test_normalized_optimal_rls_at_4500():
    _, times = compute_variant('rls-opt', 4500)
    assert total_expected_time(times) == pytest.approx(36677.8, abs=0.05)
    assert normalized_time(total_expected_time(times), 4500) == pytest.approx(0.969, abs=0.002)


@pytest.mark.slow
@pytest.mark.parametrize("name", ['rls-opt', 'rls-drift', 'rls-static'])
def test_simulation_matches_expectation(name):
    n = 1000
    policy, times = compute_variant(name, n)
    records = run_batch(policy, n, runs=500, master_seed=2024)
    stats = fixed_target(records, [n])
    assert stats.censored[0] == 0
    assert abs(stats.mean[0] - total_expected_time(times)) <= 3 * standard_error(stats)[0]


@pytest.mark.slow
def test_fixed_budget_advantage_at_budget_100():
    n = 1000
    optimal = run_batch(compute_variant('rls-opt', n)[0], n, runs=500, master_seed=11)
    static = run_batch(compute_variant('rls-static', n)[0], n, runs=500, master_seed=11)
    gain = fixed_budget(optimal, [100]).mean[0] / fixed_budget(static, [100]).mean[0] - 1
    assert 0.05 <= gain <= 0.15


@pytest.mark.slow
def test_simulation_reruns_are_identical():
    policy, _ = compute_variant('rls-opt', 1000)
    first = run_batch(policy, 1000, runs=50, master_seed=99)
    second = run_batch(policy, 1000, runs=50, master_seed=99)
    assert [r.events for r in first] == [r.events for r in second]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
