"""
Demo Results - OneMax Mutation Policies
Prints the three-bit policy tables and one column of the runtime table
"""

import sys
import time

from modules.policy import k_drift_table, k_opt_table, p_drift_table, p_opt_table
from modules.runtime import normalized_time, remaining_times, total_expected_time
from modules.variants import VARIANTS, compute_variant


def show_three_bit_tables():
    """Drift-maximizing and optimal tables for n = 3"""

    print("🎬 DEMO: Mutation policies on OneMax, n = 3")
    print("=" * 60)

    k_drift = k_drift_table(3)
    k_opt, k_opt_times = k_opt_table(3)
    rows = [
        ("RLS", k_drift, remaining_times(3, k_drift), k_opt, k_opt_times),
    ]
    for family, label in (('ea', "(1+1) EA"), ('ea-res', "(1+1) EA>0")):
        drift = p_drift_table(3, family)
        opt, opt_times = p_opt_table(3, family)
        rows.append((label, drift, remaining_times(3, drift), opt, opt_times))

    for label, drift, drift_times, opt, opt_times in rows:
        print(f"\n{label}")
        print("-" * 50)
        print(f"{'level':>5} {'drift':>10} {'E[T]':>10} {'opt':>10} {'E[T]':>10}")
        for level in range(3):
            print(f"{level:>5} {drift[level]:>10.4g} {drift_times[level]:>10.4f} "
                  f"{opt[level]:>10.4g} {opt_times[level]:>10.4f}")
        print(f"{'total':>5} {'':>10} {total_expected_time(drift_times):>10.4f} "
              f"{'':>10} {total_expected_time(opt_times):>10.4f}")


def show_runtime_column(n=100):
    """Expected optimization time of every named variant at dimension n"""

    print(f"\n📊 Expected optimization times, n = {n}")
    print("=" * 60)
    for name, variant in VARIANTS.items():
        start_time = time.time()
        _, times = compute_variant(name, n)
        expected = total_expected_time(times)
        print(f"{variant.label:28s} {expected:>10.{variant.decimals}f} "
              f"({normalized_time(expected, n):.3f} n ln n, {time.time() - start_time:.1f}s)")


def main():
    show_three_bit_tables()
    show_runtime_column(int(sys.argv[1]) if len(sys.argv) > 1 else 100)


if __name__ == "__main__":
    main()
