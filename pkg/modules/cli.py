"""
CLI Module
Command-line front end: policies, runtime tables, simulations and the result cache
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .cache import ResultCache, cache_parameters
from .errors import CacheError, DomainError, OneMaxError
from .exporter import (write_level_times_csv, write_metadata_json, write_policy_csv, write_raw_runs_csv,
                       write_runtime_csv, write_stats_csv, write_table_csv)
from .policy import OptimizerConfig, parse_p_min
from .runtime import normalized_time, total_expected_time
from .settings import KERNEL_DEFAULTS, OPTIMIZER_DEFAULTS, SIMULATION_DEFAULTS, TIE_BREAK
from .simulate import fixed_budget, fixed_target, run_batch
from .variants import ALGORITHMS, VARIANTS, check_selection, compute_policy, get_variant

logger = logging.getLogger(__name__)


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _name_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(',') if part.strip()]


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


# ---------------------------------------------------------------------------
# Policy lookup
# ---------------------------------------------------------------------------

def _static_value(args) -> Optional[str]:
    if args.mode != 'static':
        return None
    if args.algo == 'rls':
        return str(args.static_k or 1)
    return args.static_rate or '1/n'


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(grid_points=args.grid_points, refine_tolerance=args.refine_tol)


def load_policy(args, n: int, cache: ResultCache):
    """Cached (policy, times) for the selection in `args`, computed when missing"""
    p_min = args.p_min or '0'
    static = _static_value(args)
    cfg = _optimizer_config(args)
    show_progress = not args.quiet

    def compute():
        return compute_policy(args.algo, args.mode, n, p_min, static, cfg, args.tail_eps, args.tie_break,
                              show_progress)

    # Fixed-rate and fixed-strength tables are cheap; they bypass the cache
    if args.mode == 'static' and static != 'opt':
        return compute()

    parameters = cache_parameters(args.algo, args.mode, n, parse_p_min(p_min, n), static, args.tail_eps,
                                  args.tie_break, cfg)
    entry = cache.get_or_compute(parameters, compute, no_compute=args.no_compute)
    return entry.policy, entry.times


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_policy(args) -> int:
    cache = ResultCache(args.cache_dir)
    policy, times = load_policy(args, args.n, cache)
    out = Path(args.out or f"results/policy_{args.algo}_{args.mode}_n{args.n}.csv")
    write_policy_csv(policy, out)
    write_metadata_json(policy, out.with_suffix('.json'),
                        {'expected_time': total_expected_time(times)})
    logger.info(f"✅ Policy {args.algo}/{args.mode} for n={args.n} written to {out}")
    return 0


def cmd_runtime(args) -> int:
    cache = ResultCache(args.cache_dir)
    out = Path(args.out or f"results/runtime_{args.algo}_{args.mode}.csv")
    rows = []
    for n in args.dims:
        policy, times = load_policy(args, n, cache)
        expected = total_expected_time(times)
        rows.append({
            'algorithm': args.algo,
            'mode': args.mode,
            'p_min': parse_p_min(args.p_min or '0', n),
            'n': n,
            'expected_time': expected,
            'normalized_time': normalized_time(expected, n) if args.normalize and n >= 2 else np.nan,
        })
        logger.info(f"📊 {args.algo}/{args.mode} n={n}: E[T] = {expected:.4f}")
        if args.levels or args.gradient:
            write_level_times_csv(times, out.with_name(f"{out.stem}_n{n}_levels.csv"), gradient=args.gradient)
    write_runtime_csv(rows, out)
    return 0


def cmd_simulate(args) -> int:
    cache = ResultCache(args.cache_dir)
    policy, times = load_policy(args, args.n, cache)
    records = run_batch(policy, args.n, args.runs, args.seed, args.budget_cap, args.workers,
                        show_progress=not args.quiet)

    out = Path(args.out or f"results/simulate_{args.algo}_{args.mode}_n{args.n}.csv")
    targets = args.targets
    if not args.budgets and not targets:
        targets = [args.n]

    outputs = []
    if args.budgets:
        outputs.append(('budget', fixed_budget(records, args.budgets)))
    if targets:
        outputs.append(('target', fixed_target(records, targets)))
    for kind, stats in outputs:
        path = out if len(outputs) == 1 else out.with_name(f"{out.stem}_{kind}{out.suffix}")
        write_stats_csv(stats, path)

    if args.raw:
        write_raw_runs_csv(records, out.with_name(f"{out.stem}_raw.csv"))
    logger.info(f"✅ Simulation of {args.runs} runs at n={args.n} done (DP expectation "
                f"{total_expected_time(times):.4f})")
    return 0


def cmd_table(args) -> int:
    cache = ResultCache(args.cache_dir)
    cfg = _optimizer_config(args)
    values: Dict[str, Dict[int, float]] = {}

    for name in args.algos:
        variant = get_variant(name)
        values[name] = {}
        for n in args.dims:
            parameters = cache_parameters(variant.algorithm, variant.mode, n, parse_p_min(variant.p_min, n),
                                          None if variant.static is None else str(variant.static),
                                          args.tail_eps, args.tie_break, cfg)

            def compute(v=variant, n=n):
                return compute_policy(v.algorithm, v.mode, n, v.p_min, v.static, cfg, args.tail_eps,
                                      args.tie_break, not args.quiet)

            try:
                entry = cache.get_or_compute(parameters, compute, no_compute=args.no_compute)
            except CacheError as e:
                logger.warning(f"⚠️ {variant.label} n={n} left blank: {e}")
                continue
            values[name][n] = total_expected_time(entry.times)
            logger.info(f"📊 {variant.label:28s} n={n}: {values[name][n]:.{variant.decimals}f}")

    out = Path(args.out or "results/runtime_table.csv")
    write_table_csv(values, args.dims, out)
    return 0


def cmd_cache(args) -> int:
    cache = ResultCache(args.cache_dir)
    if args.action == 'clear':
        removed = cache.clear()
        print(f"🧹 Removed {removed} files from {cache.cache_dir}")
        return 0

    entries = cache.entries()
    if not entries:
        print(f"ℹ️  No cache entries in {cache.cache_dir}")
    for row in entries:
        if row['status'] != 'ok':
            print(f"❌ {row['file']} (corrupt)")
            continue
        print(f"✅ {row['algorithm']:7s} {row['mode']:7s} n={row['n']:<6d} p_min={row['p_min']:<10.6g} {row['file']}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_selection(parser: argparse.ArgumentParser):
    parser.add_argument('--algo', choices=ALGORITHMS, required=True)
    parser.add_argument('--mode', choices=('drift', 'opt', 'back', 'static'), required=True)
    parser.add_argument('--p-min', dest='p_min', default=None,
                        help="rate floor for ea-res: 0, 1/2n, 1/n or a number")
    parser.add_argument('--static-k', dest='static_k', type=_positive_int, default=None,
                        help="strength of static RLS (default 1)")
    parser.add_argument('--static-rate', dest='static_rate', default=None,
                        help="rate of the static EA: opt, 1/n, 1/2n or a number (default 1/n)")
    parser.add_argument('--no-compute', dest='no_compute', action='store_true',
                        help="fail instead of computing a policy missing from the cache")


def _add_numerics(parser: argparse.ArgumentParser):
    parser.add_argument('--tie-break', dest='tie_break', choices=('min', 'max'), default=TIE_BREAK['default'])
    parser.add_argument('--tail-eps', dest='tail_eps', type=float, default=KERNEL_DEFAULTS['tail_epsilon'])
    parser.add_argument('--grid-points', dest='grid_points', type=int, default=OPTIMIZER_DEFAULTS['grid_points'])
    parser.add_argument('--refine-tol', dest='refine_tol', type=float,
                        default=OPTIMIZER_DEFAULTS['refine_tolerance'])
    parser.add_argument('--out', default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='run_onemax',
                                     description="Optimal mutation strengths and rates on OneMax")
    parser.add_argument('--cache-dir', dest='cache_dir', default=None,
                        help="cache directory (default $ONEMAX_CACHE_DIR or ./cache)")
    parser.add_argument('--log-level', dest='log_level', default='INFO',
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))
    parser.add_argument('--quiet', action='store_true', help="no progress bars")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('policy', help="compute a policy table")
    _add_selection(p)
    p.add_argument('--n', type=_positive_int, required=True)
    _add_numerics(p)
    p.set_defaults(func=cmd_policy)

    p = sub.add_parser('runtime', help="expected optimization times")
    _add_selection(p)
    p.add_argument('--dims', type=_int_list, required=True)
    p.add_argument('--normalize', action='store_true', help="add E[T] / (n ln n)")
    p.add_argument('--levels', action='store_true', help="write per-level remaining times")
    p.add_argument('--gradient', action='store_true', help="per-level files with E[T(l)] - E[T(l-1)]")
    _add_numerics(p)
    p.set_defaults(func=cmd_runtime)

    p = sub.add_parser('simulate', help="Monte Carlo runs with anytime statistics")
    _add_selection(p)
    p.add_argument('--n', type=_positive_int, required=True)
    p.add_argument('--runs', type=int, default=SIMULATION_DEFAULTS['runs'])
    p.add_argument('--seed', type=int, default=SIMULATION_DEFAULTS['master_seed'])
    p.add_argument('--budgets', type=_int_list, default=None)
    p.add_argument('--targets', type=_int_list, default=None)
    p.add_argument('--budget-cap', dest='budget_cap', type=_positive_int, default=None)
    p.add_argument('--workers', type=_positive_int, default=SIMULATION_DEFAULTS['workers'])
    p.add_argument('--raw', action='store_true', help="also write every run's events")
    _add_numerics(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('table', help="wide runtime table over variants and dimensions")
    p.add_argument('--dims', type=_int_list, required=True)
    p.add_argument('--algos', type=_name_list, default=list(VARIANTS),
                   help="comma-separated variant names: " + ", ".join(VARIANTS))
    p.add_argument('--no-compute', dest='no_compute', action='store_true',
                   help="leave entries missing from the cache blank")
    _add_numerics(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser('cache', help="list or clear cached tables")
    p.add_argument('action', choices=('list', 'clear'))
    p.set_defaults(func=cmd_cache)

    return parser


def validate_args(parser: argparse.ArgumentParser, args):
    """Flag combinations argparse cannot express; violations exit with status 2"""
    if args.command in ('policy', 'runtime', 'simulate'):
        if args.p_min is not None and args.algo != 'ea-res':
            parser.error("--p-min only applies to --algo ea-res")
        try:
            check_selection(args.algo, args.mode, args.p_min)
        except DomainError as e:
            parser.error(str(e))
        if args.static_k is not None and (args.algo != 'rls' or args.mode != 'static'):
            parser.error("--static-k needs --algo rls --mode static")
        if args.static_rate is not None and (args.algo == 'rls' or args.mode != 'static'):
            parser.error("--static-rate needs --mode static with --algo ea or ea-res")
    if args.command == 'simulate' and args.runs < 1:
        parser.error("--runs must be at least 1")
    if args.command in ('runtime', 'table') and any(n < 1 for n in args.dims):
        parser.error("--dims must be positive")
    if args.command == 'table':
        unknown = [name for name in args.algos if name not in VARIANTS]
        if unknown:
            parser.error(f"unknown variants: {', '.join(unknown)}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    validate_args(parser, args)

    logging.basicConfig(level=getattr(logging, args.log_level), format='%(levelname)s %(name)s: %(message)s',
                        force=True)

    try:
        return args.func(args)
    except OneMaxError as e:
        logger.error(f"❌ {e}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
