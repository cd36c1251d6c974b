"""
Oracle Module
Exact rational reference computations for small dimensions
"""

import math
import logging
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import AbsorbingLevelError, CapacityError, DomainError
from .kernel import LawVariant, check_dimension, check_level, check_strength
from .policy import ALGORITHM_FAMILIES, PolicyTable, TableKind
from .settings import ORACLE_LIMITS

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

ExactTimes = Dict[int, Fraction]


def _check_capacity(n: int, operation: str) -> int:
    n = check_dimension(n)
    limit = ORACLE_LIMITS[operation]
    if n > limit:
        raise CapacityError(f"exact {operation.replace('_', ' ')} supports n <= {limit}, got {n}")
    return n


def _check_policy(n: int, policy: PolicyTable):
    if policy.n != n:
        raise DomainError(f"policy is defined for n={policy.n}, not n={n}")


# ---------------------------------------------------------------------------
# Exact kernels
# ---------------------------------------------------------------------------

def exact_transition(n: int, level: int, k: int) -> Dict[int, Fraction]:
    """
    Offspring fitness distribution of flip_k by enumerating every k-subset.
    The parent carries its ones in positions [0, level).
    """
    n = _check_capacity(n, 'transition')
    level = check_level(n, level)
    k = check_strength(n, k)

    counts: Dict[int, int] = {}
    total = 0
    for flips in combinations(range(n), k):
        zeros_hit = sum(1 for position in flips if position >= level)
        fitness = level + 2 * zeros_hit - k
        counts[fitness] = counts.get(fitness, 0) + 1
        total += 1
    return {fitness: Fraction(c, total) for fitness, c in sorted(counts.items())}


def _comb_transition(n: int, level: int, k: int) -> Dict[int, Fraction]:
    """Same distribution via C(n-l, i) C(l, k-i) / C(n, k)"""
    zeros = n - level
    total = math.comb(n, k)
    out = {}
    for i in range(max(0, k - level), min(k, zeros) + 1):
        out[level + 2 * i - k] = Fraction(math.comb(zeros, i) * math.comb(level, k - i), total)
    return out


def exact_strength_weights(policy: PolicyTable, level: int) -> Dict[int, Fraction]:
    """Exact strength law at `level`; float rates are taken at their exact binary value"""
    n = policy.n
    value = policy.values[level]
    if policy.kind == TableKind.STRENGTHS:
        return {int(value): Fraction(1)}

    p = Fraction(value)
    family = ALGORITHM_FAMILIES[policy.algorithm]
    if family == LawVariant.CONDITIONAL_BINOMIAL and p == 0:
        return {1: Fraction(1)}
    weights = {k: math.comb(n, k) * p ** k * (1 - p) ** (n - k) for k in range(n + 1)}
    if family == LawVariant.CONDITIONAL_BINOMIAL:
        norm = 1 - (1 - p) ** n
        weights = {k: w / norm for k, w in weights.items() if k > 0}
    return {k: w for k, w in weights.items() if w != 0}


def _level_distribution(n: int, level: int, weights: Dict[int, Fraction]) -> Dict[int, Fraction]:
    mass: Dict[int, Fraction] = {}
    for k, w in weights.items():
        for fitness, q in _comb_transition(n, level, k).items():
            mass[fitness] = mass.get(fitness, Fraction(0)) + w * q
    return mass


def _resolved_time(level: int, n: int, mass: Dict[int, Fraction], later: ExactTimes) -> Optional[Fraction]:
    improve = sum((q for fitness, q in mass.items() if fitness > level), Fraction(0))
    if improve == 0:
        return None
    spend = sum((q * later[fitness] for fitness, q in mass.items() if level < fitness < n), Fraction(0))
    return (1 + spend) / improve


def initial_weights(n: int) -> Dict[int, Fraction]:
    """p0(level) = C(n, level) / 2^n"""
    return {level: Fraction(math.comb(n, level), 2 ** n) for level in range(n + 1)}


def exact_total(times: ExactTimes) -> Fraction:
    n = max(times)
    p0 = initial_weights(n)
    return sum((p0[level] * t for level, t in times.items()), Fraction(0))


# ---------------------------------------------------------------------------
# Remaining times
# ---------------------------------------------------------------------------

def exact_remaining_times(n: int, policy: PolicyTable) -> ExactTimes:
    """E[T(level)] in exact arithmetic, level n included with time 0"""
    n = _check_capacity(n, 'remaining_times')
    _check_policy(n, policy)

    times: ExactTimes = {n: Fraction(0)}
    for level in range(n - 1, -1, -1):
        mass = _level_distribution(n, level, exact_strength_weights(policy, level))
        t = _resolved_time(level, n, mass, times)
        if t is None:
            raise AbsorbingLevelError("zero improvement probability", level=level)
        times[level] = t
    return dict(sorted(times.items()))


def exhaustive_optimal_policy(n: int) -> Tuple[PolicyTable, Fraction]:
    """
    Globally optimal strength table by evaluating all n^n candidates exactly.
    Ties go to the lexicographically first table; tables with an absorbing
    level count as infinitely slow.
    """
    n = _check_capacity(n, 'exhaustive')

    rows = {(level, k): _comb_transition(n, level, k) for level in range(n) for k in range(1, n + 1)}
    p0 = initial_weights(n)
    suffix_times: Dict[Tuple[int, ...], Optional[ExactTimes]] = {(): {n: Fraction(0)}}

    def times_of(suffix: Tuple[int, ...]) -> Optional[ExactTimes]:
        # suffix holds the strengths of levels n-len(suffix) .. n-1
        if suffix in suffix_times:
            return suffix_times[suffix]
        later = times_of(suffix[1:])
        result = None
        if later is not None:
            level = n - len(suffix)
            t = _resolved_time(level, n, rows[(level, suffix[0])], later)
            if t is not None:
                result = dict(later)
                result[level] = t
        suffix_times[suffix] = result
        return result

    best_values, best_total = None, None
    for candidate in product(range(1, n + 1), repeat=n):
        times = times_of(candidate)
        if times is None:
            continue
        total = sum((p0[level] * t for level, t in times.items()), Fraction(0))
        if best_total is None or total < best_total:
            best_values, best_total = candidate, total

    logger.info(f"✅ exhaustive search over {n ** n} strength tables for n={n}: total {best_total}")
    meta = {'algorithm': 'rls', 'mode': 'exhaustive', 'p_min': 0.0, 'tail_epsilon': 0.0}
    return PolicyTable(n, TableKind.STRENGTHS, tuple(best_values), meta), best_total


# ---------------------------------------------------------------------------
# Full 2^n-state chain
# ---------------------------------------------------------------------------

def solve_fraction_system(matrix: List[List[Fraction]], rhs: List[Fraction]) -> List[Fraction]:
    """Gauss-Jordan elimination in exact arithmetic"""
    size = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col] != 0), None)
        if pivot is None:
            raise AbsorbingLevelError("singular hitting-time system")
        a[col], a[pivot] = a[pivot], a[col]
        lead = a[col][col]
        a[col] = [v / lead for v in a[col]]
        for r in range(size):
            factor = a[r][col]
            if r != col and factor != 0:
                a[r] = [v - factor * w for v, w in zip(a[r], a[col])]
    return [a[r][size] for r in range(size)]


def full_state_chain_times(n: int, policy: PolicyTable) -> ExactTimes:
    """
    Expected hitting times of the all-ones string on the 2^n bit-string chain,
    averaged over the strings of each fitness level.

    Equal-fitness offspring replace the parent, so states of one level are
    coupled; each level is solved as one linear block once all higher levels
    are known.
    """
    n = _check_capacity(n, 'full_state')
    _check_policy(n, policy)

    size = 1 << n
    popcount = [bin(x).count('1') for x in range(size)]
    states_by_level: Dict[int, List[int]] = {level: [] for level in range(n + 1)}
    for x in range(size):
        states_by_level[popcount[x]].append(x)

    hitting: Dict[int, Fraction] = {size - 1: Fraction(0)}
    for level in range(n - 1, -1, -1):
        weights = exact_strength_weights(policy, level)
        mask_prob = [Fraction(0)] * size
        for mask in range(size):
            k = popcount[mask]
            if k in weights:
                mask_prob[mask] = weights[k] / math.comb(n, k)

        states = states_by_level[level]
        index = {x: i for i, x in enumerate(states)}
        matrix = [[Fraction(0)] * len(states) for _ in states]
        rhs = [Fraction(1)] * len(states)
        for i, x in enumerate(states):
            matrix[i][i] += 1
            for mask in range(size):
                q = mask_prob[mask]
                if q == 0:
                    continue
                y = x ^ mask
                if y == x or popcount[y] < level:
                    # parent kept
                    matrix[i][i] -= q
                elif popcount[y] == level:
                    matrix[i][index[y]] -= q
                else:
                    rhs[i] += q * hitting[y]

        for x, h in zip(states, solve_fraction_system(matrix, rhs)):
            hitting[x] = h

    times = {level: sum((hitting[x] for x in xs), Fraction(0)) / len(xs)
             for level, xs in states_by_level.items()}
    return dict(sorted(times.items()))


def fraction_grid(denominator: int = 64) -> Sequence[Fraction]:
    """Rates m/denominator for m in [0..denominator]"""
    return [Fraction(m, denominator) for m in range(denominator + 1)]
