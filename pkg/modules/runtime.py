"""
Runtime Module
Expected remaining and total optimization times of fitness-dependent policies
"""

import math
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Optional

import numpy as np
from tqdm import tqdm

from .errors import AbsorbingLevelError, DomainError
from .kernel import (TransitionDistribution, check_dimension, improvement_probability,
                     law_transition, log_factorials)
from .settings import KERNEL_DEFAULTS

if TYPE_CHECKING:
    from .policy import PolicyTable

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Improvement probabilities below this make a level absorbing
MIN_IMPROVEMENT = 1e-300


@dataclass(frozen=True, eq=False)
class RemainingTimeTable:
    """E[T(level)] for level in [0..n], measured in offspring evaluations"""
    n: int
    times: np.ndarray
    policy_meta: Dict = field(default_factory=dict)

    def __getitem__(self, level: int) -> float:
        return float(self.times[level])

    def as_dict(self) -> Dict[int, float]:
        return {level: float(t) for level, t in enumerate(self.times)}


@dataclass(frozen=True, eq=False)
class InitialDistribution:
    """Fitness of a uniformly random bit string: p0(level) = C(n, level) / 2^n"""
    n: int
    mass: np.ndarray

    def __getitem__(self, level: int) -> float:
        return float(self.mass[level])


def init_distribution(n: int) -> InitialDistribution:
    n = check_dimension(n)
    lf = log_factorials(n)
    levels = np.arange(n + 1)
    logp = lf[n] - lf[levels] - lf[n - levels] - n * math.log(2.0)
    mass = np.exp(logp)
    mass /= math.fsum(mass)
    return InitialDistribution(n, mass)


def resolved_level_time(dist: TransitionDistribution, later_times: np.ndarray) -> float:
    """
    Remaining time of a level with the self-loop solved out:

        E[T(l)] = (1 + sum_{l < i < n} q_i E[T(i)]) / sum_{i > l} q_i

    where q is the offspring distribution at level l. Offspring at or below l
    (rejected or equal-valued) keep the algorithm at l.
    """
    level, n = dist.parent.value, dist.n
    improve = improvement_probability(dist)
    if improve < MIN_IMPROVEMENT:
        raise AbsorbingLevelError("zero improvement probability", level=level)
    spend = math.fsum(dist.mass[level + 1:n] * later_times[level + 1:n])
    return (1.0 + spend) / improve


def remaining_times(n: int, policy: 'PolicyTable', downstream: Optional[RemainingTimeTable] = None,
                    tail_epsilon: Optional[float] = None, show_progress: bool = False) -> RemainingTimeTable:
    """
    Expected remaining optimization time of every level under `policy`.

    Levels are processed from n-1 down to 0. When `downstream` is given the
    times of higher levels are read from it instead of from the table under
    construction.
    """
    n = check_dimension(n)
    if policy.n != n:
        raise DomainError(f"policy is defined for n={policy.n}, not n={n}")
    if downstream is not None and downstream.n != n:
        raise DomainError(f"downstream table is defined for n={downstream.n}, not n={n}")
    if tail_epsilon is None:
        tail_epsilon = policy.meta.get('tail_epsilon', KERNEL_DEFAULTS['tail_epsilon'])

    times = np.zeros(n + 1)
    source = downstream.times if downstream is not None else times
    levels = tqdm(range(n - 1, -1, -1), desc=f"remaining times n={n}", disable=not show_progress)
    for level in levels:
        dist = law_transition(policy.law(level), level, tail_epsilon)
        times[level] = resolved_level_time(dist, source)

    return RemainingTimeTable(n, times, dict(policy.meta))


def remaining_times_fixed_point(n: int, policy: 'PolicyTable', tol: float = 1e-13,
                                max_iterations: int = 1_000_000) -> RemainingTimeTable:
    """
    Same table computed by iterating the unresolved recurrence

        E[T(l)] = 1 + Pr[OM(y) <= l] E[T(l)] + sum_{l < i < n} q_i E[T(i)]

    to its fixed point, level by level. Only meant for small n.
    """
    n = check_dimension(n)
    tail_epsilon = policy.meta.get('tail_epsilon', KERNEL_DEFAULTS['tail_epsilon'])
    times = np.zeros(n + 1)

    for level in range(n - 1, -1, -1):
        dist = law_transition(policy.law(level), level, tail_epsilon)
        stay = math.fsum(dist.mass[:level + 1])
        spend = math.fsum(dist.mass[level + 1:n] * times[level + 1:n])
        if stay >= 1.0:
            raise AbsorbingLevelError("zero improvement probability", level=level)

        current = 0.0
        for _ in range(max_iterations):
            updated = 1.0 + stay * current + spend
            if abs(updated - current) <= tol * max(1.0, abs(updated)):
                current = updated
                break
            current = updated
        times[level] = current

    return RemainingTimeTable(n, times, dict(policy.meta))


def total_expected_time(rt: RemainingTimeTable) -> float:
    """E[T] = sum over levels of p0(level) E[T(level)]"""
    p0 = init_distribution(rt.n)
    return math.fsum(p0.mass * rt.times)


def normalized_time(T: float, n: int) -> float:
    """T / (n ln n)"""
    n = check_dimension(n)
    if n < 2:
        raise DomainError("normalization by n ln n needs n >= 2")
    return T / (n * math.log(n))


def remaining_time_gradient(rt: RemainingTimeTable) -> Dict[int, float]:
    """E[T(level)] - E[T(level - 1)] for level in [1..n]"""
    return {level: float(rt.times[level] - rt.times[level - 1]) for level in range(1, rt.n + 1)}


def relative_advantage(better: float, worse: float) -> float:
    """Relative saving (worse - better) / worse of one expected time over another"""
    if worse == 0:
        raise DomainError("relative advantage over a zero time is undefined")
    return (worse - better) / worse
