"""
Simulation Module
Monte Carlo runs of elitist mutation-only algorithms on OneMax with fixed-budget and fixed-target statistics
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from .errors import DomainError
from .kernel import LawVariant, MutationLaw, check_dimension, check_level, law_weights
from .settings import KERNEL_DEFAULTS, SIMULATION_DEFAULTS

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Bit-string execution is only used to validate the level chain
BITSTRING_LIMIT = 64


@dataclass(frozen=True, eq=False)
class RunRecord:
    """
    One run: (evaluations used, fitness) at initialization and at every strict
    improvement. hit_optimum_at is None when the budget ran out first.
    """
    seed: int
    n: int
    events: Tuple[Tuple[int, int], ...]
    hit_optimum_at: Optional[int] = None

    def __post_init__(self):
        if not self.events:
            raise DomainError("a run record needs at least the initialization event")
        for (e0, f0), (e1, f1) in zip(self.events, self.events[1:]):
            if not (e1 > e0 and f1 > f0):
                raise DomainError("run events must strictly increase in evaluations and fitness")
        reached = self.events[-1][1] == self.n
        if reached != (self.hit_optimum_at is not None):
            raise DomainError("hit_optimum_at must be set exactly when the optimum was reached")

    @property
    def final_fitness(self) -> int:
        return self.events[-1][1]

    @property
    def initial_fitness(self) -> int:
        return self.events[0][1]

    def evaluations(self) -> np.ndarray:
        return np.array([e for e, _ in self.events], dtype=np.int64)

    def fitness(self) -> np.ndarray:
        return np.array([f for _, f in self.events], dtype=np.int64)

    def as_rows(self, run_index: int) -> List[Dict]:
        return [{'run': run_index, 'seed': self.seed, 'evals': e, 'fitness': f} for e, f in self.events]


@dataclass(frozen=True, eq=False)
class AggregateStats:
    """
    Mean, sample standard deviation and count per query point.

    `count` is the number of runs the mean is taken over. Fixed-budget
    statistics use every run; fixed-target statistics leave out runs that
    never reached the target and report them in `censored`. `runs` is the
    total either way.
    """
    kind: str
    points: Tuple[int, ...]
    mean: np.ndarray
    std: np.ndarray
    count: np.ndarray
    censored: Optional[np.ndarray] = None

    @property
    def runs(self) -> np.ndarray:
        """Runs per query point, censored ones included"""
        if self.censored is None:
            return self.count
        return self.count + self.censored

    def as_rows(self) -> List[Dict]:
        rows = []
        for i, point in enumerate(self.points):
            row = {'point': point, 'mean': float(self.mean[i]), 'std': float(self.std[i]),
                   'count': int(self.count[i])}
            if self.censored is not None:
                row['censored'] = int(self.censored[i])
            rows.append(row)
        return rows


# ---------------------------------------------------------------------------
# Random streams
# ---------------------------------------------------------------------------

def make_rng(seed: int) -> np.random.Generator:
    """Philox counter-based generator for one run"""
    return np.random.Generator(np.random.Philox(int(seed)))


def derive_seed(master_seed: int, run_index: int) -> int:
    """64-bit seed of run `run_index`, derived from (master_seed, run_index)"""
    state = np.random.SeedSequence([int(master_seed), int(run_index)]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def default_budget_cap(n: int) -> int:
    """budget_factor * n * ln(n) evaluations, at least budget_factor"""
    factor = SIMULATION_DEFAULTS['budget_factor']
    return max(int(math.ceil(factor * n * math.log(n))), factor)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

class StrengthSampler:
    """Cumulative strength weights of a law, sampled by inversion"""

    def __init__(self, law: MutationLaw, tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon']):
        self.law = law
        self.fixed = law.k if law.variant == LawVariant.DETERMINISTIC else None
        if self.fixed is None:
            w = law_weights(law, tail_epsilon)
            self.start = w.start
            self.cumulative = np.cumsum(w.weights) / w.total
            if len(self.cumulative) == 1:
                self.fixed = w.start

    def sample(self, rng: np.random.Generator) -> int:
        if self.fixed is not None:
            return self.fixed
        index = int(np.searchsorted(self.cumulative, rng.random(), side='right'))
        return self.start + min(index, len(self.cumulative) - 1)


def sample_strength(law: MutationLaw, rng: np.random.Generator,
                    tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon']) -> int:
    """Draw a mutation strength from `law`"""
    return StrengthSampler(law, tail_epsilon).sample(rng)


def sample_offspring_fitness(n: int, level: int, k: int, rng: np.random.Generator) -> int:
    """Fitness after flipping k uniformly chosen bits of a parent at `level`"""
    if k == 0:
        return level
    zeros_hit = int(rng.hypergeometric(n - level, level, k))
    return level + 2 * zeros_hit - k


def _policy_samplers(policy, n: int) -> List[StrengthSampler]:
    if policy.n != n:
        raise DomainError(f"policy is defined for n={policy.n}, not n={n}")
    tail_epsilon = policy.meta.get('tail_epsilon', KERNEL_DEFAULTS['tail_epsilon'])
    return [StrengthSampler(policy.law(level), tail_epsilon) for level in range(n)]


def _check_budget_cap(n: int, budget_cap: Optional[int]) -> int:
    if budget_cap is None:
        return default_budget_cap(n)
    if isinstance(budget_cap, bool) or int(budget_cap) != budget_cap or budget_cap < 1:
        raise DomainError(f"budget_cap must be a positive integer, got {budget_cap!r}")
    return int(budget_cap)


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------

def _run_levels(samplers: List[StrengthSampler], n: int, seed: int, budget_cap: int) -> RunRecord:
    rng = make_rng(seed)
    fitness = int(rng.binomial(n, 0.5))
    events = [(0, fitness)]
    used = 0
    while fitness < n and used < budget_cap:
        k = samplers[fitness].sample(rng)
        offspring = sample_offspring_fitness(n, fitness, k, rng)
        used += 1
        if offspring > fitness:
            fitness = offspring
            events.append((used, fitness))
    hit = events[-1][0] if fitness == n else None
    return RunRecord(int(seed), n, tuple(events), hit)


def run(policy, n: int, seed: int, budget_cap: Optional[int] = None) -> RunRecord:
    """
    One run on the fitness-level chain: sample k from the policy's law at the
    current level, sample the offspring fitness, accept when it is not worse.
    """
    n = check_dimension(n)
    budget_cap = _check_budget_cap(n, budget_cap)
    return _run_levels(_policy_samplers(policy, n), n, seed, budget_cap)


def run_batch(policy, n: int, runs: int = SIMULATION_DEFAULTS['runs'],
              master_seed: int = SIMULATION_DEFAULTS['master_seed'], budget_cap: Optional[int] = None,
              workers: int = SIMULATION_DEFAULTS['workers'], show_progress: bool = False) -> List[RunRecord]:
    """Independent runs seeded from (master_seed, i), returned in run order"""
    n = check_dimension(n)
    if isinstance(runs, bool) or int(runs) != runs or runs < 1:
        raise DomainError(f"runs must be a positive integer, got {runs!r}")
    budget_cap = _check_budget_cap(n, budget_cap)
    samplers = _policy_samplers(policy, n)
    seeds = [derive_seed(master_seed, i) for i in range(runs)]

    logger.info(f"🔄 Simulating {runs} runs at n={n} (seed {master_seed}, cap {budget_cap})")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        results = executor.map(lambda s: _run_levels(samplers, n, s, budget_cap), seeds)
        records = list(tqdm(results, total=runs, desc=f"runs n={n}", disable=not show_progress))

    exhausted = sum(1 for r in records if r.hit_optimum_at is None)
    if exhausted:
        logger.warning(f"⚠️ {exhausted} of {runs} runs exhausted the budget of {budget_cap}")
    logger.info(f"✅ Finished {runs} runs at n={n}")
    return records


def run_bitstring(policy, n: int, seed: int, budget_cap: Optional[int] = None) -> RunRecord:
    """Same algorithm on explicit bit strings (n <= 64)"""
    n = check_dimension(n)
    if n > BITSTRING_LIMIT:
        raise DomainError(f"bit-string runs support n <= {BITSTRING_LIMIT}, got {n}")
    budget_cap = _check_budget_cap(n, budget_cap)
    samplers = _policy_samplers(policy, n)

    rng = make_rng(seed)
    x = rng.integers(0, 2, size=n, dtype=np.int8)
    fitness = int(x.sum())
    events = [(0, fitness)]
    used = 0
    while fitness < n and used < budget_cap:
        k = samplers[fitness].sample(rng)
        y = x.copy()
        if k:
            flips = rng.choice(n, size=k, replace=False)
            y[flips] ^= 1
        used += 1
        offspring = int(y.sum())
        if offspring >= fitness:
            x = y
            if offspring > fitness:
                fitness = offspring
                events.append((used, fitness))
    hit = events[-1][0] if fitness == n else None
    return RunRecord(int(seed), n, tuple(events), hit)


# ---------------------------------------------------------------------------
# Anytime statistics
# ---------------------------------------------------------------------------

def _sample_stats(values: np.ndarray) -> Tuple[float, float]:
    if len(values) == 0:
        return float('nan'), float('nan')
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return mean, std


def _common_dimension(records: Sequence[RunRecord]) -> int:
    if not records:
        raise DomainError("no run records to aggregate")
    dims = {r.n for r in records}
    if len(dims) != 1:
        raise DomainError(f"run records mix dimensions {sorted(dims)}")
    return dims.pop()


def best_fitness_within(record: RunRecord, budget: int) -> int:
    """
    Best fitness within `budget` evaluations. The initial evaluation is the
    first unit of budget, so budget 1 is the initial fitness.
    """
    index = int(np.searchsorted(record.evaluations(), budget - 1, side='right')) - 1
    return record.events[index][1]


def first_hit(record: RunRecord, target: int) -> Optional[int]:
    """Evaluations used when fitness first reached `target`, None if never"""
    for used, fitness in record.events:
        if fitness >= target:
            return used
    return None


def fixed_budget(records: Sequence[RunRecord], budgets: Sequence[int]) -> AggregateStats:
    """Statistics of the best fitness reached within each budget"""
    _common_dimension(records)
    for b in budgets:
        if isinstance(b, bool) or int(b) != b or b < 1:
            raise DomainError(f"budgets must be positive integers, got {b!r}")

    means, stds = [], []
    for b in budgets:
        values = np.array([best_fitness_within(r, int(b)) for r in records], dtype=float)
        mean, std = _sample_stats(values)
        means.append(mean)
        stds.append(std)
    count = np.full(len(budgets), len(records), dtype=np.int64)
    return AggregateStats('budget', tuple(int(b) for b in budgets), np.array(means), np.array(stds), count)


def fixed_target(records: Sequence[RunRecord], targets: Sequence[int]) -> AggregateStats:
    """
    Statistics of the first hitting time of each target fitness.

    Runs that never reach a target are left out of its mean and std and
    counted in `censored`; count + censored equals the number of runs.
    """
    n = _common_dimension(records)
    for t in targets:
        check_level(n, t)

    means, stds, counts, censored = [], [], [], []
    for t in targets:
        hits = [first_hit(r, t) for r in records]
        values = np.array([h for h in hits if h is not None], dtype=float)
        mean, std = _sample_stats(values)
        means.append(mean)
        stds.append(std)
        counts.append(len(values))
        censored.append(len(hits) - len(values))
    if any(censored):
        logger.warning(f"⚠️ {max(censored)} runs censored for at least one target")
    return AggregateStats('target', tuple(int(t) for t in targets), np.array(means), np.array(stds),
                          np.array(counts, dtype=np.int64), np.array(censored, dtype=np.int64))


def standard_error(stats: AggregateStats) -> np.ndarray:
    """std / sqrt(count) per query point"""
    with np.errstate(divide='ignore', invalid='ignore'):
        return stats.std / np.sqrt(stats.count)
