"""
Policy Module
Drift-maximizing and time-optimal mutation strengths and rates for RLS, the (1+1) EA and the (1+1) EA>0
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, Optional, Tuple, Union

import numpy as np
from scipy import optimize
from tqdm import tqdm

from .errors import ConvergenceError, DomainError
from .kernel import (LawVariant, MutationLaw, WeightVector, binomial_weights, check_dimension,
                     check_rate, check_tail_epsilon, conditional_binomial_weights, hypergeometric_transition,
                     improvement_gains, law_transition, level_transition_matrix)
from .runtime import (MIN_IMPROVEMENT, RemainingTimeTable, remaining_times, resolved_level_time,
                      total_expected_time)
from .settings import KERNEL_DEFAULTS, OPTIMIZER_DEFAULTS, TIE_BREAK

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Algorithm name -> strength law family
ALGORITHM_FAMILIES = {
    'rls': LawVariant.DETERMINISTIC,
    'ea': LawVariant.BINOMIAL,
    'ea-res': LawVariant.CONDITIONAL_BINOMIAL,
}
FAMILY_ALGORITHMS = {family: name for name, family in ALGORITHM_FAMILIES.items()}

MODES = ('drift', 'opt', 'static', 'back')


class TableKind(str, Enum):
    STRENGTHS = "strengths"
    RATES = "rates"


class Objective(str, Enum):
    MAXIMIZE_DRIFT = "maximize_drift"
    MINIMIZE_REMAINING_TIME = "minimize_remaining_time"


@dataclass(frozen=True)
class OptimizerConfig:
    """Coarse grid followed by bounded refinement of a rate"""
    grid_points: int = OPTIMIZER_DEFAULTS['grid_points']
    refine_tolerance: float = OPTIMIZER_DEFAULTS['refine_tolerance']
    objective: Objective = Objective.MINIMIZE_REMAINING_TIME
    max_iterations: int = OPTIMIZER_DEFAULTS['max_iterations']

    def __post_init__(self):
        if self.grid_points < 16:
            raise DomainError(f"grid_points must be at least 16, got {self.grid_points}")
        if not 0.0 < self.refine_tolerance <= 1e-6:
            raise DomainError(f"refine_tolerance must lie in (0, 1e-6], got {self.refine_tolerance}")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be positive")

    def with_objective(self, objective: Objective) -> 'OptimizerConfig':
        return OptimizerConfig(self.grid_points, self.refine_tolerance, objective, self.max_iterations)

    def as_dict(self) -> Dict:
        return {'grid_points': self.grid_points, 'refine_tolerance': self.refine_tolerance,
                'max_iterations': self.max_iterations}


@dataclass(frozen=True, eq=False)
class PolicyTable:
    """Mutation strength or rate for every fitness level in [0..n-1], with provenance"""
    n: int
    kind: TableKind
    values: Tuple[Union[int, float], ...]
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        check_dimension(self.n)
        if len(self.values) != self.n:
            raise DomainError(f"policy needs {self.n} values, got {len(self.values)}")
        if self.kind == TableKind.STRENGTHS:
            for level, k in enumerate(self.values):
                if not 1 <= k <= self.n:
                    raise DomainError(f"strength {k} at level {level} outside [1..{self.n}]")
        else:
            floor = max(self.meta.get('p_min', 0.0), 0.0)
            for level, p in enumerate(self.values):
                if not floor <= p <= 1.0:
                    raise DomainError(f"rate {p} at level {level} outside [{floor}, 1]")

    @property
    def algorithm(self) -> str:
        return self.meta.get('algorithm', 'rls' if self.kind == TableKind.STRENGTHS else 'ea')

    @property
    def family(self) -> LawVariant:
        return ALGORITHM_FAMILIES[self.algorithm]

    def __getitem__(self, level: int):
        return self.values[level]

    def law(self, level: int) -> MutationLaw:
        """Strength law used at `level`"""
        value = self.values[level]
        if self.kind == TableKind.STRENGTHS:
            return MutationLaw.deterministic(self.n, value)
        if self.family == LawVariant.CONDITIONAL_BINOMIAL:
            return MutationLaw.conditional_binomial(self.n, value)
        return MutationLaw.binomial(self.n, value)

    def as_dict(self) -> Dict[int, Union[int, float]]:
        return dict(enumerate(self.values))

    def same_values(self, other: 'PolicyTable') -> bool:
        return (self.n == other.n and self.kind == other.kind
                and all(a == b for a, b in zip(self.values, other.values)))


# ---------------------------------------------------------------------------
# Parameter helpers
# ---------------------------------------------------------------------------

def resolve_family(family: Union[str, LawVariant]) -> LawVariant:
    """Accept a LawVariant or an algorithm name ('ea', 'ea-res')"""
    if isinstance(family, LawVariant):
        resolved = family
    elif family in ALGORITHM_FAMILIES:
        resolved = ALGORITHM_FAMILIES[family]
    else:
        try:
            resolved = LawVariant(family)
        except ValueError:
            raise DomainError(f"unknown rate family {family!r}") from None
    if resolved == LawVariant.DETERMINISTIC:
        raise DomainError("rate tables need the binomial or conditional binomial family")
    return resolved


def parse_rate(text: Union[str, float], n: int) -> float:
    """Rates written as '0', '1/2n', '1/n' or a plain number"""
    if not isinstance(text, str):
        return check_rate(text)
    presets = {'0': 0.0, '1/2n': 1.0 / (2 * n), '1/(2n)': 1.0 / (2 * n), '1/n': 1.0 / n}
    cleaned = text.strip().replace(' ', '')
    if cleaned in presets:
        return presets[cleaned]
    try:
        return check_rate(float(cleaned))
    except ValueError:
        raise DomainError(f"cannot read a rate from {text!r}") from None


def parse_p_min(text: Union[str, float], n: int) -> float:
    p_min = parse_rate(text, n)
    if p_min >= 1.0:
        raise DomainError("p_min must be smaller than 1")
    return p_min


def _pick_index(values: np.ndarray, maximize: bool, tie_break: str,
                rel_tol: float = TIE_BREAK['relative_tol']) -> int:
    """Index of the best finite value; near-ties resolved toward the smallest or largest index"""
    if tie_break not in ('min', 'max'):
        raise DomainError(f"tie_break must be 'min' or 'max', got {tie_break!r}")
    finite = np.isfinite(values)
    if not finite.any():
        raise DomainError("no candidate with a finite value")
    best = values[finite].max() if maximize else values[finite].min()
    close = finite & (np.abs(values - best) <= rel_tol * abs(best))
    candidates = np.flatnonzero(close)
    return int(candidates[0] if tie_break == 'min' else candidates[-1])


def _rate_weights(n: int, family: LawVariant, p: float, tail_epsilon: float) -> WeightVector:
    if family == LawVariant.CONDITIONAL_BINOMIAL:
        return conditional_binomial_weights(n, p, tail_epsilon)
    return binomial_weights(n, p, tail_epsilon)


def _base_meta(algorithm: str, mode: str, p_min: float, tail_epsilon: float, **extra) -> Dict:
    meta = {'algorithm': algorithm, 'mode': mode, 'p_min': p_min, 'tail_epsilon': tail_epsilon}
    meta.update(extra)
    return meta


# ---------------------------------------------------------------------------
# Scalar minimization
# ---------------------------------------------------------------------------

def minimize_scalar(objective: Callable[[float], float], lo: float, hi: float,
                    cfg: Optional[OptimizerConfig] = None, seeds: Iterable[float] = (),
                    level: Optional[int] = None) -> Tuple[float, float]:
    """
    Minimize a scalar function on [lo, hi].

    Evaluates a grid of cfg.grid_points points (log-spaced when lo > 0) plus
    any seeds, then refines inside the bracket around the best grid point with
    scipy's bounded Brent method (golden section with parabolic steps). The
    best point ever evaluated is returned.
    """
    cfg = cfg or OptimizerConfig()
    if not lo < hi:
        raise DomainError(f"empty search interval [{lo}, {hi}]")

    if lo > 0:
        grid = np.geomspace(lo, hi, cfg.grid_points)
    else:
        grid = np.linspace(lo, hi, cfg.grid_points)
    extra = [s for s in seeds if lo <= s <= hi]
    points = np.unique(np.concatenate([grid, np.asarray(extra, dtype=float), [lo, hi]]))

    def safe(x: float) -> float:
        value = objective(float(x))
        return value if np.isfinite(value) else np.inf

    values = np.array([safe(x) for x in points])
    best = int(np.argmin(values))
    best_x, best_value = float(points[best]), float(values[best])

    left = float(points[max(best - 1, 0)])
    right = float(points[min(best + 1, len(points) - 1)])
    if right - left > cfg.refine_tolerance:
        result = optimize.minimize_scalar(safe, bounds=(left, right), method='bounded',
                                          options={'xatol': cfg.refine_tolerance,
                                                   'maxiter': cfg.max_iterations})
        if not result.success:
            raise ConvergenceError(f"bounded refinement did not converge: {result.message}", level=level)
        if result.fun < best_value:
            best_x, best_value = float(result.x), float(result.fun)

    return best_x, best_value


# ---------------------------------------------------------------------------
# Per-level profiles
# ---------------------------------------------------------------------------

class LevelProfile:
    """Per-strength drift, improvement probability and remaining-time numerator of one level"""

    def __init__(self, n: int, level: int, later_times: Optional[np.ndarray] = None):
        self.n = n
        self.level = level
        matrix = level_transition_matrix(n, level)
        improving = matrix[:, level + 1:]
        self.drift = improving @ improvement_gains(n, level)[level + 1:]
        self.improve = improving.sum(axis=1)
        self.spend = None
        if later_times is not None:
            self.spend = matrix[:, level + 1:n] @ later_times[level + 1:n]

    def strength_times(self) -> np.ndarray:
        """Self-loop-resolved remaining time for every k in [0..n] (inf where no progress)"""
        with np.errstate(divide='ignore', invalid='ignore'):
            times = (1.0 + self.spend) / self.improve
        times[self.improve < MIN_IMPROVEMENT] = np.inf
        times[0] = np.inf
        return times

    def mixture_drift(self, w: WeightVector) -> float:
        ks = w.strengths()
        return float(w.weights @ self.drift[ks]) / w.total

    def mixture_time(self, w: WeightVector) -> float:
        ks = w.strengths()
        improve = float(w.weights @ self.improve[ks])
        if improve < MIN_IMPROVEMENT:
            return np.inf
        return (w.total + float(w.weights @ self.spend[ks])) / improve


def _best_strength(profile: LevelProfile, objective: Objective, tie_break: str) -> int:
    if objective == Objective.MAXIMIZE_DRIFT:
        drift = profile.drift.copy()
        drift[0] = -np.inf
        return _pick_index(drift, maximize=True, tie_break=tie_break)
    return _pick_index(profile.strength_times(), maximize=False, tie_break=tie_break)


def _best_rate(profile: LevelProfile, family: LawVariant, p_min: float, cfg: OptimizerConfig,
               tail_epsilon: float) -> float:
    """Rate optimizing cfg.objective at one level, endpoint p = 0 included for Bin>0 with p_min = 0"""
    n, level = profile.n, profile.level
    maximize = cfg.objective == Objective.MAXIMIZE_DRIFT

    def score(p: float) -> float:
        w = _rate_weights(n, family, p, tail_epsilon)
        if maximize:
            return -profile.mixture_drift(w)
        return profile.mixture_time(w)

    if family == LawVariant.CONDITIONAL_BINOMIAL:
        lo = max(p_min, OPTIMIZER_DEFAULTS['min_rate'])
    else:
        lo = OPTIMIZER_DEFAULTS['min_rate']

    # Seed the grid at the best strengths divided by n
    seeds = [_best_strength(profile, Objective.MAXIMIZE_DRIFT, 'min') / n]
    if profile.spend is not None:
        seeds.append(_best_strength(profile, Objective.MINIMIZE_REMAINING_TIME, 'min') / n)

    if lo >= 1.0:
        best_p, best_value = 1.0, score(1.0)
    else:
        best_p, best_value = minimize_scalar(score, lo, 1.0, cfg, seeds=seeds, level=level)

    if family == LawVariant.CONDITIONAL_BINOMIAL and p_min == 0.0:
        endpoint = score(0.0)
        if endpoint <= best_value:
            best_p = 0.0
    return best_p


# ---------------------------------------------------------------------------
# Strength tables (RLS)
# ---------------------------------------------------------------------------

def k_drift_table(n: int, tie_break: str = TIE_BREAK['default'], show_progress: bool = False) -> PolicyTable:
    """Drift-maximizing strength per level, near-ties broken toward the smallest (or largest) k"""
    n = check_dimension(n)
    values = []
    for level in tqdm(range(n), desc=f"k_drift n={n}", disable=not show_progress):
        profile = LevelProfile(n, level)
        values.append(_best_strength(profile, Objective.MAXIMIZE_DRIFT, tie_break))

    meta = _base_meta('rls', 'drift', 0.0, 0.0, tie_break=tie_break)
    logger.info(f"✅ k_drift table computed for n={n}")
    return PolicyTable(n, TableKind.STRENGTHS, tuple(values), meta)


def k_opt_table(n: int, tie_break: str = TIE_BREAK['default'],
                show_progress: bool = False) -> Tuple[PolicyTable, RemainingTimeTable]:
    """
    Time-minimizing strength per level and the resulting remaining times.

    Levels are fixed from n-1 down to 0; each level picks the k with the
    smallest self-loop-resolved remaining time given the optimal times of the
    levels above it.
    """
    n = check_dimension(n)
    values = [0] * n
    times = np.zeros(n + 1)

    for level in tqdm(range(n - 1, -1, -1), desc=f"k_opt n={n}", disable=not show_progress):
        profile = LevelProfile(n, level, later_times=times)
        k = _best_strength(profile, Objective.MINIMIZE_REMAINING_TIME, tie_break)
        values[level] = k
        times[level] = resolved_level_time(hypergeometric_transition(n, level, k), times)

    meta = _base_meta('rls', 'opt', 0.0, 0.0, tie_break=tie_break)
    logger.info(f"✅ k_opt table computed for n={n}")
    return (PolicyTable(n, TableKind.STRENGTHS, tuple(values), meta),
            RemainingTimeTable(n, times, dict(meta)))


def static_strength_table(n: int, k: int = 1) -> PolicyTable:
    """Classic RLS flipping the same number of bits at every level"""
    n = check_dimension(n)
    meta = _base_meta('rls', 'static', 0.0, 0.0, static_value=int(k))
    return PolicyTable(n, TableKind.STRENGTHS, tuple([int(k)] * n), meta)


# ---------------------------------------------------------------------------
# Rate tables ((1+1) EA and (1+1) EA>0)
# ---------------------------------------------------------------------------

def _prepare_rate_search(n: int, family, p_min: float, cfg: Optional[OptimizerConfig],
                         tail_epsilon: float, objective: Objective):
    n = check_dimension(n)
    family = resolve_family(family)
    tail_epsilon = check_tail_epsilon(tail_epsilon)
    p_min = check_rate(p_min)
    if p_min >= 1.0:
        raise DomainError("p_min must be smaller than 1")
    if family == LawVariant.BINOMIAL:
        p_min = 0.0
    cfg = (cfg or OptimizerConfig()).with_objective(objective)
    return n, family, p_min, cfg, tail_epsilon


def p_drift_table(n: int, family='ea', p_min: float = 0.0, cfg: Optional[OptimizerConfig] = None,
                  tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon'],
                  show_progress: bool = False) -> PolicyTable:
    """Drift-maximizing rate per level (p_min only restricts the conditional family)"""
    n, family, p_min, cfg, tail_epsilon = _prepare_rate_search(
        n, family, p_min, cfg, tail_epsilon, Objective.MAXIMIZE_DRIFT)

    values = []
    for level in tqdm(range(n), desc=f"p_drift n={n}", disable=not show_progress):
        profile = LevelProfile(n, level)
        values.append(_best_rate(profile, family, p_min, cfg, tail_epsilon))

    meta = _base_meta(FAMILY_ALGORITHMS[family], 'drift', p_min, tail_epsilon, **cfg.as_dict())
    logger.info(f"✅ p_drift table computed for n={n} ({family.value}, p_min={p_min:g})")
    return PolicyTable(n, TableKind.RATES, tuple(values), meta)


def p_opt_table(n: int, family='ea', p_min: float = 0.0, cfg: Optional[OptimizerConfig] = None,
                tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon'],
                show_progress: bool = False) -> Tuple[PolicyTable, RemainingTimeTable]:
    """Time-minimizing rate per level, computed backward from level n-1, with its remaining times"""
    n, family, p_min, cfg, tail_epsilon = _prepare_rate_search(
        n, family, p_min, cfg, tail_epsilon, Objective.MINIMIZE_REMAINING_TIME)

    values = [0.0] * n
    times = np.zeros(n + 1)
    for level in tqdm(range(n - 1, -1, -1), desc=f"p_opt n={n}", disable=not show_progress):
        profile = LevelProfile(n, level, later_times=times)
        p = _best_rate(profile, family, p_min, cfg, tail_epsilon)
        values[level] = p
        law = (MutationLaw.conditional_binomial(n, p) if family == LawVariant.CONDITIONAL_BINOMIAL
               else MutationLaw.binomial(n, p))
        times[level] = resolved_level_time(law_transition(law, level, tail_epsilon), times)

    meta = _base_meta(FAMILY_ALGORITHMS[family], 'opt', p_min, tail_epsilon, **cfg.as_dict())
    logger.info(f"✅ p_opt table computed for n={n} ({family.value}, p_min={p_min:g})")
    return (PolicyTable(n, TableKind.RATES, tuple(values), meta),
            RemainingTimeTable(n, times, dict(meta)))


def back_table(n: int, cfg: Optional[OptimizerConfig] = None,
               tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon'],
               show_progress: bool = False) -> PolicyTable:
    """
    Bäck's fitness-dependent rate: p(l) = 1/(2l + 2 - n) for l >= n/2,
    and the drift-maximizing (1+1) EA rate below n/2.
    """
    n = check_dimension(n)
    if n < 2:
        raise DomainError("Bäck's rule needs n >= 2")
    n, family, _, cfg, tail_epsilon = _prepare_rate_search(
        n, 'ea', 0.0, cfg, tail_epsilon, Objective.MAXIMIZE_DRIFT)

    values = []
    for level in tqdm(range(n), desc=f"back n={n}", disable=not show_progress):
        if 2 * level >= n:
            values.append(1.0 / (2 * level + 2 - n))
        else:
            values.append(_best_rate(LevelProfile(n, level), family, 0.0, cfg, tail_epsilon))

    meta = _base_meta('ea', 'back', 0.0, tail_epsilon, **cfg.as_dict())
    return PolicyTable(n, TableKind.RATES, tuple(values), meta)


def static_rate_table(n: int, family='ea', p: float = None, p_min: float = 0.0,
                      tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon']) -> PolicyTable:
    """Same rate at every level; p defaults to 1/n"""
    n = check_dimension(n)
    family = resolve_family(family)
    p = check_rate(1.0 / n if p is None else p)
    meta = _base_meta(FAMILY_ALGORITHMS[family], 'static', p_min, tail_epsilon, static_value=p)
    return PolicyTable(n, TableKind.RATES, tuple([p] * n), meta)


def static_opt_rate(n: int, family='ea', p_min: float = 0.0, cfg: Optional[OptimizerConfig] = None,
                    tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon']) -> Tuple[float, float]:
    """
    Best single rate used at every level, with its total expected time.

    The search covers [1/(8n), 8/n] (raised to p_min for the conditional
    family); for Bin>0 with p_min = 0 the flip-1 endpoint p = 0 competes too.
    """
    n, family, p_min, cfg, tail_epsilon = _prepare_rate_search(
        n, family, p_min, cfg, tail_epsilon, Objective.MINIMIZE_REMAINING_TIME)

    def total(p: float) -> float:
        table = static_rate_table(n, family, p, p_min, tail_epsilon)
        return total_expected_time(remaining_times(n, table, tail_epsilon=tail_epsilon))

    lo = max(p_min, 1.0 / (8 * n), OPTIMIZER_DEFAULTS['min_rate'])
    hi = min(1.0, 8.0 / n)
    if lo >= hi:
        hi = 1.0

    if lo >= hi:
        best_p, best_total = 1.0, total(1.0)
    else:
        best_p, best_total = minimize_scalar(total, lo, hi, cfg, seeds=[1.0 / n])

    if family == LawVariant.CONDITIONAL_BINOMIAL and p_min == 0.0:
        endpoint = total(0.0)
        if endpoint <= best_total:
            best_p, best_total = 0.0, endpoint

    logger.info(f"✅ optimal static rate for n={n} ({family.value}): p={best_p:.6g}, E[T]={best_total:.4f}")
    return best_p, best_total
