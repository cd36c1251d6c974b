"""
Kernel Module
Transition kernels and drift of k-bit flips and binomial mixtures on OneMax fitness levels
"""

import math
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from numbers import Integral, Real
from typing import Dict, Iterable, Optional

import numpy as np
from scipy.special import gammaln

from .errors import DomainError
from .settings import KERNEL_DEFAULTS

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

def check_dimension(n) -> int:
    """Validate a problem dimension"""
    if isinstance(n, bool) or not isinstance(n, Integral) or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def check_level(n: int, level) -> int:
    """Validate a fitness level against dimension n"""
    if isinstance(level, bool) or not isinstance(level, Integral) or not 0 <= level <= n:
        raise DomainError(f"fitness level must lie in [0..{n}], got {level!r}")
    return int(level)


def check_strength(n: int, k, allow_zero: bool = True) -> int:
    """Validate a mutation strength"""
    lowest = 0 if allow_zero else 1
    if isinstance(k, bool) or not isinstance(k, Integral) or not lowest <= k <= n:
        raise DomainError(f"mutation strength must lie in [{lowest}..{n}], got {k!r}")
    return int(k)


def check_rate(p) -> float:
    """Validate a mutation rate"""
    if not isinstance(p, Real) or not 0.0 <= float(p) <= 1.0:
        raise DomainError(f"mutation rate must lie in [0, 1], got {p!r}")
    return float(p)


def check_tail_epsilon(tail_epsilon) -> float:
    if not isinstance(tail_epsilon, Real) or not 0.0 <= float(tail_epsilon) <= 1e-9:
        raise DomainError(f"tail_epsilon must lie in [0, 1e-9], got {tail_epsilon!r}")
    return float(tail_epsilon)


@dataclass(frozen=True)
class FitnessLevel:
    """OneMax value of a search point in dimension n"""
    value: int
    n: int

    def __post_init__(self):
        check_dimension(self.n)
        check_level(self.n, self.value)


class LawVariant(str, Enum):
    DETERMINISTIC = "deterministic"
    BINOMIAL = "binomial"
    CONDITIONAL_BINOMIAL = "conditional_binomial"


@dataclass(frozen=True)
class MutationLaw:
    """
    Distribution of the mutation strength.

    Deterministic(k) always flips k bits, Binomial(p) samples k ~ Bin(n, p),
    ConditionalBinomial(p) samples k ~ Bin>0(n, p). ConditionalBinomial with
    p = 0 is the flip-1 operator.
    """
    variant: LawVariant
    n: int
    k: Optional[int] = None
    p: Optional[float] = None

    def __post_init__(self):
        check_dimension(self.n)
        if self.variant == LawVariant.DETERMINISTIC:
            check_strength(self.n, self.k)
        else:
            check_rate(self.p)

    @classmethod
    def deterministic(cls, n: int, k: int) -> 'MutationLaw':
        return cls(LawVariant.DETERMINISTIC, n, k=int(k))

    @classmethod
    def binomial(cls, n: int, p: float) -> 'MutationLaw':
        return cls(LawVariant.BINOMIAL, n, p=float(p))

    @classmethod
    def conditional_binomial(cls, n: int, p: float) -> 'MutationLaw':
        return cls(LawVariant.CONDITIONAL_BINOMIAL, n, p=float(p))


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Probabilities of flipping exactly k bits for k in [start, start + len(weights))"""
    n: int
    start: int
    weights: np.ndarray
    tail_epsilon: float = 0.0

    @property
    def stop(self) -> int:
        return self.start + len(self.weights)

    @property
    def total(self) -> float:
        return math.fsum(self.weights)

    def __getitem__(self, k: int) -> float:
        if self.start <= k < self.stop:
            return float(self.weights[k - self.start])
        return 0.0

    def strengths(self) -> np.ndarray:
        return np.arange(self.start, self.stop)

    def dense(self) -> np.ndarray:
        """Weights as a length n+1 array indexed by k"""
        out = np.zeros(self.n + 1)
        out[self.start:self.stop] = self.weights
        return out

    def as_dict(self) -> Dict[int, float]:
        return {int(k): float(w) for k, w in zip(self.strengths(), self.weights) if w > 0.0}


@dataclass(frozen=True, eq=False)
class TransitionDistribution:
    """Probability mass over offspring fitness values for one parent level"""
    parent: FitnessLevel
    mass: np.ndarray

    @property
    def n(self) -> int:
        return self.parent.n

    def __getitem__(self, fitness: int) -> float:
        if 0 <= fitness <= self.n:
            return float(self.mass[fitness])
        return 0.0

    def as_dict(self) -> Dict[int, float]:
        return {int(i): float(m) for i, m in enumerate(self.mass) if m > 0.0}


# ---------------------------------------------------------------------------
# Combinatorics
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def log_factorials(n: int) -> np.ndarray:
    """ln(j!) for j in [0..n]"""
    table = gammaln(np.arange(n + 1, dtype=float) + 1.0)
    table.setflags(write=False)
    return table


def _log_comb(lf: np.ndarray, a, b):
    return lf[a] - lf[b] - lf[a - b]


def transition_rows(n: int, level: int, strengths: Iterable[int]) -> np.ndarray:
    """
    Offspring-fitness distributions of several strengths at once.

    Row r holds Pr[OM(y) = j] for y <- flip_k(x), OM(x) = level, k = strengths[r].
    Flipping i zero-bits and k-i one-bits moves the parent to level + 2i - k,
    with probability C(n-level, i) C(level, k-i) / C(n, k). Everything is
    evaluated in log space and each row is renormalized.
    """
    ks = np.asarray(list(strengths) if not isinstance(strengths, np.ndarray) else strengths, dtype=np.int64)
    rows = np.zeros((len(ks), n + 1))
    if len(ks) == 0:
        return rows

    lf = log_factorials(n)
    zeros = n - level
    k = ks[:, None]
    i = np.arange(zeros + 1, dtype=np.int64)[None, :]
    valid = (i <= k) & (k - i <= level)

    # Clip indices so masked-out cells stay finite before being discarded
    ones_hit = np.clip(k - i, 0, level)
    zeros_hit = np.broadcast_to(i, valid.shape)
    logp = (_log_comb(lf, zeros, zeros_hit)
            + _log_comb(lf, level, ones_hit)
            - _log_comb(lf, n, k))
    logp = np.where(valid, logp, -np.inf)
    logp -= logp.max(axis=1, keepdims=True)

    probs = np.exp(logp)
    probs /= probs.sum(axis=1, keepdims=True)

    r_idx, i_idx = np.nonzero(valid)
    offspring = level + 2 * i_idx - ks[r_idx]
    rows[r_idx, offspring] = probs[r_idx, i_idx]
    return rows


def level_transition_matrix(n: int, level: int) -> np.ndarray:
    """Matrix whose row k is hypergeometric_transition(n, level, k), for k in [0..n]"""
    n = check_dimension(n)
    level = check_level(n, level)
    return transition_rows(n, level, np.arange(n + 1))


def improvement_gains(n: int, level: int) -> np.ndarray:
    """max(j - level, 0) for every offspring fitness j"""
    return np.maximum(np.arange(n + 1) - level, 0).astype(float)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def hypergeometric_transition(n: int, level: int, k: int) -> TransitionDistribution:
    """Offspring fitness distribution of flip_k applied to a parent of fitness `level`"""
    n = check_dimension(n)
    level = check_level(n, level)
    k = check_strength(n, k)

    row = transition_rows(n, level, [k])[0]
    row /= math.fsum(row)
    return TransitionDistribution(FitnessLevel(level, n), row)


def drift_fixed_k(n: int, level: int, k: int) -> float:
    """Expected fitness gain E[max(OM(y) - OM(x), 0)] of flip_k"""
    n = check_dimension(n)
    level = check_level(n, level)
    k = check_strength(n, k, allow_zero=False)

    dist = hypergeometric_transition(n, level, k)
    gains = improvement_gains(n, level)
    return math.fsum(dist.mass * gains)


def _truncate(n: int, start: int, weights: np.ndarray, tail_epsilon: float) -> WeightVector:
    """Drop the two tails of a unimodal weight vector, each holding at most tail_epsilon / 2"""
    if tail_epsilon == 0.0 or len(weights) <= 1:
        return WeightVector(n, start, weights, tail_epsilon)

    half = tail_epsilon / 2.0
    left = int(np.searchsorted(np.cumsum(weights), half, side='right'))
    right = int(np.searchsorted(np.cumsum(weights[::-1]), half, side='right'))
    stop = len(weights) - right
    if left >= stop:
        # Everything fits in the tails only for degenerate inputs; keep the mode
        mode = int(np.argmax(weights))
        left, stop = mode, mode + 1
    return WeightVector(n, start + left, weights[left:stop].copy(), tail_epsilon)


def binomial_weights(n: int, p: float, tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon']) -> WeightVector:
    """Bin(n, p) strength weights, tails below tail_epsilon omitted"""
    n = check_dimension(n)
    p = check_rate(p)
    tail_epsilon = check_tail_epsilon(tail_epsilon)

    if p == 0.0:
        return WeightVector(n, 0, np.ones(1), tail_epsilon)
    if p == 1.0:
        return WeightVector(n, n, np.ones(1), tail_epsilon)

    lf = log_factorials(n)
    k = np.arange(n + 1)
    logw = _log_comb(lf, n, k) + k * math.log(p) + (n - k) * math.log1p(-p)
    return _truncate(n, 0, np.exp(logw), tail_epsilon)


def conditional_binomial_weights(n: int, p: float,
                                 tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon']) -> WeightVector:
    """Bin>0(n, p) strength weights; p = 0 is the flip-1 convention"""
    n = check_dimension(n)
    p = check_rate(p)
    tail_epsilon = check_tail_epsilon(tail_epsilon)

    if p == 0.0:
        return WeightVector(n, 1, np.ones(1), tail_epsilon)
    if p == 1.0:
        return WeightVector(n, n, np.ones(1), tail_epsilon)

    lf = log_factorials(n)
    k = np.arange(1, n + 1)
    # 1 - (1-p)^n without cancellation for small p
    log_norm = math.log(-math.expm1(n * math.log1p(-p)))
    logw = _log_comb(lf, n, k) + k * math.log(p) + (n - k) * math.log1p(-p) - log_norm
    return _truncate(n, 1, np.exp(logw), tail_epsilon)


def law_weights(law: MutationLaw, tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon']) -> WeightVector:
    """Strength weights of any mutation law"""
    if law.variant == LawVariant.DETERMINISTIC:
        return WeightVector(law.n, law.k, np.ones(1), tail_epsilon)
    if law.variant == LawVariant.BINOMIAL:
        return binomial_weights(law.n, law.p, tail_epsilon)
    return conditional_binomial_weights(law.n, law.p, tail_epsilon)


def mixed_transition(n: int, level: int, w: WeightVector) -> TransitionDistribution:
    """Offspring fitness distribution when the strength is drawn from w"""
    n = check_dimension(n)
    level = check_level(n, level)
    if w.n != n:
        raise DomainError(f"weight vector built for n={w.n}, not n={n}")

    rows = transition_rows(n, level, w.strengths())
    mass = w.weights @ rows
    mass /= w.total
    return TransitionDistribution(FitnessLevel(level, n), mass)


def drift_mixture(n: int, level: int, w: WeightVector) -> float:
    """Expected fitness gain when the strength is drawn from w"""
    dist = mixed_transition(n, level, w)
    return math.fsum(dist.mass * improvement_gains(n, level))


def improvement_probability(d: TransitionDistribution) -> float:
    """Probability of a strictly better offspring"""
    return min(1.0, math.fsum(d.mass[d.parent.value + 1:]))


def law_transition(law: MutationLaw, level: int,
                   tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon']) -> TransitionDistribution:
    """Offspring fitness distribution of one iteration under `law`"""
    if law.variant == LawVariant.DETERMINISTIC:
        return hypergeometric_transition(law.n, level, law.k)
    return mixed_transition(law.n, level, law_weights(law, tail_epsilon))
