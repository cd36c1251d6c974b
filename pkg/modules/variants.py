"""
Variants Module
Named algorithm variants (one per runtime-table row) and the policy builder behind them
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

from .errors import DomainError
from .kernel import check_dimension
from .policy import (OptimizerConfig, PolicyTable, back_table, k_drift_table, k_opt_table, p_drift_table,
                     p_opt_table, parse_p_min, parse_rate, static_opt_rate, static_rate_table,
                     static_strength_table)
from .runtime import RemainingTimeTable, remaining_times
from .settings import KERNEL_DEFAULTS, TIE_BREAK

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

ALGORITHMS = ('rls', 'ea', 'ea-res')

# Modes each algorithm supports
ALGORITHM_MODES = {
    'rls': ('drift', 'opt', 'static'),
    'ea': ('drift', 'opt', 'static', 'back'),
    'ea-res': ('drift', 'opt', 'static'),
}


@dataclass(frozen=True)
class Variant:
    """One row of the runtime table"""
    name: str
    algorithm: str
    mode: str
    label: str
    p_min: str = '0'
    static: Optional[Union[int, str]] = None
    decimals: int = 0


VARIANTS: Dict[str, Variant] = {v.name: v for v in [
    Variant('rls-opt', 'rls', 'opt', 'RLS_opt', decimals=1),
    Variant('rls-drift', 'rls', 'drift', 'RLS_drift', decimals=1),
    Variant('rls-static', 'rls', 'static', 'RLS', static=1),
    Variant('ea-res-opt', 'ea-res', 'opt', 'EA>0_opt'),
    Variant('ea-res-opt-pmin-1/2n', 'ea-res', 'opt', 'EA>0_opt,p_min=1/(2n)', p_min='1/2n'),
    Variant('ea-res-opt-pmin-1/n', 'ea-res', 'opt', 'EA>0_opt,p_min=1/n', p_min='1/n'),
    Variant('ea-res-drift', 'ea-res', 'drift', 'EA>0_drift'),
    Variant('ea-res-drift-pmin-1/2n', 'ea-res', 'drift', 'EA>0_drift,p_min=1/(2n)', p_min='1/2n'),
    Variant('ea-res-drift-pmin-1/n', 'ea-res', 'drift', 'EA>0_drift,p_min=1/n', p_min='1/n'),
    Variant('ea-res-static-1/2n', 'ea-res', 'static', 'EA>0_static,p=1/(2n)', static='1/2n'),
    Variant('ea-res-static-1/n', 'ea-res', 'static', 'EA>0_static,p=1/n', static='1/n'),
    Variant('ea-opt', 'ea', 'opt', 'EA_opt'),
    Variant('ea-drift', 'ea', 'drift', 'EA_drift'),
    Variant('ea-back', 'ea', 'back', 'EA_Back'),
    Variant('ea-static-opt', 'ea', 'static', 'EA_static,p=opt', static='opt'),
    Variant('ea-static-1/n', 'ea', 'static', 'EA_static,p=1/n', static='1/n'),
]}


def get_variant(name: str) -> Variant:
    try:
        return VARIANTS[name]
    except KeyError:
        raise DomainError(f"unknown variant {name!r}; choose from {', '.join(VARIANTS)}") from None


def check_selection(algorithm: str, mode: str, p_min: Optional[str] = None,
                    static: Optional[Union[int, str]] = None):
    """Reject combinations no builder supports"""
    if algorithm not in ALGORITHM_MODES:
        raise DomainError(f"unknown algorithm {algorithm!r}")
    if mode not in ALGORITHM_MODES[algorithm]:
        raise DomainError(f"mode {mode!r} is not available for {algorithm}")
    if p_min not in (None, '0') and algorithm != 'ea-res':
        raise DomainError("p_min only applies to the resampling EA (ea-res)")
    if static is not None and mode != 'static':
        raise DomainError("a static value needs mode 'static'")


def compute_policy(algorithm: str, mode: str, n: int, p_min: Union[str, float] = '0',
                   static: Optional[Union[int, str]] = None, cfg: Optional[OptimizerConfig] = None,
                   tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon'],
                   tie_break: str = TIE_BREAK['default'],
                   show_progress: bool = False) -> Tuple[PolicyTable, RemainingTimeTable]:
    """Build the policy of one (algorithm, mode) selection and its remaining-time table"""
    n = check_dimension(n)
    p_min_value = parse_p_min(p_min, n)
    cfg = cfg or OptimizerConfig()

    if algorithm == 'rls':
        if mode == 'opt':
            return k_opt_table(n, tie_break, show_progress)
        if mode == 'drift':
            table = k_drift_table(n, tie_break, show_progress)
        else:
            table = static_strength_table(n, int(static or 1))
        return table, remaining_times(n, table, show_progress=show_progress)

    if mode == 'opt':
        return p_opt_table(n, algorithm, p_min_value, cfg, tail_epsilon, show_progress)
    if mode == 'drift':
        table = p_drift_table(n, algorithm, p_min_value, cfg, tail_epsilon, show_progress)
    elif mode == 'back':
        table = back_table(n, cfg, tail_epsilon, show_progress)
    else:
        static = static or '1/n'
        if static == 'opt':
            p, _ = static_opt_rate(n, algorithm, p_min_value, cfg, tail_epsilon)
        else:
            p = parse_rate(static, n)
        table = static_rate_table(n, algorithm, p, p_min_value, tail_epsilon)
        table.meta['static_label'] = str(static)
    return table, remaining_times(n, table, tail_epsilon=tail_epsilon, show_progress=show_progress)


def compute_variant(name: str, n: int, cfg: Optional[OptimizerConfig] = None,
                    tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon'],
                    tie_break: str = TIE_BREAK['default'],
                    show_progress: bool = False) -> Tuple[PolicyTable, RemainingTimeTable]:
    variant = get_variant(name)
    logger.info(f"🔄 Computing {variant.label} for n={n}")
    return compute_policy(variant.algorithm, variant.mode, n, variant.p_min, variant.static,
                          cfg, tail_epsilon, tie_break, show_progress)
