"""
Settings Module
Default parameters and environment overrides
"""

import os
from pathlib import Path

# Kernel defaults
KERNEL_DEFAULTS = {
    'tail_epsilon': 1e-15,        # omitted binomial mass per weight vector
    'normalization_tol': 1e-12,   # distributions must sum to 1 within this
}

# Rate optimizer defaults
OPTIMIZER_DEFAULTS = {
    'grid_points': 64,            # log-spaced seed grid over the rate interval
    'refine_tolerance': 1e-10,    # absolute tolerance on p
    'max_iterations': 500,        # bounded refinement cap
    'min_rate': 1e-12,            # smallest rate tried when p_min = 0
}

# Tie-breaking for strength tables ('min' or 'max')
TIE_BREAK = {
    'default': 'min',
    'relative_tol': 1e-12,
}

# Monte Carlo defaults
SIMULATION_DEFAULTS = {
    'runs': 500,
    'master_seed': 0,
    'budget_factor': 100,         # budget cap = factor * n * ln(n)
    'workers': 4,
}

# Oracle size limits
ORACLE_LIMITS = {
    'transition': 20,
    'remaining_times': 16,
    'exhaustive': 6,
    'full_state': 10,
}

CACHE_ENV_VAR = "ONEMAX_CACHE_DIR"
CACHE_SCHEMA_VERSION = 1


def default_cache_dir() -> Path:
    """Cache directory: $ONEMAX_CACHE_DIR if set, else ./cache"""
    return Path(os.environ.get(CACHE_ENV_VAR) or "cache")
