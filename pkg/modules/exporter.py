"""
Exporter Module
CSV and JSON writers for policies, runtime tables and simulation statistics
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from .policy import PolicyTable
from .runtime import RemainingTimeTable, remaining_time_gradient
from .simulate import AggregateStats, RunRecord

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# 17 significant digits parse back to the same double
FLOAT_FORMAT = '%.17g'

RUNTIME_COLUMNS = ['algorithm', 'mode', 'p_min', 'n', 'expected_time', 'normalized_time']

PathLike = Union[str, Path]


def _write_csv(df: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n', encoding='utf-8', na_rep='')
    logger.info(f"📄 Wrote {path}")
    return path


def write_policy_csv(policy: PolicyTable, path: PathLike) -> Path:
    """level,value rows"""
    df = pd.DataFrame({'level': np.arange(policy.n), 'value': list(policy.values)})
    return _write_csv(df, path)


def write_metadata_json(policy: PolicyTable, path: PathLike, extra: Dict = None) -> Path:
    """Sidecar with the policy provenance"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {'n': policy.n, 'kind': policy.kind.value, **policy.meta}
    if extra:
        data.update(extra)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(data, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write('\n')
    return path


def write_runtime_csv(rows: List[Dict], path: PathLike) -> Path:
    """algorithm,mode,p_min,n,expected_time,normalized_time rows"""
    return _write_csv(pd.DataFrame(rows, columns=RUNTIME_COLUMNS), path)


def write_level_times_csv(times: RemainingTimeTable, path: PathLike, gradient: bool = False) -> Path:
    """level,remaining_time[,gradient]; level 0 has no gradient"""
    df = pd.DataFrame({'level': np.arange(times.n + 1), 'remaining_time': times.times})
    if gradient:
        grad = remaining_time_gradient(times)
        df['gradient'] = [grad.get(level, np.nan) for level in range(times.n + 1)]
    return _write_csv(df, path)


def write_stats_csv(stats: AggregateStats, path: PathLike) -> Path:
    """point,mean,std,count[,censored]"""
    columns = ['point', 'mean', 'std', 'count'] + (['censored'] if stats.censored is not None else [])
    return _write_csv(pd.DataFrame(stats.as_rows(), columns=columns), path)


def write_raw_runs_csv(records: Sequence[RunRecord], path: PathLike) -> Path:
    """run,seed,evals,fitness event rows"""
    rows = [row for i, record in enumerate(records) for row in record.as_rows(i)]
    df = pd.DataFrame(rows, columns=['run', 'seed', 'evals', 'fitness'])
    df['seed'] = df['seed'].astype(str)
    return _write_csv(df, path)


def write_table_csv(values: Dict[str, Dict[int, float]], dims: Sequence[int], path: PathLike) -> Path:
    """Wide runtime table: one row per variant, one column per dimension, blank where missing"""
    rows = [{'variant': name, **{str(n): per_dim.get(n, np.nan) for n in dims}}
            for name, per_dim in values.items()]
    df = pd.DataFrame(rows, columns=['variant'] + [str(n) for n in dims])
    return _write_csv(df, path)


def read_csv(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, float_precision='round_trip')
