"""
Cache Module
On-disk cache of computed policy and remaining-time tables
"""

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from .errors import CacheError
from .policy import OptimizerConfig, PolicyTable, TableKind
from .runtime import RemainingTimeTable
from .settings import CACHE_SCHEMA_VERSION, KERNEL_DEFAULTS, TIE_BREAK, default_cache_dir

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(',', ':'))


def _digest(obj) -> str:
    return hashlib.sha256(_canonical(obj).encode('utf-8')).hexdigest()


def cache_parameters(algorithm: str, mode: str, n: int, p_min: float = 0.0,
                     static: Optional[Union[int, str]] = None,
                     tail_epsilon: float = KERNEL_DEFAULTS['tail_epsilon'],
                     tie_break: str = TIE_BREAK['default'],
                     cfg: Optional[OptimizerConfig] = None) -> Dict:
    """Every parameter that changes the cached result"""
    cfg = cfg or OptimizerConfig()
    return {
        'schema_version': CACHE_SCHEMA_VERSION,
        'algorithm': algorithm,
        'mode': mode,
        'n': int(n),
        'p_min': float(p_min),
        'static': None if static is None else str(static),
        'tail_epsilon': float(tail_epsilon),
        'tie_break': tie_break,
        'tolerances': cfg.as_dict(),
    }


@dataclass
class CacheEntry:
    """Cached policy and remaining times with the parameters that produced them"""
    parameters: Dict
    policy: PolicyTable
    times: RemainingTimeTable
    checksum: str = ''

    @property
    def schema_version(self) -> int:
        return self.parameters['schema_version']

    def payload(self) -> Dict:
        return {
            'kind': self.policy.kind.value,
            'values': [v if isinstance(v, int) else float(v) for v in self.policy.values],
            'meta': self.policy.meta,
            'times': [float(t) for t in self.times.times],
        }

    def to_json(self) -> Dict:
        payload = self.payload()
        return {'parameters': self.parameters, 'payload': payload, 'checksum': _digest(payload)}

    @classmethod
    def from_json(cls, data: Dict) -> 'CacheEntry':
        try:
            parameters, payload, checksum = data['parameters'], data['payload'], data['checksum']
        except (KeyError, TypeError):
            raise CacheError("cache entry is missing fields") from None
        if parameters.get('schema_version') != CACHE_SCHEMA_VERSION:
            raise CacheError(f"cache entry has schema version {parameters.get('schema_version')}, "
                             f"expected {CACHE_SCHEMA_VERSION}")
        if _digest(payload) != checksum:
            raise CacheError("cache entry checksum mismatch")

        n = parameters['n']
        kind = TableKind(payload['kind'])
        values = tuple(int(v) for v in payload['values']) if kind == TableKind.STRENGTHS \
            else tuple(float(v) for v in payload['values'])
        policy = PolicyTable(n, kind, values, dict(payload['meta']))
        times = RemainingTimeTable(n, np.array(payload['times'], dtype=float), dict(payload['meta']))
        return cls(parameters, policy, times, checksum)


class ResultCache:
    """Directory of JSON entries keyed by a hash of all numeric parameters"""

    def __init__(self, cache_dir: Optional[Union[str, Path]] = None):
        self.cache_dir = Path(cache_dir) if cache_dir else default_cache_dir()

    def path_for(self, parameters: Dict) -> Path:
        name = f"{parameters['algorithm']}_{parameters['mode']}_n{parameters['n']}_{_digest(parameters)[:16]}.json"
        return self.cache_dir / name

    def load(self, parameters: Dict) -> Optional[CacheEntry]:
        """Entry for `parameters`, None when absent"""
        path = self.path_for(parameters)
        if not path.exists():
            return None
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise CacheError(f"cannot read cache entry {path}: {e}") from e

        entry = CacheEntry.from_json(data)
        if entry.parameters != parameters:
            raise CacheError(f"cache entry {path} was written for other parameters")
        logger.info(f"✅ Loaded cached {parameters['algorithm']}/{parameters['mode']} n={parameters['n']}")
        return entry

    def store(self, parameters: Dict, policy: PolicyTable, times: RemainingTimeTable) -> Path:
        """Write an entry atomically (temporary file, then rename)"""
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        path = self.path_for(parameters)
        entry = CacheEntry(parameters, policy, times)

        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix='.tmp')
        try:
            with os.fdopen(fd, 'w', encoding='utf-8') as f:
                json.dump(entry.to_json(), f, sort_keys=True)
            os.replace(tmp, path)
        except OSError as e:
            if os.path.exists(tmp):
                os.remove(tmp)
            raise CacheError(f"cannot write cache entry {path}: {e}") from e

        logger.info(f"💾 Cached {parameters['algorithm']}/{parameters['mode']} n={parameters['n']} at {path}")
        return path

    def get_or_compute(self, parameters: Dict,
                       compute: Callable[[], Tuple[PolicyTable, RemainingTimeTable]],
                       no_compute: bool = False) -> CacheEntry:
        """Cached entry, or compute and store one unless no_compute is set"""
        entry = self.load(parameters)
        if entry is not None:
            return entry
        if no_compute:
            raise CacheError(f"no cached {parameters['algorithm']}/{parameters['mode']} policy "
                             f"for n={parameters['n']} and computing is disabled")
        policy, times = compute()
        self.store(parameters, policy, times)
        return CacheEntry(parameters, policy, times)

    def entries(self) -> List[Dict]:
        """Summary of every readable entry"""
        if not self.cache_dir.exists():
            return []
        summary = []
        for path in sorted(self.cache_dir.glob('*.json')):
            try:
                with open(path, 'r', encoding='utf-8') as f:
                    entry = CacheEntry.from_json(json.load(f))
                row = dict(entry.parameters)
                row.pop('tolerances', None)
                row['file'] = path.name
                row['status'] = 'ok'
            except (OSError, json.JSONDecodeError, CacheError) as e:
                logger.warning(f"⚠️ Unreadable cache entry {path.name}: {e}")
                row = {'file': path.name, 'status': 'corrupt'}
            summary.append(row)
        return summary

    def clear(self) -> int:
        """Delete every entry; returns the number of files removed"""
        if not self.cache_dir.exists():
            return 0
        removed = 0
        for path in list(self.cache_dir.glob('*.json')) + list(self.cache_dir.glob('*.tmp')):
            path.unlink()
            removed += 1
        logger.info(f"🧹 Removed {removed} cache files from {self.cache_dir}")
        return removed
