"""
TOBL Correlation Toolkit - Caching Module
Stores finished Bell maximizations so repeated runs skip the large LPs
"""

import json
import sqlite3
import hashlib
from datetime import datetime, timedelta
from typing import Optional, Dict, Any, Union
import logging
from pathlib import Path

from config import CACHE_DIR, CACHE_TTL_HOURS, ENABLE_CACHE
from formats import functional_to_json, optimum_from_json, optimum_to_json
from models import BellFunctional, BellOptimum, CorrelationSet

logger = logging.getLogger(__name__)


def _now() -> str:
    return datetime.now().isoformat()


class SolveCache:
    """SQLite-based cache of maximize_bell results"""

    def __init__(self, db_path: Union[str, Path, None] = None, enabled: Optional[bool] = None):
        if db_path is None:
            db_path = Path(CACHE_DIR) / 'solve_cache.db'

        self.db_path = Path(db_path)
        self.enabled = ENABLE_CACHE if enabled is None else enabled

        if self.enabled:
            self.db_path.parent.mkdir(parents=True, exist_ok=True)
            self._init_db()

    def _init_db(self):
        with sqlite3.connect(self.db_path) as conn:
            conn.execute('''
                CREATE TABLE IF NOT EXISTS solve_cache (
                    cache_key TEXT PRIMARY KEY,
                    correlation_set TEXT NOT NULL,
                    symmetric INTEGER NOT NULL,
                    data TEXT NOT NULL,
                    created_at TEXT NOT NULL,
                    expires_at TEXT NOT NULL,
                    hit_count INTEGER DEFAULT 0
                )
            ''')

            conn.execute('''
                CREATE INDEX IF NOT EXISTS idx_expires
                ON solve_cache(expires_at)
            ''')

            conn.commit()

    def _generate_key(self, functional: BellFunctional, correlation_set: CorrelationSet,
                      symmetric: bool) -> str:
        """Key on the canonical JSON of the problem, bound annotation excluded"""
        problem = functional_to_json(functional)
        problem.pop('bound', None)
        content = json.dumps({'functional': problem, 'set': correlation_set.value,
                              'symmetric': symmetric}, sort_keys=True)
        return hashlib.sha256(content.encode()).hexdigest()

    def get(self, functional: BellFunctional, correlation_set: CorrelationSet,
            symmetric: bool = False) -> Optional[BellOptimum]:
        if not self.enabled:
            return None

        cache_key = self._generate_key(functional, correlation_set, symmetric)

        try:
            with sqlite3.connect(self.db_path) as conn:
                conn.row_factory = sqlite3.Row
                cursor = conn.cursor()

                cursor.execute('''
                    SELECT data FROM solve_cache
                    WHERE cache_key = ? AND expires_at > ?
                ''', (cache_key, _now()))

                row = cursor.fetchone()

                if row:
                    cursor.execute('''
                        UPDATE solve_cache
                        SET hit_count = hit_count + 1
                        WHERE cache_key = ?
                    ''', (cache_key,))
                    logger.info(f"Cache hit for {correlation_set.value} maximization")
                    return optimum_from_json(json.loads(row['data']))

        except Exception as e:
            logger.error(f"Cache retrieval error: {e}")

        return None

    def set(self, functional: BellFunctional, optimum: BellOptimum, ttl_hours: Optional[int] = None):
        if not self.enabled:
            return

        if ttl_hours is None:
            ttl_hours = CACHE_TTL_HOURS

        cache_key = self._generate_key(functional, optimum.correlation_set, optimum.symmetric)
        expires_at = (datetime.now() + timedelta(hours=ttl_hours)).isoformat()

        try:
            with sqlite3.connect(self.db_path) as conn:
                conn.execute('''
                    INSERT OR REPLACE INTO solve_cache
                    (cache_key, correlation_set, symmetric, data, created_at, expires_at, hit_count)
                    VALUES (?, ?, ?, ?, ?, ?,
                            COALESCE((SELECT hit_count FROM solve_cache WHERE cache_key = ?), 0))
                ''', (
                    cache_key, optimum.correlation_set.value, int(optimum.symmetric),
                    json.dumps(optimum_to_json(optimum)), _now(), expires_at, cache_key
                ))
                conn.commit()

        except Exception as e:
            logger.error(f"Cache storage error: {e}")

    def clear_expired(self):
        if not self.enabled:
            return

        try:
            with sqlite3.connect(self.db_path) as conn:
                conn.execute('DELETE FROM solve_cache WHERE expires_at < ?', (_now(),))
                conn.commit()

                # Vacuum to reclaim space
                conn.execute('VACUUM')

        except Exception as e:
            logger.error(f"Cache cleanup error: {e}")

    def get_stats(self) -> Dict[str, Any]:
        if not self.enabled:
            return {'enabled': False}

        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute('SELECT COUNT(*) FROM solve_cache')
                total_entries = cursor.fetchone()[0]

                cursor.execute('SELECT COUNT(*) FROM solve_cache WHERE expires_at > ?', (_now(),))
                active_entries = cursor.fetchone()[0]

                cursor.execute('SELECT SUM(hit_count), MAX(hit_count) FROM solve_cache')
                total_hits, max_hits = cursor.fetchone()

                cursor.execute('''
                    SELECT correlation_set, COUNT(*) FROM solve_cache GROUP BY correlation_set
                ''')
                by_set = dict(cursor.fetchall())

                cursor.execute('''
                    SELECT page_count * page_size as size
                    FROM pragma_page_count(), pragma_page_size()
                ''')
                cache_size_bytes = cursor.fetchone()[0]

                return {
                    'enabled': True,
                    'total_entries': total_entries,
                    'active_entries': active_entries,
                    'expired_entries': total_entries - active_entries,
                    'total_hits': total_hits or 0,
                    'max_hits': max_hits or 0,
                    'entries_by_set': by_set,
                    'cache_size_mb': round(cache_size_bytes / (1024 * 1024), 2)
                }

        except Exception as e:
            logger.error(f"Cache stats error: {e}")
            return {'enabled': True, 'error': str(e)}
