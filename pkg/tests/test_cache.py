"""SQLite solve cache"""

import pytest

from bell import chsh, gyni
from cache import SolveCache
from membership import maximize_bell
from models import BellFunctional, CorrelationSet


@pytest.fixture
def cache(tmp_path):
    return SolveCache(tmp_path / 'cache' / 'solve.db', enabled=True)


@pytest.fixture(scope='module')
def chsh_optimum():
    return maximize_bell(chsh(), CorrelationSet.NO_SIGNALING)


def test_miss_then_hit(cache, chsh_optimum):
    assert cache.get(chsh(), CorrelationSet.NO_SIGNALING) is None
    cache.set(chsh(), chsh_optimum)
    cached = cache.get(chsh(), CorrelationSet.NO_SIGNALING)
    assert cached == chsh_optimum
    stats = cache.get_stats()
    assert stats['total_entries'] == 1
    assert stats['total_hits'] == 1
    assert stats['entries_by_set'] == {'ns': 1}


def test_key_separates_set_and_symmetry(cache, chsh_optimum):
    cache.set(chsh(), chsh_optimum)
    assert cache.get(chsh(), CorrelationSet.LOCAL) is None
    assert cache.get(chsh(), CorrelationSet.NO_SIGNALING, symmetric=True) is None
    assert cache.get(gyni(), CorrelationSet.NO_SIGNALING) is None


def test_key_ignores_the_bound_annotation(cache, chsh_optimum):
    cache.set(chsh(), chsh_optimum)
    bare = BellFunctional(chsh().scenario, chsh().coefficients)
    assert cache.get(bare, CorrelationSet.NO_SIGNALING) == chsh_optimum


def test_local_witness_survives(cache):
    optimum = maximize_bell(gyni(), CorrelationSet.LOCAL)
    cache.set(gyni(), optimum)
    assert cache.get(gyni(), CorrelationSet.LOCAL).witness == optimum.witness


def test_expired_entries_are_cleared(cache, chsh_optimum):
    cache.set(chsh(), chsh_optimum, ttl_hours=-1)
    assert cache.get(chsh(), CorrelationSet.NO_SIGNALING) is None
    assert cache.get_stats()['expired_entries'] == 1
    cache.clear_expired()
    assert cache.get_stats()['total_entries'] == 0


def test_disabled_cache_stores_nothing(tmp_path, chsh_optimum):
    cache = SolveCache(tmp_path / 'off.db', enabled=False)
    cache.set(chsh(), chsh_optimum)
    assert cache.get(chsh(), CorrelationSet.NO_SIGNALING) is None
    assert cache.get_stats() == {'enabled': False}
    assert not (tmp_path / 'off.db').exists()
