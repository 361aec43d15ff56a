from randpoly.cache import MeasureCache, cache_stats, measure_cache
from randpoly.cramer import cramer_distribution, get_evaluator
from randpoly.measures import make_bernoulli, make_cube, make_product

def test_equal_measures_share_entries():
    cache = MeasureCache('test', size=4)
    calls = []

    def build(pmf):
        calls.append(pmf)
        return len(calls)
    first, second = make_bernoulli(0.3), make_bernoulli(0.3)
    assert first is not second
    assert cache.get_or_compute(first, (), build, first) == 1
    assert cache.get_or_compute(second, (), build, second) == 1
    assert cache.get_or_compute(make_bernoulli(0.4), (), build, make_bernoulli(0.4)) == 2
    assert cache.stats() == ('test', 2, 1, 2)

def test_parameters_are_part_of_the_key():
    cache = MeasureCache('test')
    law = make_cube(3)
    assert cache.get_or_compute(law, (10,), lambda: 'coarse') == 'coarse'
    assert cache.get_or_compute(law, (20,), lambda: 'fine') == 'fine'
    assert MeasureCache.key(law, 10) in cache
    assert len(cache) == 2

def test_least_recently_used_measure_is_evicted():
    cache = MeasureCache('test', size=2)
    a, b, c = (make_bernoulli(p) for p in (0.1, 0.2, 0.3))
    for pmf in (a, b):
        cache.get_or_compute(pmf, (), lambda: pmf.digest)
    cache.get_or_compute(a, (), lambda: 'recomputed')
    cache.get_or_compute(c, (), lambda: c.digest)
    assert [key[0] for key, _ in cache.entries] == [c.digest, a.digest]
    assert MeasureCache.key(b) not in cache
    assert cache.lookup(MeasureCache.key(a)) == a.digest

def test_shared_caches_serve_the_cramer_layer():
    assert measure_cache('cramer evaluators') is measure_cache('cramer evaluators')
    assert get_evaluator(make_bernoulli(0.35)) is get_evaluator(make_bernoulli(0.35))
    law = make_product(make_bernoulli(0.35), 3)
    assert cramer_distribution(law) is cramer_distribution(make_product(make_bernoulli(0.35), 3))
    assert cramer_distribution(law, max_entries=10**5) is not cramer_distribution(law)
    names = [s.name for s in cache_stats()]
    assert 'cramer distributions' in names and 'cramer evaluators' in names
    assert dict((s.name, s.hits) for s in cache_stats())['cramer evaluators'] >= 1
