"""Per measure memo tables.

Entries are keyed on a measure's content digest plus the parameters the
cached object depends on, so two equal measures built separately share
entries. Tables are move-to-front lists safe to share between trial
workers; each counts its hits and misses.
"""

import threading
from typing import NamedTuple

from . import log

module_logger = log.get_module_logger(__file__)

class CacheStats(NamedTuple):
    name: str
    entries: int
    hits: int
    misses: int

class MeasureCache(object):
    size = 100

    def __init__(self, name, size=None):
        self.name = name
        if size is not None:
            self.size = size
        # (key, value) pairs, most recently used first
        self.entries = []
        self.hits = 0
        self.misses = 0
        self.lock = threading.RLock()

    @staticmethod
    def key(measure, *params):
        return (measure.digest,) + tuple(params)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key):
        with self.lock:
            return any(k == key for k, _ in self.entries)

    def lookup(self, key):
        """The value stored under key, moved to the front; KeyError if absent."""
        with self.lock:
            for i, (k, value) in enumerate(self.entries):
                if k == key:
                    self.entries.insert(0, self.entries.pop(i))
                    self.hits += 1
                    return value
            self.misses += 1
        raise KeyError(key)

    def store(self, key, value):
        with self.lock:
            self.entries = [(k, v) for k, v in self.entries if k != key]
            self.entries.insert(0, (key, value))
            while len(self.entries) > self.size:
                evicted, _ = self.entries.pop()
                module_logger.debug("%s: evicted measure %s", self.name, evicted[0][:12])
        return value

    def get_or_compute(self, measure, params, fcn, *args):
        """The value for (measure, *params), computed by fcn(*args) on a miss.

        Concurrent misses on one key may both compute; the last store wins.
        """
        key = self.key(measure, *params)
        try:
            return self.lookup(key)
        except KeyError:
            pass
        return self.store(key, fcn(*args))

    def stats(self):
        with self.lock:
            return CacheStats(self.name, len(self.entries), self.hits, self.misses)

_caches = {}

def measure_cache(name, size=None):
    """The process wide cache called name, created on first use."""
    if name not in _caches:
        _caches[name] = MeasureCache(name, size)
    return _caches[name]

def cache_stats():
    return [_caches[name].stats() for name in sorted(_caches)]
