import threading
from collections import OrderedDict

from services.cnf_core import count_models, fingerprint
from services.config import BoostConfig
from utils.logging import log_structured


class LRUCache:
    def __init__(self, max_size=1000):
        self.cache = OrderedDict()
        self.max_size = max_size
        self.lock = threading.Lock()

    def get(self, key):
        with self.lock:
            if key in self.cache:
                self.cache.move_to_end(key)
                return self.cache[key]
            return None

    def set(self, key, value):
        with self.lock:
            if key in self.cache:
                self.cache.pop(key)
            elif len(self.cache) >= self.max_size:
                self.cache.popitem(last=False)
            self.cache[key] = value

    def clear(self):
        with self.lock:
            self.cache.clear()

    def __len__(self):
        return len(self.cache)


class ModelCache:
    """
    Memo of k_S per formula fingerprint. Formulas are immutable, so entries never go stale;
    sweeps and the sampler's prediction step hit the same formula repeatedly.
    """
    counts = LRUCache(max_size=BoostConfig.MODEL_CACHE_SIZE)

    @classmethod
    def count(cls, formula, cap=None, workers=1, run_id=None):
        key = (fingerprint(formula), formula.n)
        cached = cls.counts.get(key)
        if cached is not None:
            log_structured('DEBUG', 'Cache hit', run_id, cache='model_count', key=key[0])
            return cached
        result = count_models(formula, cap=cap, workers=workers)
        cls.counts.set(key, result)
        log_structured('DEBUG', 'Cache miss', run_id, cache='model_count', key=key[0])
        return result

    @classmethod
    def clear(cls):
        cls.counts.clear()
