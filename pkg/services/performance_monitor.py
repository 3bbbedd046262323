import threading
import time
from collections import defaultdict, deque
from contextlib import contextmanager

from utils.logging import log_structured


class PerformanceMonitor:
    """
    Wall-clock timings per engine operation ('count_models', 'boost_exact', ...).
    Thread-safe; keeps a rolling window per operation.
    """
    _lock = threading.Lock()
    _metrics = defaultdict(lambda: deque(maxlen=1000))  # op -> deque of (duration_ms, success)
    SLOW_MS = 10_000

    @classmethod
    def record(cls, op, duration_ms, success=True):
        with cls._lock:
            cls._metrics[op].append((duration_ms, success))
        if duration_ms > cls.SLOW_MS:
            log_structured('WARN', 'Slow operation', op=op, duration_ms=round(duration_ms, 1))

    @classmethod
    @contextmanager
    def timed(cls, op):
        start = time.perf_counter()
        success = True
        try:
            yield
        except Exception:
            success = False
            raise
        finally:
            cls.record(op, (time.perf_counter() - start) * 1000.0, success)

    @classmethod
    def get_stats(cls, op):
        with cls._lock:
            data = list(cls._metrics[op])
        if not data:
            return {'count': 0, 'total_ms': 0.0, 'avg_ms': 0.0, 'max_ms': 0.0, 'error_rate': 0.0}
        durations = [d[0] for d in data]
        errors = sum(1 for d in data if not d[1])
        return {
            'count': len(durations),
            'total_ms': sum(durations),
            'avg_ms': sum(durations) / len(durations),
            'max_ms': max(durations),
            'error_rate': errors / len(durations),
        }

    @classmethod
    def get_all_stats(cls):
        with cls._lock:
            ops = sorted(cls._metrics)
        return {op: cls.get_stats(op) for op in ops}

    @classmethod
    def reset(cls):
        with cls._lock:
            cls._metrics.clear()
