import platform

import psutil

from services.performance_monitor import PerformanceMonitor
from utils.logging import log_structured


class Monitoring:
    @staticmethod
    def runtime_snapshot():
        mem = psutil.Process().memory_info()
        return {
            'python': platform.python_version(),
            'memory_rss_mb': mem.rss // 1024 // 1024,
            'cpu_count': psutil.cpu_count(logical=True) or 1,
            'timings_ms': {op: round(stats['total_ms'], 3)
                           for op, stats in PerformanceMonitor.get_all_stats().items()},
        }

    @staticmethod
    def log_runtime(run_id=None):
        snap = Monitoring.runtime_snapshot()
        log_structured('INFO', 'Run finished', run_id, memory_rss_mb=snap['memory_rss_mb'],
                       **{f't_{op}': ms for op, ms in snap['timings_ms'].items()})
        return snap
