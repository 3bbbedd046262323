import logging
import sys

import psutil

LOG_FORMAT = '%(asctime)s %(levelname)s %(message)s'

logger = logging.getLogger('cloneboost')

_LEVELS = {
    'DEBUG': logging.DEBUG,
    'INFO': logging.INFO,
    'WARN': logging.WARNING,
    'WARNING': logging.WARNING,
    'ERROR': logging.ERROR,
    'CRITICAL': logging.CRITICAL,
}


class _StderrHandler(logging.StreamHandler):
    """Writes to whatever sys.stderr is at emit time."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def configure_logging(level='INFO'):
    """Attach a stderr handler once; stdout is reserved for reports."""
    if not logger.handlers:
        handler = _StderrHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.propagate = False
    logger.setLevel(_LEVELS.get(str(level).upper(), logging.INFO))


def log_structured(level, message, run_id=None, **kwargs):
    # Formula paths and seeds are fine to log; raw formula text is not
    SENSITIVE_KEYS = {'formula_text', 'token', 'password'}
    safe_kwargs = {k: (v if k not in SENSITIVE_KEYS else '***') for k, v in kwargs.items()}
    if run_id:
        safe_kwargs = {'run_id': run_id, **safe_kwargs}
    extra = ' '.join(f'{k}={v}' for k, v in safe_kwargs.items())
    log_msg = f"{message} {extra}" if extra else message
    logger.log(_LEVELS.get(level, logging.INFO), log_msg)
    if logger.isEnabledFor(logging.DEBUG):
        mem = psutil.Process().memory_info()
        logger.debug(f"MEMORY_RSS_MB={mem.rss // 1024 // 1024}")
