import os
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, Optional

from dotenv import dotenv_values, load_dotenv

from services.errors import ConfigError
from utils.key_matcher import KeyMatcher
from utils.logging import log_structured
from utils.validation import require_bool, require_float, require_int

WORK_BUDGET_ENV = 'LB_WORK_BUDGET'


class BoostConfig:
    # Enumeration
    ENUM_CAP_DEFAULT = 30
    ENUM_CAP_MAX = 40
    ENUM_CHUNK = 1 << 20

    # Exact and approximate traces: one ExtProb per step, reported in full
    LEVEL_MAX = 1000

    # Sampler
    WORK_BUDGET_DEFAULT = 1 << 26
    LEVEL_CAP = 20
    SAMPLER_TABLE_MAX_VARS = 20

    # Unitary no-go
    H_CAP = 6
    ALGEBRA_TOL = 1e-10
    MONOTONE_SLACK = 1e-12
    NORM_TOL = 1e-12

    # Extended precision: extra guard bits on top of the level when squaring
    GUARD_BITS = 16

    # Model-count memo
    MODEL_CACHE_SIZE = 256

    @classmethod
    def validate_config(cls):
        errors = []
        for attr in ['ENUM_CAP_DEFAULT', 'ENUM_CAP_MAX', 'ENUM_CHUNK', 'WORK_BUDGET_DEFAULT', 'LEVEL_MAX',
                     'LEVEL_CAP', 'SAMPLER_TABLE_MAX_VARS', 'H_CAP', 'GUARD_BITS', 'MODEL_CACHE_SIZE']:
            value = getattr(cls, attr)
            if not isinstance(value, int) or value <= 0:
                errors.append(f"{attr} must be a positive integer (got {value})")
        if cls.ENUM_CAP_DEFAULT > cls.ENUM_CAP_MAX:
            errors.append("ENUM_CAP_DEFAULT exceeds ENUM_CAP_MAX")
        for attr in ['ALGEBRA_TOL', 'MONOTONE_SLACK', 'NORM_TOL']:
            value = getattr(cls, attr)
            if not 0 < value < 1e-3:
                errors.append(f"{attr} must lie in (0, 1e-3) (got {value})")
        if errors:
            for err in errors:
                log_structured('ERROR', 'Config validation error', error=err)
            raise ValueError(f"BoostConfig validation failed: {errors}")

    @classmethod
    def log_config(cls):
        config_items = {k: v for k, v in cls.__dict__.items()
                        if k.isupper() and not callable(v)}
        log_structured('DEBUG', 'BoostConfig loaded', **config_items)

    @classmethod
    def work_budget(cls):
        """Default budget, or the environment override when one is set."""
        raw = os.getenv(WORK_BUDGET_ENV)
        if raw is None or raw.strip() == '':
            return cls.WORK_BUDGET_DEFAULT
        return require_int(WORK_BUDGET_ENV, raw, lo=1)


NOISE_MODELS = ('exact', 'fixed_plus', 'fixed_minus', 'uniform', 'adversarial_max', 'adversarial_min')
NOISE_ALIASES = {'plus': 'fixed_plus', 'minus': 'fixed_minus', 'random': 'uniform',
                 'worst': 'adversarial_max', 'max': 'adversarial_max', 'min': 'adversarial_min'}
STRATEGIES = ('auto', 'flat', 'tree')


@dataclass(frozen=True)
class RunConfig:
    """Every tunable of every subcommand; each command reads the keys it needs."""
    formula: Optional[str] = None
    level: Optional[int] = None
    level_offset: int = 6
    fan_in: int = 2
    eps: float = 0.0
    noise: str = 'exact'
    seed: int = 0
    trials: int = 10_000
    strategy: str = 'auto'
    work_budget: Optional[int] = None
    allow_large_level: bool = False
    record_bits: bool = False
    workers: int = 1
    enum_cap: int = BoostConfig.ENUM_CAP_DEFAULT
    # bounds sweep grid
    thm1_n_range: str = '1:12'
    thm1_extra_levels: int = 16
    thm1_random_instances: int = 17
    lemma1_n_range: str = '7:24'
    lemma1_extra_levels: int = 40
    lemma1_eps_offsets: str = '1,2'
    include_zero_eps: bool = True
    lemma2_eps: str = '1e-3,1e-6,2^-20'
    # no-go sweep
    h_values: str = '1,2,3'
    nogo_trials: int = 1000
    control: bool = True
    # Theorem 2 time units
    t_q: float = 1.0
    t_k: float = 1.0
    t_c: float = 1.0
    # outputs
    output: Optional[str] = None
    csv: Optional[str] = None
    log_level: str = 'INFO'

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_sources(cls, file_values: Optional[Dict[str, Any]] = None, flag_values: Optional[Dict[str, Any]] = None):
        """Defaults, then config-file values, then explicit (non-None) flags."""
        matcher = KeyMatcher(cls.keys())
        merged: Dict[str, Any] = {}
        for source in (file_values or {}, {k: v for k, v in (flag_values or {}).items() if v is not None}):
            for raw_key, value in source.items():
                key, error = matcher.resolve(raw_key, what='config key')
                if error:
                    raise ConfigError(error)
                merged[key] = value
        return replace(cls(), **cls._coerce(merged)).validated()

    @classmethod
    def from_file(cls, path, flag_values=None):
        if path is None:
            return cls.from_sources({}, flag_values)
        if not os.path.isfile(path):
            raise ConfigError(f"Config file not found: {path}")
        return cls.from_sources(dict(dotenv_values(path)), flag_values)

    @classmethod
    def _coerce(cls, merged):
        types = {f.name: f.type for f in fields(cls)}
        out = {}
        for key, value in merged.items():
            kind = str(types[key])
            if value is None:
                out[key] = None
            elif 'bool' in kind:
                out[key] = require_bool(key, value)
            elif 'int' in kind:
                out[key] = require_int(key, value)
            elif 'float' in kind:
                out[key] = require_float(key, value)
            else:
                out[key] = str(value).strip()
        return out

    def validated(self):
        if self.level is not None:
            require_int('level', self.level, lo=0, hi=BoostConfig.LEVEL_MAX)
        require_int('level_offset', self.level_offset, lo=0, hi=BoostConfig.LEVEL_MAX)
        require_int('fan_in', self.fan_in, lo=2, hi=64)
        require_float('eps', self.eps, lo=0.0, hi=1.0)
        require_int('seed', self.seed, lo=0, hi=2 ** 64 - 1)
        require_int('trials', self.trials, lo=1)
        if self.work_budget is not None:
            require_int('work_budget', self.work_budget, lo=1)
        require_int('workers', self.workers, lo=1, hi=64)
        require_int('enum_cap', self.enum_cap, lo=1, hi=BoostConfig.ENUM_CAP_MAX)
        require_int('thm1_extra_levels', self.thm1_extra_levels, lo=0, hi=64)
        require_int('thm1_random_instances', self.thm1_random_instances, lo=0, hi=10_000)
        require_int('lemma1_extra_levels', self.lemma1_extra_levels, lo=0, hi=256)
        require_int('nogo_trials', self.nogo_trials, lo=1)
        for name in ('t_q', 't_k', 't_c'):
            require_float(name, getattr(self, name), lo=0.0)

        noise, error = KeyMatcher(NOISE_MODELS, NOISE_ALIASES).resolve(self.noise, what='noise model')
        if error:
            raise ConfigError(error)
        strategy, error = KeyMatcher(STRATEGIES).resolve(self.strategy, what='strategy')
        if error:
            raise ConfigError(error)
        return replace(self, noise=noise, strategy=strategy)

    def effective_work_budget(self):
        return self.work_budget if self.work_budget is not None else BoostConfig.work_budget()


# Pull LB_WORK_BUDGET from a local .env if present, then validate defaults on import
load_dotenv()
try:
    BoostConfig.validate_config()
    BoostConfig.log_config()
except Exception as e:
    log_structured('CRITICAL', 'BoostConfig failed to load', error=str(e))
    raise
